// Acceptance suite: runs every top-level criterion end to end and prints one
// pass/fail line each. Exit code is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/rng.hpp"
#include "support/metric_oracles.hpp"

using namespace zsml;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
  double limit_seconds = 0.0;  // 0 = no limit
};

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

AnnotationMatrix random_annotations(std::size_t m, std::size_t l, Rng& rng,
                                    double positive_rate) {
  AnnotationMatrix y(m, l);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < l; ++j)
      y.set(i, j, rng.uniform() < positive_rate ? 1 : -1);
  return y;
}

std::string run_command(const std::string& command, int& exit_code) {
  std::string output;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return output;
  }
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return output;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / "zsml_acceptance" / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// --- criterion 1 -----------------------------------------------------------
// With the generating model and no annotation noise, the Monte-Carlo risk is
// exactly zero and the distance-binned curve is identically zero.
bool oracle_model_exactness(std::string& detail) {
  SynthConfig config;
  config.flip_prob = 0.0;
  const SyntheticWorld world = make_world(config, 7);
  const RiskEstimate risk = estimate_risk(world.v_star, world, 2000, 2000, 3);

  Fig1cConfig fig;
  fig.synth.flip_prob = 0.0;
  fig.use_ground_truth_model = true;
  fig.seeds = {1, 2, 3, 4, 5};
  const BinCurve curve = run_fig1c(fig);
  double max_loss = 0.0;
  for (const auto& per_seed : curve.per_seed)
    for (double v : per_seed) max_loss = std::max(max_loss, v);

  std::ostringstream out;
  out << "risk=" << risk.risk << " max_curve=" << max_loss;
  detail = out.str();
  return risk.risk == 0.0 && max_loss == 0.0;
}

// --- criterion 2 -----------------------------------------------------------
// With the generating model and flip probability 0.1, the measured risk sits
// within 4 standard errors of 0.10 on each of 20 seeds.
bool noise_floor_recovery(std::string& detail) {
  SynthConfig config;
  config.flip_prob = 0.1;
  const SyntheticWorld world = make_world(config, 11);
  const double se = std::sqrt(0.1 * 0.9 / (2000.0 * 2000.0));
  double worst = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RiskEstimate est = estimate_risk(world.v_star, world, 2000, 2000, seed);
    const double dev = std::fabs(est.risk - 0.1);
    worst = std::max(worst, dev);
    ok = ok && dev <= 4.0 * se;
  }
  std::ostringstream out;
  out << "max |risk-0.1|=" << worst << " allowed=" << 4.0 * se;
  detail = out.str();
  return ok;
}

// --- criterion 3 -----------------------------------------------------------
// Hinge training on the default benchmark keeps the Hamming loss against the
// noiseless test annotations at or below 0.20 on the seen group and the
// nearest unseen bin, averaged over 5 seeds. Evaluated by direct counting,
// independent of the metrics module.
bool learnability_at_benchmark_scale(std::string& detail) {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double seen_total = 0.0, near_total = 0.0;
  for (std::uint64_t seed : seeds) {
    const GeneratedWorld g = generate_world(SynthConfig{}, seed);
    HingeConfig hinge;
    hinge.seed = derive_seed(seed, "acceptance_hinge");
    const BilinearModel model =
        train_hinge(g.train_features, g.seen_labels, g.train_annotations, hinge)
            .first;

    Matrix all_labels(3000, 2);
    for (std::size_t l = 0; l < 10; ++l)
      for (std::size_t j = 0; j < 2; ++j) all_labels(l, j) = g.seen_labels(l, j);
    for (std::size_t l = 0; l < 2990; ++l)
      for (std::size_t j = 0; j < 2; ++j)
        all_labels(10 + l, j) = (*g.unseen_labels)(l, j);

    const AnnotationMatrix pred =
        predict_all(model, g.test_features, all_labels);
    const DistanceBins bins =
        distance_bins(g.seen_labels, *g.unseen_labels, BinSpec{});

    for (int which : {0, 1}) {
      const auto& group = bins.groups[which];
      std::size_t mismatches = 0;
      for (std::size_t m = 0; m < 1000; ++m)
        for (std::size_t label : group.labels)
          if (pred.at(m, label) != g.test_annotations.noiseless_at(m, label))
            ++mismatches;
      const double loss = static_cast<double>(mismatches) /
                          (1000.0 * static_cast<double>(group.labels.size()));
      (which == 0 ? seen_total : near_total) += loss / 5.0;
    }
  }
  std::ostringstream out;
  out << "seen=" << seen_total << " nearest_bin=" << near_total
      << " threshold=0.20";
  detail = out.str();
  return seen_total <= 0.20 && near_total <= 0.20;
}

// --- criterion 4 -----------------------------------------------------------
// Mean over 5 seeds: the farthest unseen bin is at least as hard as the
// nearest unseen bin.
bool distance_trend(std::string& detail) {
  Fig1cConfig fig;
  fig.seeds = {1, 2, 3, 4, 5};
  const BinCurve curve = run_fig1c(fig);
  const double nearest = curve.mean[1];
  const double farthest = curve.mean.back();
  std::ostringstream out;
  out << "nearest=" << nearest << " farthest=" << farthest;
  detail = out.str();
  return farthest >= nearest;
}

// --- criterion 5 -----------------------------------------------------------
// The analytic RankNet gradient matches central finite differences to 1e-5
// relative error on 20 random instances.
bool ranknet_gradient_correctness(std::string& detail) {
  Rng rng(500);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t l = 2 + static_cast<std::size_t>(rng.uniform() * 7);
    const Matrix x = random_matrix(m, d, rng);
    const Matrix labels = random_matrix(l, n, rng);
    AnnotationMatrix y = random_annotations(m, l, rng, 0.5);
    y.set(0, 0, 1);
    y.set(0, 1, -1);
    const BilinearModel model{random_matrix(n, d, rng)};
    const double gamma = trial % 2 == 0 ? 0.0 : 0.05;

    const Matrix grad = ranknet_gradient(model, x, labels, y, gamma);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double h = 1e-6 * (1.0 + std::fabs(model.v(i, j)));
        BilinearModel up = model, down = model;
        up.v(i, j) += h;
        down.v(i, j) -= h;
        const double fd = (ranknet_objective(up, x, labels, y, gamma) -
                           ranknet_objective(down, x, labels, y, gamma)) /
                          (2.0 * h);
        const double rel =
            std::fabs(grad(i, j) - fd) / (1.0 + std::fabs(fd));
        worst = std::max(worst, rel);
      }
  }
  std::ostringstream out;
  out << "max rel err=" << worst << " allowed=1e-5";
  detail = out.str();
  return worst <= 1e-5;
}

// --- criterion 6 -----------------------------------------------------------
// The closed-form ridge solution is a stationary point of its objective.
bool eszsl_stationarity(std::string& detail) {
  Rng rng(600);
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 3 + static_cast<std::size_t>(rng.uniform() * 10);
    const std::size_t l = 2 + static_cast<std::size_t>(rng.uniform() * 5);
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    const Matrix x = random_matrix(m, d, rng);
    const Matrix labels = random_matrix(l, n, rng);
    const AnnotationMatrix y = random_annotations(m, l, rng, 0.5);
    const double gl = 0.05 + rng.uniform();
    const double gd = 0.05 + rng.uniform();
    const BilinearModel v = train_eszsl(x, labels, y, gl, gd);

    double scale = 0.0;
    const BilinearModel zero{Matrix(n, d)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        BilinearModel up = zero, down = zero;
        const double h = 1e-6;
        up.v(i, j) += h;
        down.v(i, j) -= h;
        scale += std::fabs((eszsl_objective(up, x, labels, y, gl, gd) -
                            eszsl_objective(down, x, labels, y, gl, gd)) /
                           (2.0 * h));
      }
    scale /= static_cast<double>(n * d);

    double max_entry = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double h = 1e-6 * (1.0 + std::fabs(v.v(i, j)));
        BilinearModel up = v, down = v;
        up.v(i, j) += h;
        down.v(i, j) -= h;
        max_entry = std::max(
            max_entry, std::fabs((eszsl_objective(up, x, labels, y, gl, gd) -
                                  eszsl_objective(down, x, labels, y, gl, gd)) /
                                 (2.0 * h)));
      }
    worst_ratio = std::max(worst_ratio, max_entry / (1e-6 * (1.0 + scale)));
  }
  std::ostringstream out;
  out << "worst gradient ratio=" << worst_ratio << " (must be <= 1)";
  detail = out.str();
  return worst_ratio <= 1.0;
}

// --- criterion 7 -----------------------------------------------------------
// MiAP, top-k P/R/F1 and Hamming agree exactly with brute-force oracles on
// 1000 random instances.
bool metric_oracles(std::string& detail) {
  Rng rng(700);
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const std::size_t l = 2 + static_cast<std::size_t>(rng.uniform() * 11);
    Matrix scores(m, l);
    AnnotationMatrix truth(m, l);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < l; ++j) {
        double s = rng.normal();
        if (trial % 3 == 0) s = std::round(s * 2.0) / 2.0;  // exercise ties
        scores(i, j) = s;
        truth.set(i, j, rng.uniform() < 0.4 ? 1 : -1);
      }
    truth.set(0, 0, 1);
    const std::size_t k =
        1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(l));

    if (miap(scores, truth) != oracle::miap(scores, truth)) ++disagreements;
    const TopkResult mine = topk_prf(scores, truth, k);
    const TopkResult ref = oracle::topk(scores, truth, k);
    if (mine.precision != ref.precision || mine.recall != ref.recall ||
        mine.f1 != ref.f1)
      ++disagreements;
    AnnotationMatrix pred(m, l);
    for (std::size_t i = 0; i < pred.values.size(); ++i)
      pred.values[i] = rng.uniform() < 0.5 ? 1 : -1;
    if (hamming_loss(pred, truth) != oracle::hamming(pred, truth))
      ++disagreements;
  }
  std::ostringstream out;
  out << disagreements << " disagreements in 1000 instances";
  detail = out.str();
  return disagreements == 0;
}

// --- criterion 8 -----------------------------------------------------------
// Over the (m,l) grid, every measured gap respects the bound, gaps shrink
// with scale, and the bound is vacuous at the benchmark's own size.
bool pac_bound_consistency(std::string& detail) {
  GapConfig config;
  config.trials = 20;
  config.seed = 1;
  const std::vector<GapRecord> records = gap_experiment(config);

  std::size_t violations = 0;
  std::vector<double> small_gaps, big_gaps;
  bool benchmark_vacuous = false;
  for (const GapRecord& rec : records) {
    if (rec.gap > rec.bound) ++violations;
    if (rec.m == 100 && rec.l == 10) small_gaps.push_back(rec.gap);
    if (rec.m == 2000 && rec.l == 200) big_gaps.push_back(rec.gap);
    if (rec.m == 500 && rec.l == 10) benchmark_vacuous = rec.vacuous;
  }
  const double median_small = median(small_gaps);
  const double median_big = median(big_gaps);
  std::ostringstream out;
  out << "violations=" << violations << " median(100,10)=" << median_small
      << " median(2000,200)=" << median_big
      << " vacuous@(500,10)=" << (benchmark_vacuous ? "yes" : "no");
  detail = out.str();
  return violations == 0 && median_big < median_small && benchmark_vacuous;
}

// --- criterion 9 -----------------------------------------------------------
// Seen-fraction sweep with RankNet: more seen labels never hurt much, every
// fraction beats the zero model, and the first drop is no steeper than the
// average drop.
bool sweep_degradation(std::string& detail) {
  SweepConfig config;
  config.learners = {"ranknet"};
  config.gamma_grid = {0.0, 0.001, 0.01};
  config.ranknet.epochs = 60;
  config.ranknet.step0 = 2.0;
  config.seeds = {1, 2, 3, 4, 5};
  const SynthConfig world = default_sweep_world();
  const SweepResult result = run_seen_fraction_sweep_synth(world, config);

  std::map<double, double> miap_mean;
  for (const SweepRow& row : result.rows)
    miap_mean[row.fraction] += row.report.miap / 5.0;

  double baseline = 0.0;
  for (std::uint64_t seed : config.seeds) {
    const Dataset data = to_dataset(generate_world(world, seed));
    const Matrix zeros(data.test_features->rows(), data.seen_labels.rows());
    baseline += miap(zeros, *data.test_annotations_seen) / 5.0;
  }

  const double full = miap_mean[1.0];
  const double half = miap_mean[0.5];
  bool above_baseline = true;
  for (const auto& [fraction, value] : miap_mean)
    above_baseline = above_baseline && value > baseline;
  const double first_drop = full - miap_mean[0.9];
  const double mean_drop = (full - half) / 5.0;

  std::ostringstream out;
  out << "miap(1.0)=" << full << " miap(0.5)=" << half
      << " baseline=" << baseline << " first_drop=" << first_drop
      << " mean_drop=" << mean_drop;
  detail = out.str();
  return full > half && above_baseline && first_drop <= mean_drop;
}

// --- criterion 10 ----------------------------------------------------------
// Repeated seeded CLI runs are byte-identical (run summaries excluded: they
// carry wall-clock timings) and dataset/model round trips are lossless.
bool determinism_and_round_trip(std::string& detail) {
  const std::string cli = ZSML_CLI_PATH;
  int code = 0;
  const fs::path base = fresh_dir("determinism");

  const std::string gen_flags =
      " --seed 9 --d 3 --n 2 --k 3 --m-train 50 --m-test 30 --l-seen 5"
      " --l-unseen 15 --flip-prob 0.1";
  for (const char* tag : {"a", "b"}) {
    run_command(cli + " gen --out " +
                    (base / (std::string("data_") + tag)).string() + gen_flags,
                code);
    if (code != 0) {
      detail = "gen failed";
      return false;
    }
  }
  for (const auto& entry : fs::directory_iterator(base / "data_a")) {
    const std::string name = entry.path().filename().string();
    if (name == "run_summary.json") continue;
    if (slurp(entry.path()) != slurp(base / "data_b" / name)) {
      detail = "gen outputs differ: " + name;
      return false;
    }
  }

  for (const char* tag : {"a", "b"}) {
    run_command(cli + " train --data " + (base / "data_a").string() +
                    " --learner ranknet --epochs 20 --gamma 0.01 --seed 2"
                    " --out " +
                    (base / (std::string("model_") + tag + ".csv")).string(),
                code);
    if (code != 0) {
      detail = "train failed";
      return false;
    }
    run_command(cli + " eval --model " +
                    (base / (std::string("model_") + tag + ".csv")).string() +
                    " --data " + (base / "data_a").string() +
                    " --labels all --out " +
                    (base / (std::string("report_") + tag + ".json")).string(),
                code);
    if (code != 0) {
      detail = "eval failed";
      return false;
    }
  }
  for (const char* name : {"model_", "report_"}) {
    const std::string ext = std::string(name) == "model_" ? ".csv" : ".json";
    if (slurp(base / (std::string(name) + "a" + ext)) !=
        slurp(base / (std::string(name) + "b" + ext))) {
      detail = std::string("outputs differ: ") + name;
      return false;
    }
  }
  if (slurp(base / "model_a.json") != slurp(base / "model_b.json")) {
    detail = "model sidecars differ";
    return false;
  }
  if (slurp(base / "model_a_trace.csv") != slurp(base / "model_b_trace.csv")) {
    detail = "training traces differ";
    return false;
  }

  // dataio round trips: random matrices and annotations up to 50x50
  Rng rng(1000);
  const fs::path rt = base / "roundtrip";
  fs::create_directories(rt);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + static_cast<std::size_t>(rng.uniform() * 50);
    const std::size_t cols = 1 + static_cast<std::size_t>(rng.uniform() * 50);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        m(i, j) = rng.normal() * std::pow(10.0, rng.uniform() * 8.0 - 4.0);
    write_matrix_csv(rt / "m.csv", m);
    if (!(read_matrix_csv(rt / "m.csv") == m)) {
      detail = "matrix round trip not lossless";
      return false;
    }
    AnnotationMatrix y(rows, cols);
    for (auto& v : y.values) v = rng.uniform() < 0.5 ? 1 : -1;
    write_annotation_values_csv(rt / "y.csv", y.values, rows, cols);
    if (!(read_annotations_csv(rt / "y.csv").values == y.values)) {
      detail = "annotation round trip not lossless";
      return false;
    }
  }

  detail = "gen/train/eval byte-identical; 100 round trips lossless";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria{
      {1, "oracle-model exactness", oracle_model_exactness, 10.0},
      {2, "noise-floor recovery", noise_floor_recovery, 120.0},
      {3, "learnability at benchmark scale", learnability_at_benchmark_scale,
       300.0},
      {4, "distance-bin trend", distance_trend, 0.0},
      {5, "ranknet gradient correctness", ranknet_gradient_correctness, 30.0},
      {6, "eszsl stationarity", eszsl_stationarity, 0.0},
      {7, "metric oracles", metric_oracles, 0.0},
      {8, "pac bound consistency", pac_bound_consistency, 900.0},
      {9, "sweep degradation", sweep_degradation, 0.0},
      {10, "determinism and round trips", determinism_and_round_trip, 0.0},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && c.limit_seconds > 0.0 && seconds > c.limit_seconds) {
      ok = false;
      detail += "; exceeded the runtime limit of " +
                std::to_string(c.limit_seconds) + "s";
    }
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL",
                c.number, c.name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}

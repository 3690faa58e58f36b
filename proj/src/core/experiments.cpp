#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "core/rng.hpp"
#include "core/threads.hpp"

namespace zsml {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = count; i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(idx[i - 1], idx[j < i ? j : i - 1]);
  }
  return idx;
}

Matrix concat_label_rows(const Matrix& seen, const std::optional<Matrix>& unseen) {
  if (!unseen) return seen;
  Matrix all(seen.rows() + unseen->rows(), seen.cols());
  for (std::size_t i = 0; i < seen.rows(); ++i)
    for (std::size_t j = 0; j < seen.cols(); ++j) all(i, j) = seen(i, j);
  for (std::size_t i = 0; i < unseen->rows(); ++i)
    for (std::size_t j = 0; j < seen.cols(); ++j)
      all(seen.rows() + i, j) = (*unseen)(i, j);
  return all;
}

AnnotationMatrix concat_annotation_cols(const AnnotationMatrix& a,
                                        const std::optional<AnnotationMatrix>& b) {
  if (!b) return a;
  AnnotationMatrix out(a.rows, a.cols + b->cols);
  const bool clean = a.noiseless && b->noiseless;
  if (clean) out.noiseless.emplace(out.rows * out.cols);
  for (std::size_t m = 0; m < a.rows; ++m) {
    for (std::size_t l = 0; l < a.cols; ++l) {
      out.set(m, l, a.at(m, l));
      if (clean) (*out.noiseless)[m * out.cols + l] = a.noiseless_at(m, l);
    }
    for (std::size_t l = 0; l < b->cols; ++l) {
      out.set(m, a.cols + l, b->at(m, l));
      if (clean)
        (*out.noiseless)[m * out.cols + a.cols + l] = b->noiseless_at(m, l);
    }
  }
  return out;
}

}  // namespace

BinCurve run_fig1c(const Fig1cConfig& config) {
  if (config.seeds.empty()) throw ContractError("run_fig1c: need at least one seed");
  if (config.use_noiseless && config.synth.flip_prob == 1.0)
    throw ContractError("run_fig1c: noiseless comparison with flip_prob=1 is void");

  const std::size_t n_seeds = config.seeds.size();
  BinCurve curve;
  curve.seeds = config.seeds;
  curve.per_seed.resize(n_seeds);
  curve.per_seed_distance.resize(n_seeds);

  std::vector<std::vector<std::string>> kinds(n_seeds);
  parallel_for(n_seeds, [&](std::size_t s) {
    const std::uint64_t seed = config.seeds[s];
    const GeneratedWorld g = generate_world(config.synth, seed);

    BilinearModel model = g.world.v_star;
    if (!config.use_ground_truth_model) {
      HingeConfig hinge = config.hinge;
      hinge.seed = derive_seed(seed, "fig1c_hinge");
      model = train_hinge(g.train_features, g.seen_labels, g.train_annotations,
                          hinge)
                  .first;
    }

    const Matrix all_labels = concat_label_rows(g.seen_labels, g.unseen_labels);
    const AnnotationMatrix pred =
        predict_all(model, g.test_features, all_labels);
    AnnotationMatrix truth = g.test_annotations;
    if (config.use_noiseless) {
      if (!truth.noiseless)
        throw ContractError("run_fig1c: no noiseless annotations available");
      truth.values = *truth.noiseless;
    }

    std::vector<DistanceBins::Group> groups;
    if (g.unseen_labels) {
      DistanceBins bins =
          distance_bins(g.seen_labels, *g.unseen_labels, config.bins);
      groups = std::move(bins.groups);
    } else if (config.bins.include_seen_group) {
      DistanceBins::Group seen_group;
      seen_group.seen = true;
      seen_group.labels.resize(g.seen_labels.rows());
      std::iota(seen_group.labels.begin(), seen_group.labels.end(), 0);
      groups.push_back(std::move(seen_group));
    }
    if (groups.empty())
      throw ContractError("run_fig1c: no label groups to evaluate");

    for (const auto& group : groups) {
      const AnnotationMatrix gp = select_cols(pred, group.labels);
      const AnnotationMatrix gt = select_cols(truth, group.labels);
      curve.per_seed[s].push_back(hamming_loss(gp, gt));
      curve.per_seed_distance[s].push_back(group.mean_distance);
      kinds[s].push_back(group.seen ? "seen" : "unseen");
    }
  });

  curve.group_kinds = kinds.front();
  const std::size_t n_groups = curve.group_kinds.size();
  curve.mean.assign(n_groups, 0.0);
  curve.mean_distance.assign(n_groups, 0.0);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    if (curve.per_seed[s].size() != n_groups)
      throw ContractError("run_fig1c: inconsistent group count across seeds");
    for (std::size_t gi = 0; gi < n_groups; ++gi) {
      curve.mean[gi] += curve.per_seed[s][gi];
      curve.mean_distance[gi] += curve.per_seed_distance[s][gi];
    }
  }
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    curve.mean[gi] /= static_cast<double>(n_seeds);
    curve.mean_distance[gi] /= static_cast<double>(n_seeds);
  }
  return curve;
}

void write_fig1c_csv(const fs::path& path, const BinCurve& curve) {
  std::ofstream out = open_out(path);
  out << "group_index,group_kind,mean_distance,seed,hamming\n";
  for (std::size_t s = 0; s < curve.seeds.size(); ++s) {
    for (std::size_t gi = 0; gi < curve.group_kinds.size(); ++gi) {
      out << gi << ',' << curve.group_kinds[gi] << ','
          << fmt(curve.per_seed_distance[s][gi]) << ',' << curve.seeds[s] << ','
          << fmt(curve.per_seed[s][gi]) << '\n';
    }
  }
  for (std::size_t gi = 0; gi < curve.group_kinds.size(); ++gi) {
    out << gi << ',' << curve.group_kinds[gi] << ','
        << fmt(curve.mean_distance[gi]) << ",mean," << fmt(curve.mean[gi])
        << '\n';
  }
}

SynthConfig default_sweep_world() {
  SynthConfig config;
  config.d = 20;
  config.n = 8;
  config.k = 5;
  config.dirichlet_alpha = 3.0;
  config.m_train = 3000;
  config.m_test = 1000;
  config.l_seen = 50;
  config.l_unseen = 0;
  config.flip_prob = 0.1;
  return config;
}

std::vector<std::vector<std::size_t>> seen_subsets(
    std::size_t l_total, const std::vector<double>& fractions, bool nested,
    std::uint64_t seed) {
  if (fractions.empty()) throw ContractError("seen_subsets: no fractions");
  std::vector<std::vector<std::size_t>> subsets;
  Rng nested_rng(derive_seed(seed, "seen_subset"));
  const std::vector<std::size_t> nested_perm =
      shuffled_indices(l_total, nested_rng);
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double f = fractions[fi];
    if (!(f > 0.0) || f > 1.0)
      throw ContractError("seen_subsets: fraction " + fmt(f) +
                          " outside (0,1]");
    const std::size_t count = static_cast<std::size_t>(
        std::lround(f * static_cast<double>(l_total)));
    if (count == 0)
      throw ContractError("seen_subsets: fraction " + fmt(f) +
                          " selects zero labels");
    std::vector<std::size_t> subset;
    if (nested) {
      subset.assign(nested_perm.begin(), nested_perm.begin() + count);
    } else {
      Rng rng(derive_seed(seed, "seen_subset_indep", fi));
      const std::vector<std::size_t> perm = shuffled_indices(l_total, rng);
      subset.assign(perm.begin(), perm.begin() + count);
    }
    std::sort(subset.begin(), subset.end());
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

namespace {

struct TrainedAny {
  std::variant<BilinearModel, ConseModel> model;

  Matrix score(const Matrix& features, const Matrix& labels) const {
    if (model.index() == 0)
      return score_all(std::get<BilinearModel>(model), features, labels);
    return conse_score_all(std::get<ConseModel>(model), features, labels);
  }
};

TrainedAny train_learner(const std::string& learner, const SplitView& view,
                         double gamma, const SweepConfig& config,
                         std::uint64_t seed) {
  if (learner == "hinge") {
    HingeConfig cfg = config.hinge;
    cfg.seed = seed;
    return {train_hinge(view.features, view.labels, view.annotations, cfg).first};
  }
  if (learner == "ranknet") {
    RankNetConfig cfg = config.ranknet;
    cfg.gamma = gamma;
    cfg.seed = seed;
    return {
        train_ranknet(view.features, view.labels, view.annotations, cfg).first};
  }
  if (learner == "eszsl") {
    return {train_eszsl(view.features, view.labels, view.annotations, gamma,
                        gamma)};
  }
  if (learner == "conse") {
    ConseConfig cfg = config.conse;
    cfg.seed = seed;
    return {train_conse(view.features, view.labels, view.annotations,
                        std::min(cfg.t, view.labels.rows()), cfg)};
  }
  throw ContractError("unknown learner '" + learner + "'");
}

bool learner_uses_gamma(const std::string& learner) {
  return learner == "ranknet" || learner == "eszsl";
}

// rows (of the given subset) that keep at least one relevant seen label
std::vector<std::size_t> retained_rows(const AnnotationMatrix& cols_view,
                                       const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> keep;
  for (std::size_t r : rows) {
    for (std::size_t l = 0; l < cols_view.cols; ++l) {
      if (cols_view.at(r, l) == 1) {
        keep.push_back(r);
        break;
      }
    }
  }
  return keep;
}

SplitView make_view(const Dataset& data, const Matrix& subset_labels,
                    const AnnotationMatrix& subset_annotations,
                    const std::vector<std::size_t>& rows) {
  SplitView view;
  view.features = select_rows(data.train_features, rows);
  view.labels = subset_labels;
  view.annotations = select_rows(subset_annotations, rows);
  return view;
}

}  // namespace

TuneResult tune_gamma(const SplitView& train, const SplitView& validation,
                      const std::vector<double>& gamma_grid,
                      const std::string& learner, const SweepConfig& config) {
  if (gamma_grid.empty()) throw ContractError("tune_gamma: empty grid");
  if (!learner_uses_gamma(learner))
    throw ContractError("tune_gamma: learner '" + learner +
                        "' has no gamma hyperparameter");
  std::vector<double> grid = gamma_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  TuneResult result;
  double best = -2.0;
  bool any_trained = false;
  for (double gamma : grid) {
    // a grid value whose training diverges scores -1 and cannot win
    double val = -1.0;
    try {
      const TrainedAny model = train_learner(learner, train, gamma, config, 0);
      const Matrix scores = model.score(validation.features, validation.labels);
      val = miap(scores, validation.annotations);
      any_trained = true;
    } catch (const DivergedError&) {
    }
    result.table.emplace_back(gamma, val);
    if (val > best) {  // strict: ties keep the smaller gamma
      best = val;
      result.gamma = gamma;
    }
  }
  if (!any_trained)
    throw ContractError("tune_gamma: training diverged at every grid value");
  return result;
}

namespace {

SweepResult sweep_one_seed(const Dataset& data, const SweepConfig& config,
                           std::uint64_t seed) {
  if (!data.test_features || !data.test_annotations_seen)
    throw ContractError("sweep: dataset has no test block");
  if (!(config.validation_fraction > 0.0) || !(config.validation_fraction < 1.0))
    throw ContractError("sweep: validation_fraction must lie in (0,1)");

  std::vector<double> fractions = config.fractions;
  std::sort(fractions.begin(), fractions.end(), std::greater<>());

  const std::size_t m = data.train_features.rows();
  if (m < 2) throw ContractError("sweep: need at least two training rows");
  Rng split_rng(derive_seed(seed, "validation_split"));
  std::vector<std::size_t> order = shuffled_indices(m, split_rng);
  std::size_t val_count = static_cast<std::size_t>(std::lround(
      config.validation_fraction * static_cast<double>(m)));
  val_count = std::min(std::max<std::size_t>(val_count, 1), m - 1);
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + val_count);
  std::vector<std::size_t> train_rows(order.begin() + val_count, order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  const Matrix test_labels =
      concat_label_rows(data.seen_labels, data.unseen_labels);
  const AnnotationMatrix test_truth = concat_annotation_cols(
      *data.test_annotations_seen, data.test_annotations_unseen);

  const auto subsets = seen_subsets(data.seen_labels.rows(), fractions,
                                    config.nested, seed);

  SweepResult result;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    const std::vector<std::size_t>& subset = subsets[fi];
    const Matrix subset_labels = select_rows(data.seen_labels, subset);
    const AnnotationMatrix subset_annotations =
        select_cols(data.train_annotations, subset);

    const std::vector<std::size_t> kept_train =
        retained_rows(subset_annotations, train_rows);
    const std::vector<std::size_t> kept_val =
        retained_rows(subset_annotations, val_rows);
    if (kept_train.empty())
      throw ContractError("sweep: fraction " + fmt(fraction) +
                          " leaves zero training rows");

    const SplitView train_view =
        make_view(data, subset_labels, subset_annotations, kept_train);
    // a validation split can lose every row to the drop rule; tuning is
    // then skipped and the configured gamma stands
    std::optional<SplitView> val_view;
    if (!kept_val.empty())
      val_view = make_view(data, subset_labels, subset_annotations, kept_val);

    std::vector<std::size_t> all_rows = kept_train;
    all_rows.insert(all_rows.end(), kept_val.begin(), kept_val.end());
    std::sort(all_rows.begin(), all_rows.end());
    const SplitView full_view =
        make_view(data, subset_labels, subset_annotations, all_rows);

    for (const std::string& learner : config.learners) {
      double gamma = learner == "eszsl" ? config.eszsl_gamma
                     : learner == "ranknet" ? config.ranknet.gamma
                                            : 0.0;
      if (learner_uses_gamma(learner) && !config.gamma_grid.empty() &&
          val_view.has_value()) {
        const TuneResult tuned =
            tune_gamma(train_view, *val_view, config.gamma_grid, learner, config);
        gamma = tuned.gamma;
        for (const auto& [g, v] : tuned.table) {
          TuneRow row;
          row.learner = learner;
          row.fraction = fraction;
          row.seed = seed;
          row.gamma = g;
          row.val_miap = v;
          row.chosen = g == gamma;
          result.tune_rows.push_back(row);
        }
      }
      const TrainedAny model = train_learner(
          learner, full_view, gamma, config, derive_seed(seed, learner, fi));
      const Matrix scores = model.score(*data.test_features, test_labels);

      SweepRow row;
      row.learner = learner;
      row.fraction = fraction;
      row.l_seen = subset.size();
      row.seed = seed;
      row.chosen_gamma = learner_uses_gamma(learner) ? gamma : 0.0;
      row.report = evaluate_scores(scores, test_truth, config.k);
      result.rows.push_back(row);
    }
  }
  return result;
}

void sort_sweep(SweepResult& result) {
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.learner != b.learner) return a.learner < b.learner;
                     if (a.fraction != b.fraction) return a.fraction > b.fraction;
                     return a.seed < b.seed;
                   });
  std::stable_sort(result.tune_rows.begin(), result.tune_rows.end(),
                   [](const TuneRow& a, const TuneRow& b) {
                     if (a.learner != b.learner) return a.learner < b.learner;
                     if (a.fraction != b.fraction) return a.fraction > b.fraction;
                     if (a.seed != b.seed) return a.seed < b.seed;
                     return a.gamma < b.gamma;
                   });
}

}  // namespace

SweepResult run_seen_fraction_sweep(const Dataset& data,
                                    const SweepConfig& config) {
  if (config.seeds.empty()) throw ContractError("sweep: need at least one seed");
  SweepResult result;
  for (std::uint64_t seed : config.seeds) {
    SweepResult one = sweep_one_seed(data, config, seed);
    result.rows.insert(result.rows.end(), one.rows.begin(), one.rows.end());
    result.tune_rows.insert(result.tune_rows.end(), one.tune_rows.begin(),
                            one.tune_rows.end());
  }
  sort_sweep(result);
  return result;
}

SweepResult run_seen_fraction_sweep_synth(const SynthConfig& synth,
                                          const SweepConfig& config) {
  if (config.seeds.empty()) throw ContractError("sweep: need at least one seed");
  // per-seed worlds are independent; indexed slots keep assembly order fixed
  std::vector<SweepResult> per_seed(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t i) {
    const Dataset data = to_dataset(generate_world(synth, config.seeds[i]));
    per_seed[i] = sweep_one_seed(data, config, config.seeds[i]);
  });
  SweepResult result;
  for (SweepResult& one : per_seed) {
    result.rows.insert(result.rows.end(), one.rows.begin(), one.rows.end());
    result.tune_rows.insert(result.tune_rows.end(), one.tune_rows.begin(),
                            one.tune_rows.end());
  }
  sort_sweep(result);
  return result;
}

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "learner,fraction,l_seen,seed,chosen_gamma,miap,precision_at_k,"
         "recall_at_k,f1_at_k,hamming,k\n";
  for (const SweepRow& row : result.rows) {
    out << row.learner << ',' << fmt(row.fraction) << ',' << row.l_seen << ','
        << row.seed << ',' << fmt(row.chosen_gamma) << ',' << fmt(row.report.miap)
        << ',' << fmt(row.report.precision_at_k) << ','
        << fmt(row.report.recall_at_k) << ',' << fmt(row.report.f1_at_k) << ','
        << fmt(row.report.hamming) << ',' << row.report.k << '\n';
  }
}

void write_tune_csv(const fs::path& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "learner,fraction,seed,gamma,val_miap,chosen\n";
  for (const TuneRow& row : result.tune_rows) {
    out << row.learner << ',' << fmt(row.fraction) << ',' << row.seed << ','
        << fmt(row.gamma) << ',' << fmt(row.val_miap) << ','
        << (row.chosen ? 1 : 0) << '\n';
  }
}

void write_gap_csv(const fs::path& path, const std::vector<GapRecord>& records) {
  std::ofstream out = open_out(path);
  out << "m,l,trial,seed,train_risk,test_risk,gap,bound,vacuous_flag\n";
  for (const GapRecord& rec : records) {
    out << rec.m << ',' << rec.l << ',' << rec.trial << ',' << rec.seed << ','
        << fmt(rec.train_risk) << ',' << fmt(rec.test_risk) << ',' << fmt(rec.gap)
        << ',' << fmt(rec.bound) << ',' << (rec.vacuous ? 1 : 0) << '\n';
  }
}

}  // namespace zsml

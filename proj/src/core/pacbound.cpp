#include "core/pacbound.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"
#include "core/threads.hpp"

namespace zsml {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

void check_input(const BoundInput& in) {
  if (in.m < 1 || in.l < 1 || in.d < 1 || in.n < 1)
    throw ContractError("bound: m, l, d, n must all be >= 1");
  if (!(in.delta > 0.0) || !(in.delta < 1.0))
    throw ContractError("bound: delta must lie in (0,1)");
}

double sqrt_of(double bracket, const char* who) {
  if (bracket < 0.0)
    throw ContractError(std::string(who) +
                        ": negative bracket (log argument below 1/e scale); "
                        "the bound is undefined at these shapes");
  return std::sqrt(bracket);
}

}  // namespace

double epsilon1(std::size_t m, std::size_t d, double delta) {
  check_input({m, 1, d, 1, delta});
  const double md = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  const double bracket =
      8.0 * std::log(8.0 / delta) + 8.0 * dd * std::log(2.0 * kE * md / dd);
  return sqrt_of(bracket / md, "epsilon1");
}

double epsilon2(std::size_t m, std::size_t l, std::size_t n, double delta) {
  check_input({m, l, 1, n, delta});
  const double md = static_cast<double>(m);
  const double ld = static_cast<double>(l);
  const double nd = static_cast<double>(n);
  const double bracket = 8.0 * std::log(8.0 * md / delta) +
                         8.0 * nd * std::log(2.0 * kE * ld / nd);
  return sqrt_of(bracket / ld, "epsilon2");
}

double theorem_bound(const BoundInput& input) {
  check_input(input);
  return 2.0 * std::max(epsilon1(input.m, input.d, input.delta),
                        epsilon2(input.m, input.l, input.n, input.delta));
}

BoundReport bound_report(const BoundInput& input) {
  check_input(input);
  BoundReport report;
  report.eps1 = epsilon1(input.m, input.d, input.delta);
  report.eps2 = epsilon2(input.m, input.l, input.n, input.delta);
  report.bound = 2.0 * std::max(report.eps1, report.eps2);
  report.vacuous = report.bound > 1.0;
  const double arg1 = 2.0 * kE * static_cast<double>(input.m) /
                      static_cast<double>(input.d);
  const double arg2 = 2.0 * kE * static_cast<double>(input.l) /
                      static_cast<double>(input.n);
  if (arg1 <= 1.0 || arg2 <= 1.0)
    report.warning =
        "growth-function log argument does not exceed 1; the bound is not "
        "meaningful at these shapes";
  return report;
}

RiskEstimate estimate_risk(const BilinearModel& model, const SyntheticWorld& world,
                           std::size_t m_mc, std::size_t l_mc,
                           std::uint64_t seed) {
  if (m_mc < 1 || l_mc < 1)
    throw ContractError("estimate_risk: m_mc and l_mc must be >= 1");
  const Matrix x = sample_data(world.gmm, m_mc, derive_seed(seed, "risk_data"));
  const Matrix lambdas =
      sample_labels(world.label_dist, l_mc, derive_seed(seed, "risk_labels"));
  const AnnotationMatrix y =
      annotate(world, x, lambdas, derive_seed(seed, "risk_flips"));
  const AnnotationMatrix pred = predict_all(model, x, lambdas);

  std::size_t mismatches = 0;
  for (std::size_t m = 0; m < y.rows; ++m)
    for (std::size_t l = 0; l < y.cols; ++l)
      if (pred.at(m, l) != y.at(m, l)) ++mismatches;

  RiskEstimate est;
  est.cells = m_mc * l_mc;
  est.risk = static_cast<double>(mismatches) / static_cast<double>(est.cells);
  est.std_err =
      std::sqrt(est.risk * (1.0 - est.risk) / static_cast<double>(est.cells));
  return est;
}

std::vector<GapRecord> gap_experiment(const GapConfig& config) {
  if (config.trials < 1) throw ContractError("gap_experiment: trials must be >= 1");
  if (config.m_grid.empty() || config.l_grid.empty())
    throw ContractError("gap_experiment: grids must be non-empty");

  const SyntheticWorld world =
      make_world(config.world, derive_seed(config.seed, "gap_world"));

  struct Job {
    std::size_t m, l, trial;
  };
  std::vector<Job> jobs;
  for (std::size_t m : config.m_grid)
    for (std::size_t l : config.l_grid)
      for (std::size_t trial = 0; trial < config.trials; ++trial)
        jobs.push_back({m, l, trial});

  std::vector<GapRecord> records(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t idx) {
    const Job& job = jobs[idx];
    GapRecord rec;
    rec.m = job.m;
    rec.l = job.l;
    rec.trial = job.trial;
    rec.seed = derive_seed(config.seed, "gap_trial", job.m, job.l, job.trial);

    const Matrix x =
        sample_data(world.gmm, job.m, derive_seed(rec.seed, "train_data"));
    const Matrix lambdas = sample_labels(world.label_dist, job.l,
                                         derive_seed(rec.seed, "train_labels"));
    const AnnotationMatrix y =
        annotate(world, x, lambdas, derive_seed(rec.seed, "train_flips"));

    HingeConfig learner = config.learner;
    learner.seed = rec.seed;
    const auto [model, trace] = train_hinge(x, lambdas, y, learner);

    const AnnotationMatrix pred = predict_all(model, x, lambdas);
    std::size_t mismatches = 0;
    for (std::size_t m = 0; m < y.rows; ++m)
      for (std::size_t l = 0; l < y.cols; ++l)
        if (pred.at(m, l) != y.at(m, l)) ++mismatches;
    rec.train_risk = static_cast<double>(mismatches) /
                     static_cast<double>(y.rows * y.cols);

    rec.test_risk =
        estimate_risk(model, world, config.m_mc, config.l_mc, rec.seed).risk;
    rec.gap = rec.test_risk - rec.train_risk;
    rec.bound = theorem_bound(
        {job.m, job.l, config.world.d, config.world.n, config.delta});
    rec.vacuous = rec.bound > 1.0;
    records[idx] = rec;
  });

  std::sort(records.begin(), records.end(), [](const GapRecord& a,
                                               const GapRecord& b) {
    return std::tie(a.m, a.l, a.trial) < std::tie(b.m, b.l, b.trial);
  });
  return records;
}

}  // namespace zsml

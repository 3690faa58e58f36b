#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/learners.hpp"
#include "core/synthgen.hpp"

namespace zsml {

struct BoundInput {
  std::size_t m = 1;
  std::size_t l = 1;
  std::size_t d = 1;
  std::size_t n = 1;
  double delta = 0.05;
};

/// Data-side deviation term sqrt((8 log(8/delta) + 8 d log(2eM/d)) / M).
double epsilon1(std::size_t m, std::size_t d, double delta);

/// Label-side deviation term sqrt((8 log(8M/delta) + 8 n log(2eL/n)) / L).
/// Grows in M through the union bound, vanishes as L -> infinity.
double epsilon2(std::size_t m, std::size_t l, std::size_t n, double delta);

/// High-probability bound on the generalization gap: 2 * max(eps1, eps2).
double theorem_bound(const BoundInput& input);

struct BoundReport {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double bound = 0.0;
  bool vacuous = false;      // bound exceeds 1, i.e. says nothing for 0-1 risk
  std::string warning;       // set when a log argument does not exceed 1
};

BoundReport bound_report(const BoundInput& input);

struct RiskEstimate {
  double risk = 0.0;
  double std_err = 0.0;
  std::size_t cells = 0;
};

/// Monte-Carlo estimate of the expected 0-1 risk: fresh data and labels from
/// the world's distributions, annotations flipped at world.flip_prob, then
/// the model's mismatch fraction.
RiskEstimate estimate_risk(const BilinearModel& model, const SyntheticWorld& world,
                           std::size_t m_mc, std::size_t l_mc,
                           std::uint64_t seed);

struct GapConfig {
  std::vector<std::size_t> m_grid{100, 500, 2000};
  std::vector<std::size_t> l_grid{10, 50, 200};
  std::size_t trials = 20;
  SynthConfig world;        // generative parameters (shapes come from grids)
  HingeConfig learner{80, 0.5, std::nullopt, 0};
  double delta = 0.05;
  std::size_t m_mc = 2000;
  std::size_t l_mc = 2000;
  std::uint64_t seed = 0;
};

struct GapRecord {
  std::size_t m = 0;
  std::size_t l = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double train_risk = 0.0;  // 0-1 mismatch on the flipped training grid
  double test_risk = 0.0;   // Monte-Carlo estimate
  double gap = 0.0;         // test_risk - train_risk
  double bound = 0.0;
  bool vacuous = false;
};

/// For every grid cell and trial: redraw a training set from the fixed world,
/// train the hinge learner, and record empirical risk, Monte-Carlo risk, gap
/// and theoretical bound. Records come back sorted by (m, l, trial).
std::vector<GapRecord> gap_experiment(const GapConfig& config);

}  // namespace zsml

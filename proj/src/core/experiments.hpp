#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/dataio.hpp"
#include "core/learners.hpp"
#include "core/metrics.hpp"
#include "core/pacbound.hpp"
#include "core/synthgen.hpp"

namespace zsml {

struct Fig1cConfig {
  SynthConfig synth;
  HingeConfig hinge;
  BinSpec bins;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  // evaluate against noiseless instead of flipped test annotations
  bool use_noiseless = false;
  // score with the generating matrix instead of training (diagnostic)
  bool use_ground_truth_model = false;
};

/// Hamming losses per distance group: group 0 covers the seen labels, the
/// rest are unseen bins ordered by distance.
struct BinCurve {
  std::vector<std::string> group_kinds;              // "seen" / "unseen"
  std::vector<std::vector<double>> per_seed;         // [seed][group]
  std::vector<std::vector<double>> per_seed_distance;  // [seed][group]
  std::vector<double> mean;                          // [group]
  std::vector<double> mean_distance;                 // [group]
  std::vector<std::uint64_t> seeds;
};

/// Per seed: generate a world, train on the seen labels, predict every test
/// point against every label, and report the Hamming loss per distance group.
BinCurve run_fig1c(const Fig1cConfig& config);

void write_fig1c_csv(const std::filesystem::path& path, const BinCurve& curve);

struct SweepConfig {
  std::vector<double> fractions{1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  std::vector<std::string> learners{"hinge", "ranknet", "eszsl", "conse"};
  std::size_t k = 3;
  double validation_fraction = 0.2;
  std::vector<double> gamma_grid{0.0, 0.001, 0.01, 0.1};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  // smaller seen sets are subsets of larger ones under one seed
  bool nested = true;

  HingeConfig hinge;
  RankNetConfig ranknet;
  ConseConfig conse;
  double eszsl_gamma = 0.1;  // both ridge terms when not tuned
};

/// Desk-scale benchmark world for the seen-fraction study: one label pool,
/// no held-out unseen block, every label evaluated at test time.
SynthConfig default_sweep_world();

struct SweepRow {
  std::string learner;
  double fraction = 1.0;
  std::size_t l_seen = 0;
  std::uint64_t seed = 0;
  double chosen_gamma = 0.0;
  MetricReport report;
};

struct TuneRow {
  std::string learner;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double val_miap = 0.0;
  bool chosen = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<TuneRow> tune_rows;
};

/// A train/validation slice: features, the seen label codes, and the
/// annotation columns restricted to those labels.
struct SplitView {
  Matrix features;
  Matrix labels;
  AnnotationMatrix annotations;
};

struct TuneResult {
  double gamma = 0.0;
  std::vector<std::pair<double, double>> table;  // (gamma, validation MiAP)
};

/// Trains one model per grid value on the train split and picks the gamma
/// with the best validation MiAP (ties -> smallest gamma). Supported
/// learners: ranknet, eszsl. A grid value whose training diverges is
/// recorded with MiAP -1 and never chosen; every value diverging is an
/// error.
TuneResult tune_gamma(const SplitView& train, const SplitView& validation,
                      const std::vector<double>& gamma_grid,
                      const std::string& learner, const SweepConfig& config);

/// Seen-fraction study on an already-loaded dataset (needs a test block).
/// Per (fraction, seed): choose seen labels, drop training rows with no
/// relevant seen label, tune gamma on a validation split, retrain on
/// train+validation, evaluate on the test block over every label.
SweepResult run_seen_fraction_sweep(const Dataset& data, const SweepConfig& config);

/// Same study on per-seed synthetic worlds.
SweepResult run_seen_fraction_sweep_synth(const SynthConfig& synth,
                                          const SweepConfig& config);

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
void write_tune_csv(const std::filesystem::path& path, const SweepResult& result);

/// Seen-label index subsets per fraction (descending fraction order),
/// nested when requested.
std::vector<std::vector<std::size_t>> seen_subsets(std::size_t l_total,
                                                   const std::vector<double>& fractions,
                                                   bool nested,
                                                   std::uint64_t seed);

void write_gap_csv(const std::filesystem::path& path,
                   const std::vector<GapRecord>& records);

}  // namespace zsml

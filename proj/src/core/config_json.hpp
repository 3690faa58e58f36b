#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "core/experiments.hpp"
#include "core/pacbound.hpp"

namespace zsml {

// JSON round trips for every user-facing config. Parsers start from the
// struct defaults, accept partial documents, and reject unknown keys so
// config typos fail loudly.

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HingeConfig& config);
HingeConfig hinge_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RankNetConfig& config);
RankNetConfig ranknet_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConseConfig& config);
ConseConfig conse_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BinSpec& spec);
BinSpec bin_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Fig1cConfig& config);
Fig1cConfig fig1c_config_from_json(const nlohmann::json& j);

/// Sweep driver document: the SweepConfig fields plus a data source, either
/// {"dataset": "<dir>"} or {"synth": {...}} (defaults to the synthetic
/// sweep world).
struct SweepRunConfig {
  SweepConfig sweep;
  std::optional<std::string> dataset_dir;
  SynthConfig synth = default_sweep_world();
};

nlohmann::json to_json(const SweepRunConfig& config);
SweepRunConfig sweep_run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GapConfig& config);
GapConfig gap_config_from_json(const nlohmann::json& j);

struct EvalOptions {
  std::vector<std::string> metrics{"hamming", "miap", "topk"};
  std::size_t k = 3;
  std::string labels = "all";  // seen | unseen | all
  std::size_t bins = 0;        // 0 = no distance-bin curve
};

nlohmann::json to_json(const EvalOptions& options);
EvalOptions eval_options_from_json(const nlohmann::json& j);

/// Parses then re-serializes a config of the given kind so every default is
/// materialized. Kinds: synth, hinge, ranknet, eszsl, conse, fig1c, sweep,
/// gap, eval.
nlohmann::json resolve_config(const std::string& kind, const nlohmann::json& j);

struct EszslConfig {
  double gamma_label = 0.1;
  double gamma_data = 0.1;
};

nlohmann::json to_json(const EszslConfig& config);
EszslConfig eszsl_config_from_json(const nlohmann::json& j);

}  // namespace zsml

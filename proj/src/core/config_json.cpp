#include "core/config_json.hpp"

#include <algorithm>

namespace zsml {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* kind) {
  if (!j.is_object())
    throw DataError(std::string(kind) + " config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end())
      throw DataError("unknown key '" + key + "' in " + kind + " config");
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out, const char* kind) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError("bad value for '" + std::string(key) + "' in " + kind +
                    " config: " + e.what());
  }
}

void get_batch(const json& j, std::optional<std::size_t>& batch,
               const char* kind) {
  if (!j.contains("batch")) return;
  const json& b = j.at("batch");
  if (b.is_string() && b.get<std::string>() == "full") {
    batch.reset();
    return;
  }
  if (b.is_number_unsigned() || b.is_number_integer()) {
    const long long v = b.get<long long>();
    if (v < 1) throw DataError(std::string(kind) + ": batch must be >= 1");
    batch = static_cast<std::size_t>(v);
    return;
  }
  throw DataError(std::string(kind) + ": batch must be \"full\" or an integer");
}

json batch_to_json(const std::optional<std::size_t>& batch) {
  if (batch) return *batch;
  return "full";
}

}  // namespace

json to_json(const SynthConfig& config) {
  json j;
  j["d"] = config.d;
  j["n"] = config.n;
  j["k"] = config.k;
  j["dirichlet_alpha"] = config.dirichlet_alpha;
  j["m_train"] = config.m_train;
  j["m_test"] = config.m_test;
  j["l_seen"] = config.l_seen;
  j["l_unseen"] = config.l_unseen;
  j["flip_prob"] = config.flip_prob;
  j["seed"] = config.seed;
  if (config.label_mean) j["label_mean"] = config.label_mean->entries();
  if (config.label_cov) {
    json rows = json::array();
    for (std::size_t i = 0; i < config.label_cov->rows(); ++i) {
      json row = json::array();
      for (std::size_t jj = 0; jj < config.label_cov->cols(); ++jj)
        row.push_back((*config.label_cov)(i, jj));
      rows.push_back(row);
    }
    j["label_cov"] = rows;
  }
  return j;
}

SynthConfig synth_config_from_json(const json& j) {
  check_keys(j,
             {"d", "n", "k", "dirichlet_alpha", "m_train", "m_test", "l_seen",
              "l_unseen", "flip_prob", "seed", "label_mean", "label_cov"},
             "synth");
  SynthConfig config;
  get_if(j, "d", config.d, "synth");
  get_if(j, "n", config.n, "synth");
  get_if(j, "k", config.k, "synth");
  get_if(j, "dirichlet_alpha", config.dirichlet_alpha, "synth");
  get_if(j, "m_train", config.m_train, "synth");
  get_if(j, "m_test", config.m_test, "synth");
  get_if(j, "l_seen", config.l_seen, "synth");
  get_if(j, "l_unseen", config.l_unseen, "synth");
  get_if(j, "flip_prob", config.flip_prob, "synth");
  get_if(j, "seed", config.seed, "synth");
  if (j.contains("label_mean")) {
    std::vector<double> mean;
    get_if(j, "label_mean", mean, "synth");
    config.label_mean = Vector(std::move(mean));
  }
  if (j.contains("label_cov")) {
    std::vector<std::vector<double>> rows;
    get_if(j, "label_cov", rows, "synth");
    if (rows.empty() || rows[0].empty())
      throw DataError("synth: label_cov must be a non-empty 2d array");
    Matrix cov(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size())
        throw DataError("synth: ragged label_cov");
      for (std::size_t jj = 0; jj < rows[i].size(); ++jj) cov(i, jj) = rows[i][jj];
    }
    config.label_cov = std::move(cov);
  }
  return config;
}

json to_json(const HingeConfig& config) {
  json j;
  j["epochs"] = config.epochs;
  j["step0"] = config.step0;
  j["batch"] = batch_to_json(config.batch);
  j["seed"] = config.seed;
  return j;
}

HingeConfig hinge_config_from_json(const json& j) {
  check_keys(j, {"epochs", "step0", "batch", "seed"}, "hinge");
  HingeConfig config;
  get_if(j, "epochs", config.epochs, "hinge");
  get_if(j, "step0", config.step0, "hinge");
  get_batch(j, config.batch, "hinge");
  get_if(j, "seed", config.seed, "hinge");
  return config;
}

json to_json(const RankNetConfig& config) {
  json j;
  j["epochs"] = config.epochs;
  j["step0"] = config.step0;
  j["gamma"] = config.gamma;
  j["batch"] = batch_to_json(config.batch);
  j["seed"] = config.seed;
  return j;
}

RankNetConfig ranknet_config_from_json(const json& j) {
  check_keys(j, {"epochs", "step0", "gamma", "batch", "seed"}, "ranknet");
  RankNetConfig config;
  get_if(j, "epochs", config.epochs, "ranknet");
  get_if(j, "step0", config.step0, "ranknet");
  get_if(j, "gamma", config.gamma, "ranknet");
  get_batch(j, config.batch, "ranknet");
  get_if(j, "seed", config.seed, "ranknet");
  return config;
}

json to_json(const ConseConfig& config) {
  json j;
  j["epochs"] = config.epochs;
  j["step0"] = config.step0;
  j["reg"] = config.reg;
  j["t"] = config.t;
  j["seed"] = config.seed;
  return j;
}

ConseConfig conse_config_from_json(const json& j) {
  check_keys(j, {"epochs", "step0", "reg", "t", "seed"}, "conse");
  ConseConfig config;
  get_if(j, "epochs", config.epochs, "conse");
  get_if(j, "step0", config.step0, "conse");
  get_if(j, "reg", config.reg, "conse");
  get_if(j, "t", config.t, "conse");
  get_if(j, "seed", config.seed, "conse");
  return config;
}

json to_json(const EszslConfig& config) {
  json j;
  j["gamma_label"] = config.gamma_label;
  j["gamma_data"] = config.gamma_data;
  return j;
}

EszslConfig eszsl_config_from_json(const json& j) {
  check_keys(j, {"gamma_label", "gamma_data"}, "eszsl");
  EszslConfig config;
  get_if(j, "gamma_label", config.gamma_label, "eszsl");
  get_if(j, "gamma_data", config.gamma_data, "eszsl");
  return config;
}

json to_json(const BinSpec& spec) {
  json j;
  j["bin_size"] = spec.bin_size;
  j["include_seen_group"] = spec.include_seen_group;
  return j;
}

BinSpec bin_spec_from_json(const json& j) {
  check_keys(j, {"bin_size", "include_seen_group"}, "bins");
  BinSpec spec;
  get_if(j, "bin_size", spec.bin_size, "bins");
  get_if(j, "include_seen_group", spec.include_seen_group, "bins");
  return spec;
}

json to_json(const Fig1cConfig& config) {
  json j;
  j["synth"] = to_json(config.synth);
  j["hinge"] = to_json(config.hinge);
  j["bins"] = to_json(config.bins);
  j["seeds"] = config.seeds;
  j["use_noiseless"] = config.use_noiseless;
  j["use_ground_truth_model"] = config.use_ground_truth_model;
  return j;
}

Fig1cConfig fig1c_config_from_json(const json& j) {
  check_keys(j,
             {"synth", "hinge", "bins", "seeds", "use_noiseless",
              "use_ground_truth_model"},
             "fig1c");
  Fig1cConfig config;
  if (j.contains("synth")) config.synth = synth_config_from_json(j.at("synth"));
  if (j.contains("hinge")) config.hinge = hinge_config_from_json(j.at("hinge"));
  if (j.contains("bins")) config.bins = bin_spec_from_json(j.at("bins"));
  get_if(j, "seeds", config.seeds, "fig1c");
  get_if(j, "use_noiseless", config.use_noiseless, "fig1c");
  get_if(j, "use_ground_truth_model", config.use_ground_truth_model, "fig1c");
  return config;
}

json to_json(const SweepRunConfig& config) {
  json j;
  j["fractions"] = config.sweep.fractions;
  j["learners"] = config.sweep.learners;
  j["k"] = config.sweep.k;
  j["validation_fraction"] = config.sweep.validation_fraction;
  j["gamma_grid"] = config.sweep.gamma_grid;
  j["seeds"] = config.sweep.seeds;
  j["nested"] = config.sweep.nested;
  j["hinge"] = to_json(config.sweep.hinge);
  j["ranknet"] = to_json(config.sweep.ranknet);
  j["conse"] = to_json(config.sweep.conse);
  j["eszsl_gamma"] = config.sweep.eszsl_gamma;
  if (config.dataset_dir)
    j["dataset"] = *config.dataset_dir;
  else
    j["synth"] = to_json(config.synth);
  return j;
}

SweepRunConfig sweep_run_config_from_json(const json& j) {
  check_keys(j,
             {"fractions", "learners", "k", "validation_fraction", "gamma_grid",
              "seeds", "nested", "hinge", "ranknet", "conse", "eszsl_gamma",
              "dataset", "synth"},
             "sweep");
  SweepRunConfig config;
  get_if(j, "fractions", config.sweep.fractions, "sweep");
  get_if(j, "learners", config.sweep.learners, "sweep");
  get_if(j, "k", config.sweep.k, "sweep");
  get_if(j, "validation_fraction", config.sweep.validation_fraction, "sweep");
  get_if(j, "gamma_grid", config.sweep.gamma_grid, "sweep");
  get_if(j, "seeds", config.sweep.seeds, "sweep");
  get_if(j, "nested", config.sweep.nested, "sweep");
  if (j.contains("hinge"))
    config.sweep.hinge = hinge_config_from_json(j.at("hinge"));
  if (j.contains("ranknet"))
    config.sweep.ranknet = ranknet_config_from_json(j.at("ranknet"));
  if (j.contains("conse"))
    config.sweep.conse = conse_config_from_json(j.at("conse"));
  get_if(j, "eszsl_gamma", config.sweep.eszsl_gamma, "sweep");
  if (j.contains("dataset") && j.contains("synth"))
    throw DataError("sweep config: give either 'dataset' or 'synth', not both");
  if (j.contains("dataset")) {
    std::string dir;
    get_if(j, "dataset", dir, "sweep");
    config.dataset_dir = dir;
  } else if (j.contains("synth")) {
    config.synth = synth_config_from_json(j.at("synth"));
  }
  return config;
}

json to_json(const GapConfig& config) {
  json j;
  j["m_grid"] = config.m_grid;
  j["l_grid"] = config.l_grid;
  j["trials"] = config.trials;
  j["world"] = to_json(config.world);
  j["learner"] = to_json(config.learner);
  j["delta"] = config.delta;
  j["m_mc"] = config.m_mc;
  j["l_mc"] = config.l_mc;
  j["seed"] = config.seed;
  return j;
}

GapConfig gap_config_from_json(const json& j) {
  check_keys(j,
             {"m_grid", "l_grid", "trials", "world", "learner", "delta", "m_mc",
              "l_mc", "seed"},
             "gap");
  GapConfig config;
  get_if(j, "m_grid", config.m_grid, "gap");
  get_if(j, "l_grid", config.l_grid, "gap");
  get_if(j, "trials", config.trials, "gap");
  if (j.contains("world")) config.world = synth_config_from_json(j.at("world"));
  if (j.contains("learner"))
    config.learner = hinge_config_from_json(j.at("learner"));
  get_if(j, "delta", config.delta, "gap");
  get_if(j, "m_mc", config.m_mc, "gap");
  get_if(j, "l_mc", config.l_mc, "gap");
  get_if(j, "seed", config.seed, "gap");
  return config;
}

json to_json(const EvalOptions& options) {
  json j;
  j["metrics"] = options.metrics;
  j["k"] = options.k;
  j["labels"] = options.labels;
  j["bins"] = options.bins;
  return j;
}

EvalOptions eval_options_from_json(const json& j) {
  check_keys(j, {"metrics", "k", "labels", "bins"}, "eval");
  EvalOptions options;
  get_if(j, "metrics", options.metrics, "eval");
  get_if(j, "k", options.k, "eval");
  get_if(j, "labels", options.labels, "eval");
  get_if(j, "bins", options.bins, "eval");
  if (options.labels != "seen" && options.labels != "unseen" &&
      options.labels != "all")
    throw DataError("eval: labels must be seen, unseen, or all");
  for (const std::string& m : options.metrics)
    if (m != "hamming" && m != "miap" && m != "topk")
      throw DataError("eval: unknown metric '" + m + "'");
  return options;
}

json resolve_config(const std::string& kind, const json& j) {
  if (kind == "synth") return to_json(synth_config_from_json(j));
  if (kind == "hinge") return to_json(hinge_config_from_json(j));
  if (kind == "ranknet") return to_json(ranknet_config_from_json(j));
  if (kind == "eszsl") return to_json(eszsl_config_from_json(j));
  if (kind == "conse") return to_json(conse_config_from_json(j));
  if (kind == "fig1c") return to_json(fig1c_config_from_json(j));
  if (kind == "sweep") return to_json(sweep_run_config_from_json(j));
  if (kind == "gap") return to_json(gap_config_from_json(j));
  if (kind == "eval") return to_json(eval_options_from_json(j));
  throw ContractError("resolve_config: unknown kind '" + kind + "'");
}

}  // namespace zsml

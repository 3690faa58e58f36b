// Command-line front end; everything goes through the shared-library C API.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zsml.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

using Clock = std::chrono::steady_clock;

int exit_code_for(zsml_status status) {
  switch (status) {
    case ZSML_OK:
      return 0;
    case ZSML_ERROR_USAGE:
      return 1;
    default:
      return 2;
  }
}

int report_failure(zsml_status status) {
  std::cerr << "error: " << zsml_last_error() << '\n';
  return exit_code_for(status);
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config file " << path << '\n';
    std::exit(2);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    std::cerr << "error: invalid JSON in config file " << path << '\n';
    std::exit(2);
  }
  return j;
}

// flags > config file > defaults; resolution happens in the library
json resolve_or_die(const std::string& kind, const json& merged) {
  char* resolved = nullptr;
  const zsml_status status =
      zsml_config_resolve(kind.c_str(), merged.dump().c_str(), &resolved);
  if (status != ZSML_OK) std::exit(report_failure(status));
  json out = json::parse(resolved);
  zsml_string_free(resolved);
  return out;
}

// Every run that produces files records one summary next to them: the
// resolved config, the seeds, the outputs, and wall-clock timings.
void write_run_summary(const fs::path& where, const std::string& subcommand,
                       const json& resolved_config,
                       const std::vector<std::uint64_t>& seeds,
                       const std::vector<std::string>& outputs,
                       double total_seconds) {
  json summary;
  summary["schema_version"] = "1";
  summary["subcommand"] = subcommand;
  summary["resolved_config"] = resolved_config;
  summary["seeds"] = seeds;
  summary["outputs"] = outputs;
  summary["timings"] = {{"total_seconds", total_seconds}};
  std::ofstream out(where);
  if (!out) {
    std::cerr << "error: cannot write " << where << '\n';
    std::exit(2);
  }
  out << summary.dump(2) << '\n';
}

fs::path summary_path_for_dir(const fs::path& dir) {
  return dir / "run_summary.json";
}

fs::path summary_path_for_file(const fs::path& file) {
  fs::path p = file;
  p.replace_extension("");
  p += ".run_summary.json";
  return p;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string tok =
        text.substr(begin, comma == std::string::npos ? std::string::npos
                                                      : comma - begin);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-shot multi-label learning toolkit"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic benchmark dataset");
  std::string gen_config_path, gen_out;
  std::uint64_t gen_seed = 0;
  std::optional<std::size_t> gen_d, gen_n, gen_k, gen_m_train, gen_m_test,
      gen_l_seen, gen_l_unseen;
  std::optional<double> gen_alpha, gen_flip;
  gen->add_option("--config", gen_config_path, "synth config JSON file");
  gen->add_option("--out", gen_out, "output dataset directory")->required();
  gen->add_option("--seed", gen_seed, "master seed")->required();
  gen->add_option("--d", gen_d, "data dimension");
  gen->add_option("--n", gen_n, "label dimension");
  gen->add_option("--k", gen_k, "mixture components");
  gen->add_option("--dirichlet-alpha", gen_alpha, "Dirichlet concentration");
  gen->add_option("--m-train", gen_m_train, "training points");
  gen->add_option("--m-test", gen_m_test, "test points");
  gen->add_option("--l-seen", gen_l_seen, "seen labels");
  gen->add_option("--l-unseen", gen_l_unseen, "unseen labels");
  gen->add_option("--flip-prob", gen_flip, "annotation flip probability");

  // ---- train --------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train a labeling model");
  std::string train_data, train_out, train_learner, train_config_path;
  std::uint64_t train_seed = 0;
  std::optional<std::size_t> train_epochs, train_batch, train_t;
  std::optional<double> train_step0, train_gamma, train_reg, train_gamma_label,
      train_gamma_data;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--learner", train_learner, "hinge|ranknet|eszsl|conse")
      ->required()
      ->check(CLI::IsMember({"hinge", "ranknet", "eszsl", "conse"}));
  train->add_option("--out", train_out, "model CSV path")->required();
  train->add_option("--config", train_config_path, "learner config JSON file");
  train->add_option("--seed", train_seed, "seed (mini-batch shuffling)");
  train->add_option("--epochs", train_epochs, "training epochs");
  train->add_option("--step0", train_step0, "initial step size");
  train->add_option("--batch", train_batch, "mini-batch rows (default: full)");
  train->add_option("--gamma", train_gamma, "ranknet regularizer weight");
  train->add_option("--reg", train_reg, "conse classifier regularizer");
  train->add_option("--t", train_t, "conse combination size");
  train->add_option("--gamma-label", train_gamma_label, "eszsl label ridge");
  train->add_option("--gamma-data", train_gamma_data, "eszsl data ridge");

  // ---- eval ---------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string eval_model, eval_data, eval_metrics = "hamming,miap,topk";
  std::string eval_labels = "all", eval_out;
  std::size_t eval_k = 3, eval_bins = 0;
  eval->add_option("--model", eval_model, "model CSV path")->required();
  eval->add_option("--data", eval_data, "dataset directory")->required();
  eval->add_option("--metrics", eval_metrics, "comma list of hamming,miap,topk");
  eval->add_option("--k", eval_k, "top-k cutoff");
  eval->add_option("--labels", eval_labels, "seen|unseen|all")
      ->check(CLI::IsMember({"seen", "unseen", "all"}));
  eval->add_option("--bins", eval_bins, "distance-bin size (0 = off)");
  eval->add_option("--out", eval_out, "report JSON path (default: stdout)");

  // ---- fig1c --------------------------------------------------------------
  auto* fig1c = app.add_subcommand(
      "fig1c", "distance-binned unseen-label study (Hamming loss curve)");
  std::string fig1c_config_path, fig1c_out, fig1c_seeds;
  bool fig1c_noiseless = false, fig1c_ground_truth = false;
  fig1c->add_option("--config", fig1c_config_path, "fig1c config JSON file");
  fig1c->add_option("--out", fig1c_out, "output directory")->required();
  fig1c->add_option("--seeds", fig1c_seeds, "comma list of seeds");
  fig1c->add_flag("--noiseless", fig1c_noiseless,
                  "evaluate against noiseless annotations");
  fig1c->add_flag("--ground-truth-model", fig1c_ground_truth,
                  "score with the generating matrix (diagnostic)");

  // ---- sweep --------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "seen-fraction sweep with validation-tuned gamma");
  std::string sweep_config_path, sweep_out, sweep_data, sweep_seeds,
      sweep_learners;
  sweep->add_option("--config", sweep_config_path, "sweep config JSON file");
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_option("--data", sweep_data, "dataset directory (overrides synth)");
  sweep->add_option("--seeds", sweep_seeds, "comma list of seeds");
  sweep->add_option("--learners", sweep_learners,
                    "comma list of hinge,ranknet,eszsl,conse");

  // ---- bound --------------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "evaluate the generalization bound");
  std::uint64_t bound_m = 0, bound_l = 0, bound_d = 0, bound_n = 0;
  double bound_delta = 0.05;
  std::string bound_out;
  bound->add_option("--m", bound_m, "training points")->required();
  bound->add_option("--l", bound_l, "seen labels")->required();
  bound->add_option("--d", bound_d, "data dimension")->required();
  bound->add_option("--n", bound_n, "label dimension")->required();
  bound->add_option("--delta", bound_delta, "failure probability");
  bound->add_option("--out", bound_out, "also write the report JSON here");

  // ---- gap ----------------------------------------------------------------
  auto* gap = app.add_subcommand(
      "gap", "measure generalization gaps against the bound over an (m,l) grid");
  std::string gap_config_path, gap_out, gap_m_grid, gap_l_grid;
  std::uint64_t gap_seed = 0;
  std::optional<std::size_t> gap_trials;
  std::optional<double> gap_delta;
  gap->add_option("--config", gap_config_path, "gap config JSON file");
  gap->add_option("--out", gap_out, "output directory")->required();
  gap->add_option("--seed", gap_seed, "master seed")->required();
  gap->add_option("--trials", gap_trials, "trials per grid cell");
  gap->add_option("--m-grid", gap_m_grid, "comma list of training sizes");
  gap->add_option("--l-grid", gap_l_grid, "comma list of label counts");
  gap->add_option("--delta", gap_delta, "failure probability");

  // ---- ingest -------------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "validate external CSVs into a dataset directory");
  std::string ing_features, ing_labels, ing_annotations, ing_out;
  ingest->add_option("--features", ing_features, "features CSV")->required();
  ingest->add_option("--labels", ing_labels, "label codes CSV")->required();
  ingest->add_option("--annotations", ing_annotations, "annotations CSV")
      ->required();
  ingest->add_option("--out", ing_out, "output dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  const auto start = Clock::now();

  if (gen->parsed()) {
    json merged = load_config_file(gen_config_path);
    if (gen_d) merged["d"] = *gen_d;
    if (gen_n) merged["n"] = *gen_n;
    if (gen_k) merged["k"] = *gen_k;
    if (gen_alpha) merged["dirichlet_alpha"] = *gen_alpha;
    if (gen_m_train) merged["m_train"] = *gen_m_train;
    if (gen_m_test) merged["m_test"] = *gen_m_test;
    if (gen_l_seen) merged["l_seen"] = *gen_l_seen;
    if (gen_l_unseen) merged["l_unseen"] = *gen_l_unseen;
    if (gen_flip) merged["flip_prob"] = *gen_flip;
    merged["seed"] = gen_seed;
    const json resolved = resolve_or_die("synth", merged);
    const zsml_status status =
        zsml_generate(resolved.dump().c_str(), gen_seed, gen_out.c_str());
    if (status != ZSML_OK) return report_failure(status);
    write_run_summary(summary_path_for_dir(gen_out), "gen", resolved, {gen_seed},
                      {gen_out}, seconds_since(start));
    std::cout << "dataset written to " << gen_out << '\n';
    return 0;
  }

  if (train->parsed()) {
    json merged = load_config_file(train_config_path);
    if (train_epochs) merged["epochs"] = *train_epochs;
    if (train_step0) merged["step0"] = *train_step0;
    if (train_batch) merged["batch"] = *train_batch;
    if (train_gamma) merged["gamma"] = *train_gamma;
    if (train_reg) merged["reg"] = *train_reg;
    if (train_t) merged["t"] = *train_t;
    if (train_gamma_label) merged["gamma_label"] = *train_gamma_label;
    if (train_gamma_data) merged["gamma_data"] = *train_gamma_data;
    if (train_learner == "hinge" || train_learner == "ranknet" ||
        train_learner == "conse")
      merged["seed"] = train_seed;
    const json resolved = resolve_or_die(train_learner, merged);

    zsml_dataset* dataset = nullptr;
    zsml_status status = zsml_dataset_open(train_data.c_str(), &dataset);
    if (status != ZSML_OK) return report_failure(status);

    zsml_model* model = nullptr;
    char* trace = nullptr;
    status = zsml_train(dataset, train_learner.c_str(), resolved.dump().c_str(),
                        &model, &trace);
    zsml_dataset_close(dataset);
    if (status != ZSML_OK) return report_failure(status);

    status = zsml_model_save(model, train_out.c_str());
    zsml_model_close(model);
    if (status != ZSML_OK) {
      zsml_string_free(trace);
      return report_failure(status);
    }

    std::vector<std::string> outputs{train_out};
    const fs::path sidecar = fs::path(train_out).replace_extension(".json");
    outputs.push_back(sidecar.string());
    if (train_learner == "hinge" || train_learner == "ranknet") {
      fs::path trace_path = fs::path(train_out);
      trace_path.replace_extension("");
      trace_path += "_trace.csv";
      std::ofstream out(trace_path);
      out << trace;
      outputs.push_back(trace_path.string());
    }
    zsml_string_free(trace);

    write_run_summary(summary_path_for_file(train_out), "train",
                      {{"learner", train_learner}, {"config", resolved}},
                      {train_seed}, outputs, seconds_since(start));
    std::cout << "model written to " << train_out << '\n';
    return 0;
  }

  if (eval->parsed()) {
    json options;
    options["metrics"] = json::array();
    std::size_t begin = 0;
    while (begin <= eval_metrics.size()) {
      const std::size_t comma = eval_metrics.find(',', begin);
      const std::string tok = eval_metrics.substr(
          begin, comma == std::string::npos ? std::string::npos : comma - begin);
      if (!tok.empty()) options["metrics"].push_back(tok);
      if (comma == std::string::npos) break;
      begin = comma + 1;
    }
    options["k"] = eval_k;
    options["labels"] = eval_labels;
    options["bins"] = eval_bins;
    const json resolved = resolve_or_die("eval", options);

    zsml_dataset* dataset = nullptr;
    zsml_status status = zsml_dataset_open(eval_data.c_str(), &dataset);
    if (status != ZSML_OK) return report_failure(status);
    zsml_model* model = nullptr;
    status = zsml_model_load(eval_model.c_str(), &model);
    if (status != ZSML_OK) {
      zsml_dataset_close(dataset);
      return report_failure(status);
    }
    char* report = nullptr;
    status = zsml_evaluate(model, dataset, resolved.dump().c_str(), &report);
    zsml_model_close(model);
    zsml_dataset_close(dataset);
    if (status != ZSML_OK) return report_failure(status);

    if (eval_out.empty()) {
      std::cout << report << '\n';
    } else {
      std::ofstream out(eval_out);
      out << report << '\n';
      write_run_summary(summary_path_for_file(eval_out), "eval",
                        {{"model", eval_model},
                         {"data", eval_data},
                         {"options", resolved}},
                        {}, {eval_out}, seconds_since(start));
      std::cout << "report written to " << eval_out << '\n';
    }
    zsml_string_free(report);
    return 0;
  }

  if (fig1c->parsed()) {
    json merged = load_config_file(fig1c_config_path);
    if (!fig1c_seeds.empty()) merged["seeds"] = parse_seed_list(fig1c_seeds);
    if (fig1c_noiseless) merged["use_noiseless"] = true;
    if (fig1c_ground_truth) merged["use_ground_truth_model"] = true;
    const json resolved = resolve_or_die("fig1c", merged);
    const zsml_status status =
        zsml_run_fig1c(resolved.dump().c_str(), fig1c_out.c_str());
    if (status != ZSML_OK) return report_failure(status);
    write_run_summary(summary_path_for_dir(fig1c_out), "fig1c", resolved,
                      resolved.at("seeds").get<std::vector<std::uint64_t>>(),
                      {(fs::path(fig1c_out) / "fig1c_curve.csv").string()},
                      seconds_since(start));
    std::cout << "curve written to " << fig1c_out << '\n';
    return 0;
  }

  if (sweep->parsed()) {
    json merged = load_config_file(sweep_config_path);
    if (!sweep_data.empty()) {
      merged["dataset"] = sweep_data;
      merged.erase("synth");
    }
    if (!sweep_seeds.empty()) merged["seeds"] = parse_seed_list(sweep_seeds);
    if (!sweep_learners.empty()) {
      json learners = json::array();
      std::size_t begin = 0;
      while (begin <= sweep_learners.size()) {
        const std::size_t comma = sweep_learners.find(',', begin);
        const std::string tok = sweep_learners.substr(
            begin,
            comma == std::string::npos ? std::string::npos : comma - begin);
        if (!tok.empty()) learners.push_back(tok);
        if (comma == std::string::npos) break;
        begin = comma + 1;
      }
      merged["learners"] = learners;
    }
    const json resolved = resolve_or_die("sweep", merged);
    const zsml_status status =
        zsml_run_sweep(resolved.dump().c_str(), sweep_out.c_str());
    if (status != ZSML_OK) return report_failure(status);
    write_run_summary(
        summary_path_for_dir(sweep_out), "sweep", resolved,
        resolved.at("seeds").get<std::vector<std::uint64_t>>(),
        {(fs::path(sweep_out) / "sweep_results.csv").string(),
         (fs::path(sweep_out) / "tune_table.csv").string()},
        seconds_since(start));
    std::cout << "sweep written to " << sweep_out << '\n';
    return 0;
  }

  if (bound->parsed()) {
    double eps1 = 0, eps2 = 0, value = 0;
    int vacuous = 0;
    const zsml_status status = zsml_bound(bound_m, bound_l, bound_d, bound_n,
                                          bound_delta, &eps1, &eps2, &value,
                                          &vacuous);
    if (status != ZSML_OK) return report_failure(status);
    json report;
    report["m"] = bound_m;
    report["l"] = bound_l;
    report["d"] = bound_d;
    report["n"] = bound_n;
    report["delta"] = bound_delta;
    report["eps1"] = eps1;
    report["eps2"] = eps2;
    report["bound"] = value;
    report["vacuous"] = vacuous != 0;
    std::cout << report.dump(2) << '\n';
    if (!bound_out.empty()) {
      std::ofstream out(bound_out);
      out << report.dump(2) << '\n';
      write_run_summary(summary_path_for_file(bound_out), "bound", report, {},
                        {bound_out}, seconds_since(start));
    }
    return 0;
  }

  if (gap->parsed()) {
    json merged = load_config_file(gap_config_path);
    if (gap_trials) merged["trials"] = *gap_trials;
    if (gap_delta) merged["delta"] = *gap_delta;
    if (!gap_m_grid.empty()) merged["m_grid"] = parse_seed_list(gap_m_grid);
    if (!gap_l_grid.empty()) merged["l_grid"] = parse_seed_list(gap_l_grid);
    merged["seed"] = gap_seed;
    const json resolved = resolve_or_die("gap", merged);
    const zsml_status status =
        zsml_run_gap(resolved.dump().c_str(), gap_out.c_str());
    if (status != ZSML_OK) return report_failure(status);
    write_run_summary(summary_path_for_dir(gap_out), "gap", resolved, {gap_seed},
                      {(fs::path(gap_out) / "gap_records.csv").string()},
                      seconds_since(start));
    std::cout << "gap records written to " << gap_out << '\n';
    return 0;
  }

  if (ingest->parsed()) {
    char* notices = nullptr;
    const zsml_status status =
        zsml_ingest(ing_features.c_str(), ing_labels.c_str(),
                    ing_annotations.c_str(), ing_out.c_str(), &notices);
    if (status != ZSML_OK) return report_failure(status);
    if (notices) {
      const json parsed = json::parse(notices);
      for (const auto& n : parsed) std::cerr << "notice: " << n.get<std::string>() << '\n';
      zsml_string_free(notices);
    }
    write_run_summary(summary_path_for_dir(ing_out), "ingest",
                      {{"features", ing_features},
                       {"labels", ing_labels},
                       {"annotations", ing_annotations}},
                      {}, {ing_out}, seconds_since(start));
    std::cout << "dataset written to " << ing_out << '\n';
    return 0;
  }

  return 1;
}

#include "zsml.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/config_json.hpp"
#include "core/dataio.hpp"
#include "core/experiments.hpp"
#include "core/pacbound.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

zsml_status fail(zsml_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
zsml_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const zsml::ContractError& e) {
    return fail(ZSML_ERROR_DATA, e.what());
  } catch (const zsml::DataError& e) {
    return fail(ZSML_ERROR_DATA, e.what());
  } catch (const zsml::Error& e) {
    return fail(ZSML_ERROR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(ZSML_ERROR_INTERNAL, e.what());
  }
}

zsml_status require(bool ok, const char* message) {
  return ok ? ZSML_OK : fail(ZSML_ERROR_USAGE, message);
}

json parse_json_arg(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw zsml::DataError(std::string("invalid JSON for ") + what);
  return j;
}

std::string trace_to_csv(const zsml::TrainTrace& trace) {
  std::ostringstream out;
  out << "epoch,objective\n";
  char buf[40];
  for (std::size_t i = 0; i < trace.objectives.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", trace.objectives[i]);
    out << (i + 1) << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace

struct zsml_dataset {
  zsml::Dataset data;
};

struct zsml_model {
  zsml::SavedModel model;
};

extern "C" {

const char* zsml_last_error(void) { return g_last_error.c_str(); }

void zsml_string_free(char* s) { std::free(s); }

zsml_status zsml_config_resolve(const char* kind, const char* config_json,
                                char** resolved_json) {
  if (zsml_status s = require(kind && resolved_json,
                              "zsml_config_resolve: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const json resolved =
        zsml::resolve_config(kind, parse_json_arg(config_json, "config"));
    *resolved_json = dup_string(resolved.dump(2));
    return ZSML_OK;
  });
}

zsml_status zsml_generate(const char* config_json, uint64_t seed,
                          const char* out_dir) {
  if (zsml_status s = require(out_dir, "zsml_generate: null out_dir");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::SynthConfig config =
        zsml::synth_config_from_json(parse_json_arg(config_json, "synth config"));
    const zsml::GeneratedWorld world = zsml::generate_world(config, seed);
    zsml::write_world(out_dir, world);
    return ZSML_OK;
  });
}

zsml_status zsml_ingest(const char* features_csv, const char* labels_csv,
                        const char* annotations_csv, const char* out_dir,
                        char** notices_json) {
  if (zsml_status s = require(features_csv && labels_csv && annotations_csv &&
                                  out_dir,
                              "zsml_ingest: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::IngestResult result = zsml::ingest_external(
        features_csv, labels_csv, annotations_csv, out_dir);
    if (notices_json) {
      json notices = json::array();
      for (const std::string& n : result.notices) notices.push_back(n);
      *notices_json = dup_string(notices.dump());
    }
    return ZSML_OK;
  });
}

zsml_status zsml_dataset_open(const char* dir, zsml_dataset** out) {
  if (zsml_status s = require(dir && out, "zsml_dataset_open: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    auto handle = std::make_unique<zsml_dataset>();
    handle->data = zsml::read_world(dir);
    *out = handle.release();
    return ZSML_OK;
  });
}

void zsml_dataset_close(zsml_dataset* dataset) { delete dataset; }

zsml_status zsml_dataset_info(const zsml_dataset* dataset, char** info_json) {
  if (zsml_status s = require(dataset && info_json,
                              "zsml_dataset_info: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::DatasetManifest& m = dataset->data.manifest;
    json j;
    j["d"] = m.d;
    j["n"] = m.n;
    j["m_train"] = m.m_train;
    j["m_test"] = m.m_test;
    j["l_seen"] = m.l_seen;
    j["l_unseen"] = m.l_unseen;
    j["flip_prob"] = m.flip_prob;
    j["seed"] = m.seed;
    j["has_ground_truth_v"] = dataset->data.ground_truth_v.has_value();
    *info_json = dup_string(j.dump(2));
    return ZSML_OK;
  });
}

zsml_status zsml_train(const zsml_dataset* dataset, const char* learner,
                       const char* config_json, zsml_model** out,
                       char** trace_csv) {
  if (zsml_status s =
          require(dataset && learner && out, "zsml_train: null argument");
      s != ZSML_OK)
    return s;
  const std::string name = learner;
  if (name != "hinge" && name != "ranknet" && name != "eszsl" && name != "conse")
    return fail(ZSML_ERROR_USAGE, "zsml_train: unknown learner '" + name + "'");

  return guarded([&]() -> zsml_status {
    const zsml::Dataset& data = dataset->data;
    const json config = parse_json_arg(config_json, "learner config");
    auto handle = std::make_unique<zsml_model>();
    zsml::SavedModel& saved = handle->model;
    saved.meta.learner = name;
    std::string trace_text = "epoch,objective\n";

    if (name == "hinge") {
      const zsml::HingeConfig cfg = zsml::hinge_config_from_json(config);
      auto [model, trace] = zsml::train_hinge(
          data.train_features, data.seen_labels, data.train_annotations, cfg);
      saved.model = std::move(model);
      saved.meta.seed = cfg.seed;
      saved.meta.objective = trace.final_objective;
      saved.meta.hyperparameters = {
          {"epochs", static_cast<double>(cfg.epochs)}, {"step0", cfg.step0}};
      if (cfg.batch)
        saved.meta.hyperparameters.emplace_back(
            "batch", static_cast<double>(*cfg.batch));
      trace_text = trace_to_csv(trace);
    } else if (name == "ranknet") {
      const zsml::RankNetConfig cfg = zsml::ranknet_config_from_json(config);
      auto [model, trace] = zsml::train_ranknet(
          data.train_features, data.seen_labels, data.train_annotations, cfg);
      saved.model = std::move(model);
      saved.meta.seed = cfg.seed;
      saved.meta.objective = trace.final_objective;
      saved.meta.hyperparameters = {{"epochs", static_cast<double>(cfg.epochs)},
                                    {"step0", cfg.step0},
                                    {"gamma", cfg.gamma}};
      if (cfg.batch)
        saved.meta.hyperparameters.emplace_back(
            "batch", static_cast<double>(*cfg.batch));
      trace_text = trace_to_csv(trace);
    } else if (name == "eszsl") {
      const zsml::EszslConfig cfg = zsml::eszsl_config_from_json(config);
      zsml::BilinearModel model =
          zsml::train_eszsl(data.train_features, data.seen_labels,
                            data.train_annotations, cfg.gamma_label,
                            cfg.gamma_data);
      saved.meta.objective = zsml::eszsl_objective(
          model, data.train_features, data.seen_labels, data.train_annotations,
          cfg.gamma_label, cfg.gamma_data);
      saved.model = std::move(model);
      saved.meta.hyperparameters = {{"gamma_label", cfg.gamma_label},
                                    {"gamma_data", cfg.gamma_data}};
    } else {
      const zsml::ConseConfig cfg = zsml::conse_config_from_json(config);
      zsml::ConseModel model =
          zsml::train_conse(data.train_features, data.seen_labels,
                            data.train_annotations, cfg.t, cfg);
      saved.model = std::move(model);
      saved.meta.seed = cfg.seed;
      saved.meta.hyperparameters = {{"epochs", static_cast<double>(cfg.epochs)},
                                    {"step0", cfg.step0},
                                    {"reg", cfg.reg},
                                    {"t", static_cast<double>(cfg.t)}};
    }

    if (trace_csv) *trace_csv = dup_string(trace_text);
    *out = handle.release();
    return ZSML_OK;
  });
}

zsml_status zsml_model_save(const zsml_model* model, const char* path) {
  if (zsml_status s = require(model && path, "zsml_model_save: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    zsml::write_model(path, model->model);
    return ZSML_OK;
  });
}

zsml_status zsml_model_load(const char* path, zsml_model** out) {
  if (zsml_status s = require(path && out, "zsml_model_load: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    auto handle = std::make_unique<zsml_model>();
    handle->model = zsml::read_model(path);
    *out = handle.release();
    return ZSML_OK;
  });
}

void zsml_model_close(zsml_model* model) { delete model; }

zsml_status zsml_model_info(const zsml_model* model, char** info_json) {
  if (zsml_status s = require(model && info_json,
                              "zsml_model_info: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    json j;
    j["learner"] = model->model.meta.learner;
    j["n"] = model->model.n();
    j["d"] = model->model.d();
    j["objective"] = model->model.meta.objective;
    j["seed"] = model->model.meta.seed;
    *info_json = dup_string(j.dump(2));
    return ZSML_OK;
  });
}

zsml_status zsml_score(const zsml_model* model, const double* x, size_t d,
                       const double* lambda, size_t n, double* score_out) {
  if (zsml_status s = require(model && x && lambda && score_out && d > 0 && n > 0,
                              "zsml_score: null or empty argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::Vector xv(std::vector<double>(x, x + d));
    const zsml::Vector lv(std::vector<double>(lambda, lambda + n));
    if (model->model.is_bilinear())
      *score_out = zsml::score(model->model.bilinear(), xv, lv);
    else
      *score_out = zsml::conse_score(model->model.conse(), xv, lv);
    return ZSML_OK;
  });
}

zsml_status zsml_evaluate(const zsml_model* model, const zsml_dataset* dataset,
                          const char* options_json, char** report_json) {
  if (zsml_status s = require(model && dataset && report_json,
                              "zsml_evaluate: null argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::EvalOptions options =
        zsml::eval_options_from_json(parse_json_arg(options_json, "eval options"));
    const zsml::Dataset& data = dataset->data;
    if (!data.test_features || !data.test_annotations_seen)
      throw zsml::ContractError("evaluate: dataset has no test block");
    if (model->model.d() != data.manifest.d || model->model.n() != data.manifest.n)
      throw zsml::ContractError(
          "evaluate: model is n=" + std::to_string(model->model.n()) + ", d=" +
          std::to_string(model->model.d()) + " but dataset has n=" +
          std::to_string(data.manifest.n) + ", d=" +
          std::to_string(data.manifest.d));

    zsml::Matrix labels = data.seen_labels;
    zsml::AnnotationMatrix truth = *data.test_annotations_seen;
    if (options.labels == "unseen") {
      if (!data.unseen_labels || !data.test_annotations_unseen)
        throw zsml::ContractError("evaluate: dataset has no unseen labels");
      labels = *data.unseen_labels;
      truth = *data.test_annotations_unseen;
    } else if (options.labels == "all") {
      if (data.unseen_labels && data.test_annotations_unseen) {
        zsml::Matrix all(labels.rows() + data.unseen_labels->rows(),
                         labels.cols());
        for (std::size_t i = 0; i < labels.rows(); ++i)
          for (std::size_t j = 0; j < labels.cols(); ++j) all(i, j) = labels(i, j);
        for (std::size_t i = 0; i < data.unseen_labels->rows(); ++i)
          for (std::size_t j = 0; j < labels.cols(); ++j)
            all(labels.rows() + i, j) = (*data.unseen_labels)(i, j);
        labels = std::move(all);
        zsml::AnnotationMatrix combined(truth.rows,
                                        truth.cols +
                                            data.test_annotations_unseen->cols);
        for (std::size_t m = 0; m < truth.rows; ++m) {
          for (std::size_t l = 0; l < truth.cols; ++l)
            combined.set(m, l, truth.at(m, l));
          for (std::size_t l = 0; l < data.test_annotations_unseen->cols; ++l)
            combined.set(m, truth.cols + l,
                         data.test_annotations_unseen->at(m, l));
        }
        truth = std::move(combined);
      }
    }

    const zsml::Matrix scores =
        zsml::model_score_all(model->model, *data.test_features, labels);

    json report;
    report["labels"] = options.labels;
    report["label_count"] = labels.rows();
    for (const std::string& metric : options.metrics) {
      if (metric == "hamming") {
        report["hamming"] = zsml::hamming_loss(zsml::signs_of(scores), truth);
      } else if (metric == "miap") {
        report["miap"] = zsml::miap(scores, truth);
      } else {
        const zsml::TopkResult t = zsml::topk_prf(scores, truth, options.k);
        report["k"] = options.k;
        report["precision_at_k"] = t.precision;
        report["recall_at_k"] = t.recall;
        report["f1_at_k"] = t.f1;
      }
    }

    if (options.bins > 0) {
      if (options.labels != "all" || !data.unseen_labels)
        throw zsml::ContractError(
            "evaluate: bins need labels=all and an unseen label block");
      zsml::BinSpec spec;
      spec.bin_size = options.bins;
      const zsml::DistanceBins bins =
          zsml::distance_bins(data.seen_labels, *data.unseen_labels, spec);
      const zsml::AnnotationMatrix pred = zsml::signs_of(scores);
      json curve = json::array();
      for (std::size_t gi = 0; gi < bins.groups.size(); ++gi) {
        const auto& group = bins.groups[gi];
        json entry;
        entry["group_index"] = gi;
        entry["group_kind"] = group.seen ? "seen" : "unseen";
        entry["mean_distance"] = group.mean_distance;
        entry["hamming"] = zsml::hamming_loss(select_cols(pred, group.labels),
                                              select_cols(truth, group.labels));
        curve.push_back(entry);
      }
      report["bins"] = curve;
    }

    *report_json = dup_string(report.dump(2));
    return ZSML_OK;
  });
}

zsml_status zsml_bound(uint64_t m, uint64_t l, uint64_t d, uint64_t n,
                       double delta, double* eps1, double* eps2, double* bound,
                       int* vacuous) {
  if (zsml_status s = require(eps1 && eps2 && bound && vacuous,
                              "zsml_bound: null output argument");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::BoundReport report = zsml::bound_report(
        {static_cast<std::size_t>(m), static_cast<std::size_t>(l),
         static_cast<std::size_t>(d), static_cast<std::size_t>(n), delta});
    *eps1 = report.eps1;
    *eps2 = report.eps2;
    *bound = report.bound;
    *vacuous = report.vacuous ? 1 : 0;
    return ZSML_OK;
  });
}

zsml_status zsml_run_fig1c(const char* config_json, const char* out_dir) {
  if (zsml_status s = require(out_dir, "zsml_run_fig1c: null out_dir");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::Fig1cConfig config =
        zsml::fig1c_config_from_json(parse_json_arg(config_json, "fig1c config"));
    const zsml::BinCurve curve = zsml::run_fig1c(config);
    fs::create_directories(out_dir);
    zsml::write_fig1c_csv(fs::path(out_dir) / "fig1c_curve.csv", curve);
    return ZSML_OK;
  });
}

zsml_status zsml_run_sweep(const char* config_json, const char* out_dir) {
  if (zsml_status s = require(out_dir, "zsml_run_sweep: null out_dir");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::SweepRunConfig config = zsml::sweep_run_config_from_json(
        parse_json_arg(config_json, "sweep config"));
    zsml::SweepResult result;
    if (config.dataset_dir) {
      const zsml::Dataset data = zsml::read_world(*config.dataset_dir);
      result = zsml::run_seen_fraction_sweep(data, config.sweep);
    } else {
      result = zsml::run_seen_fraction_sweep_synth(config.synth, config.sweep);
    }
    fs::create_directories(out_dir);
    zsml::write_sweep_csv(fs::path(out_dir) / "sweep_results.csv", result);
    zsml::write_tune_csv(fs::path(out_dir) / "tune_table.csv", result);
    return ZSML_OK;
  });
}

zsml_status zsml_run_gap(const char* config_json, const char* out_dir) {
  if (zsml_status s = require(out_dir, "zsml_run_gap: null out_dir");
      s != ZSML_OK)
    return s;
  return guarded([&]() -> zsml_status {
    const zsml::GapConfig config =
        zsml::gap_config_from_json(parse_json_arg(config_json, "gap config"));
    const std::vector<zsml::GapRecord> records = zsml::gap_experiment(config);
    fs::create_directories(out_dir);
    zsml::write_gap_csv(fs::path(out_dir) / "gap_records.csv", records);
    return ZSML_OK;
  });
}

}  // extern "C"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(ZSML_CLI_PATH) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / "zsml_cli" / tag;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Minimal checker for the subset of JSON Schema the shipped schema uses:
// type, required, properties, enum, items.
bool matches_schema(const json& value, const json& schema);

bool matches_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "boolean") return value.is_boolean();
  return false;
}

bool matches_schema(const json& value, const json& schema) {
  if (schema.contains("type") &&
      !matches_type(value, schema.at("type").get<std::string>()))
    return false;
  if (schema.contains("enum")) {
    bool any = false;
    for (const auto& candidate : schema.at("enum")) any = any || candidate == value;
    if (!any) return false;
  }
  if (schema.contains("required"))
    for (const auto& key : schema.at("required"))
      if (!value.contains(key.get<std::string>())) return false;
  if (schema.contains("properties") && value.is_object())
    for (const auto& [key, sub] : schema.at("properties").items())
      if (value.contains(key) && !matches_schema(value.at(key), sub)) return false;
  if (schema.contains("items") && value.is_array())
    for (const auto& element : value)
      if (!matches_schema(element, schema.at("items"))) return false;
  return true;
}

void check_run_summary(const fs::path& path) {
  const json schema = json::parse(slurp(fs::path(ZSML_SCHEMA_PATH)));
  const json summary = json::parse(slurp(path));
  CHECK(matches_schema(summary, schema));
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("definitely-not-a-subcommand").exit_code == 1);
  CHECK(run_cli("gen --no-such-flag 1").exit_code == 1);
  CHECK(run_cli("train --data x --learner svm --out m.csv").exit_code == 1);
  const CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.output.find("gen") != std::string::npos);
}

TEST_CASE("bound prints the epsilon terms and the vacuous flag") {
  const CliResult r = run_cli("bound --m 500 --l 10 --d 3 --n 2 --delta 0.05");
  CHECK(r.exit_code == 0);
  const json report = json::parse(r.output);
  CHECK(report.at("eps1").get<double>() > 0.0);
  CHECK(report.at("eps2").get<double>() > report.at("eps1").get<double>());
  CHECK(report.at("bound").get<double>() > 1.0);
  CHECK(report.at("vacuous") == true);

  CHECK(run_cli("bound --m 0 --l 10 --d 3 --n 2").exit_code == 2);
}

TEST_CASE("gen/train/eval workflow with run summaries") {
  const fs::path data_dir = temp_dir("workflow_data");
  const CliResult gen = run_cli(
      "gen --out " + data_dir.string() +
      " --seed 5 --d 3 --n 2 --k 3 --m-train 60 --m-test 40 --l-seen 5 "
      "--l-unseen 15 --flip-prob 0.1");
  CHECK(gen.exit_code == 0);
  REQUIRE(fs::exists(data_dir / "manifest.json"));
  check_run_summary(data_dir / "run_summary.json");
  const json summary = json::parse(slurp(data_dir / "run_summary.json"));
  CHECK(summary.at("subcommand") == "gen");
  CHECK(summary.at("resolved_config").at("m_train") == 60);
  CHECK(summary.at("seeds")[0] == 5);

  const fs::path model_path = temp_dir("workflow_model") / "model.csv";
  fs::create_directories(model_path.parent_path());
  const CliResult train = run_cli("train --data " + data_dir.string() +
                                  " --learner hinge --epochs 30 --out " +
                                  model_path.string() + " --seed 1");
  CHECK(train.exit_code == 0);
  CHECK(fs::exists(model_path));
  CHECK(fs::exists(model_path.parent_path() / "model.json"));
  CHECK(fs::exists(model_path.parent_path() / "model_trace.csv"));
  check_run_summary(model_path.parent_path() / "model.run_summary.json");

  const fs::path report_path = model_path.parent_path() / "report.json";
  const CliResult eval = run_cli("eval --model " + model_path.string() +
                                 " --data " + data_dir.string() +
                                 " --labels all --k 3 --out " +
                                 report_path.string());
  CHECK(eval.exit_code == 0);
  const json report = json::parse(slurp(report_path));
  CHECK(report.at("miap").get<double>() >= 0.0);
  check_run_summary(model_path.parent_path() / "report.run_summary.json");

  // evaluating with a mismatched model is a data error that names shapes
  const fs::path other_dir = temp_dir("workflow_other");
  REQUIRE(run_cli("gen --out " + other_dir.string() +
                  " --seed 3 --d 4 --n 3 --k 2 --m-train 30 --m-test 20 "
                  "--l-seen 4 --l-unseen 0 --flip-prob 0")
              .exit_code == 0);
  const CliResult mismatch = run_cli("eval --model " + model_path.string() +
                                     " --data " + other_dir.string());
  CHECK(mismatch.exit_code == 2);
  CHECK(mismatch.output.find("n=") != std::string::npos);

  // missing dataset directory is a data error
  CHECK(run_cli("eval --model " + model_path.string() + " --data /nope")
            .exit_code == 2);
}

TEST_CASE("gen is byte-identical under one seed") {
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  const std::string flags =
      " --seed 11 --d 3 --n 2 --k 3 --m-train 40 --m-test 30 --l-seen 4 "
      "--l-unseen 10 --flip-prob 0.1";
  REQUIRE(run_cli("gen --out " + a.string() + flags).exit_code == 0);
  REQUIRE(run_cli("gen --out " + b.string() + flags).exit_code == 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "run_summary.json") continue;  // carries wall-clock timings
    CHECK(slurp(entry.path()) == slurp(b / name));
  }
}

TEST_CASE("the shipped benchmark config generates the documented shapes") {
  const fs::path out = temp_dir("shipped_config");
  const CliResult r = run_cli("gen --config " +
                              std::string(ZSML_CONFIGS_DIR) +
                              "/paper_synth.json --out " + out.string() +
                              " --seed 7");
  CHECK(r.exit_code == 0);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("m_train") == 500);
  CHECK(manifest.at("m_test") == 1000);
  CHECK(manifest.at("l_seen") == 10);
  CHECK(manifest.at("l_unseen") == 2990);
  CHECK(manifest.at("d") == 3);
  CHECK(manifest.at("n") == 2);
  // 500 rows x 10 columns of training annotations
  const std::string annotations = slurp(out / "train_annotations.csv");
  CHECK(std::count(annotations.begin(), annotations.end(), '\n') == 500);
  const std::string first_row = annotations.substr(0, annotations.find('\n'));
  CHECK(std::count(first_row.begin(), first_row.end(), ',') == 9);
}

TEST_CASE("experiment subcommands write CSVs and summaries") {
  const fs::path dir = temp_dir("experiments");
  fs::create_directories(dir);

  std::ofstream(dir / "fig1c.json")
      << R"({"synth":{"d":3,"n":2,"k":2,"m_train":30,"m_test":20,"l_seen":4,
                      "l_unseen":12,"flip_prob":0.1,"seed":1},
             "hinge":{"epochs":10},"bins":{"bin_size":6},"seeds":[1]})";
  const CliResult fig = run_cli("fig1c --config " +
                                (dir / "fig1c.json").string() + " --out " +
                                (dir / "fig_out").string() + " --seeds 2,3");
  CHECK(fig.exit_code == 0);
  const std::string curve = slurp(dir / "fig_out" / "fig1c_curve.csv");
  CHECK(curve.rfind("group_index,group_kind,mean_distance,seed,hamming", 0) ==
        0);
  check_run_summary(dir / "fig_out" / "run_summary.json");
  const json fig_summary = json::parse(slurp(dir / "fig_out/run_summary.json"));
  CHECK(fig_summary.at("seeds") == json::array({2, 3}));  // flag wins

  std::ofstream(dir / "sweep.json")
      << R"({"synth":{"d":4,"n":2,"k":2,"m_train":50,"m_test":25,"l_seen":6,
                      "l_unseen":0,"flip_prob":0.1,"seed":1},
             "fractions":[1.0,0.5],"learners":["eszsl"],"seeds":[1],
             "gamma_grid":[0.1]})";
  const CliResult sweep = run_cli("sweep --config " +
                                  (dir / "sweep.json").string() + " --out " +
                                  (dir / "sweep_out").string());
  CHECK(sweep.exit_code == 0);
  const std::string rows = slurp(dir / "sweep_out" / "sweep_results.csv");
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);  // header + 2 rows
  check_run_summary(dir / "sweep_out" / "run_summary.json");

  const CliResult gap = run_cli(
      "gap --out " + (dir / "gap_out").string() +
      " --seed 3 --trials 2 --m-grid 30 --l-grid 5 --config /dev/null");
  CHECK(gap.exit_code == 2);  // unreadable config file is a data error

  // sweeping a stored dataset instead of a synthetic world
  const fs::path data_dir = dir / "sweep_data";
  REQUIRE(run_cli("gen --out " + data_dir.string() +
                  " --seed 4 --d 3 --n 2 --k 2 --m-train 60 --m-test 40"
                  " --l-seen 5 --l-unseen 15 --flip-prob 0.1")
              .exit_code == 0);
  std::ofstream(dir / "sweep_data.json")
      << R"({"fractions":[1.0,0.6],"learners":["eszsl"],"seeds":[1],
             "gamma_grid":[0.1]})";
  const CliResult data_sweep = run_cli(
      "sweep --config " + (dir / "sweep_data.json").string() + " --data " +
      data_dir.string() + " --out " + (dir / "sweep_data_out").string());
  CHECK(data_sweep.exit_code == 0);
  const std::string data_rows =
      slurp(dir / "sweep_data_out" / "sweep_results.csv");
  CHECK(std::count(data_rows.begin(), data_rows.end(), '\n') == 3);

  std::ofstream(dir / "gap.json") << R"({"m_mc":100,"l_mc":100,
                                         "learner":{"epochs":8}})";
  const CliResult gap_ok = run_cli("gap --config " +
                                   (dir / "gap.json").string() + " --out " +
                                   (dir / "gap_out").string() +
                                   " --seed 3 --trials 2 --m-grid 30 "
                                   "--l-grid 5");
  CHECK(gap_ok.exit_code == 0);
  const std::string records = slurp(dir / "gap_out" / "gap_records.csv");
  CHECK(records.rfind("m,l,trial,seed,train_risk,test_risk,gap,bound,"
                      "vacuous_flag",
                      0) == 0);
  CHECK(std::count(records.begin(), records.end(), '\n') == 3);
  check_run_summary(dir / "gap_out" / "run_summary.json");
}

TEST_CASE("ingest subcommand maps 0/1 annotations with a notice") {
  const fs::path src = temp_dir("ingest_src");
  fs::create_directories(src);
  std::ofstream(src / "x.csv") << "1,0\n0,1\n1,1\n";
  std::ofstream(src / "l.csv") << "1,0\n0,1\n";
  std::ofstream(src / "y.csv") << "1,0\n0,1\n1,1\n";
  const fs::path out = temp_dir("ingest_out");
  const CliResult r = run_cli("ingest --features " + (src / "x.csv").string() +
                              " --labels " + (src / "l.csv").string() +
                              " --annotations " + (src / "y.csv").string() +
                              " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("notice") != std::string::npos);
  CHECK(fs::exists(out / "manifest.json"));
  check_run_summary(out / "run_summary.json");
}

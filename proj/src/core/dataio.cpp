#include "core/dataio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace zsml {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  return in;
}

// Splits one CSV line; strict: no quoting, one value per comma-separated cell.
std::vector<double> parse_row(const std::string& line, const fs::path& path,
                              std::size_t row) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    const std::string cell = line.substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
      throw DataError("parse error in " + path.string() + " at row " +
                      std::to_string(row + 1) + ": bad cell '" + cell + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::vector<std::vector<double>> read_rows(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // allow a trailing blank line only
      std::string rest;
      if (std::getline(in, rest))
        throw DataError("parse error in " + path.string() + " at row " +
                        std::to_string(index + 1) + ": empty line");
      break;
    }
    rows.push_back(parse_row(line, path, index));
    ++index;
  }
  if (rows.empty()) throw DataError("empty file: " + path.string());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw DataError("ragged CSV in " + path.string() + " at row " +
                      std::to_string(r + 1) + ": " +
                      std::to_string(rows[r].size()) + " cells, expected " +
                      std::to_string(rows[0].size()));
  }
  return rows;
}

std::int8_t to_annotation(double v, const fs::path& path, std::size_t row,
                          std::size_t col) {
  if (v == 1.0) return 1;
  if (v == -1.0) return -1;
  throw DataError("invalid annotation in " + path.string() + " at row " +
                  std::to_string(row + 1) + ", column " + std::to_string(col + 1) +
                  ": " + format_double(v) + " (expected -1 or 1)");
}

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["d"] = m.d;
  j["n"] = m.n;
  j["m_train"] = m.m_train;
  j["m_test"] = m.m_test;
  j["l_seen"] = m.l_seen;
  j["l_unseen"] = m.l_unseen;
  j["flip_prob"] = m.flip_prob;
  j["seed"] = m.seed;
  j["files"] = m.files;
  return j;
}

DatasetManifest manifest_from_json(const json& j, const fs::path& where) {
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<std::string>();
    m.d = j.at("d").get<std::size_t>();
    m.n = j.at("n").get<std::size_t>();
    m.m_train = j.at("m_train").get<std::size_t>();
    m.m_test = j.at("m_test").get<std::size_t>();
    m.l_seen = j.at("l_seen").get<std::size_t>();
    m.l_unseen = j.at("l_unseen").get<std::size_t>();
    m.flip_prob = j.at("flip_prob").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.files = j.at("files").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError("invalid manifest " + where.string() + ": " + e.what());
  }
  if (m.format_version != "1")
    throw DataError("unsupported manifest format_version '" + m.format_version +
                    "' in " + where.string());
  return m;
}

Matrix load_shaped(const fs::path& dir, const DatasetManifest& m,
                   const std::string& logical, std::size_t rows,
                   std::size_t cols) {
  const auto it = m.files.find(logical);
  if (it == m.files.end())
    throw DataError("manifest is missing file entry '" + logical + "'");
  const fs::path path = dir / it->second;
  if (!fs::exists(path))
    throw DataError("file for '" + logical + "' does not exist: " + path.string());
  Matrix out = read_matrix_csv(path);
  if (out.rows() != rows || out.cols() != cols)
    throw DataError("file for '" + logical + "' is " + std::to_string(out.rows()) +
                    "x" + std::to_string(out.cols()) + ", manifest declares " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  return out;
}

AnnotationMatrix load_annotations(const fs::path& dir, const DatasetManifest& m,
                                  const std::string& logical, std::size_t rows,
                                  std::size_t cols) {
  const auto it = m.files.find(logical);
  if (it == m.files.end())
    throw DataError("manifest is missing file entry '" + logical + "'");
  const fs::path path = dir / it->second;
  if (!fs::exists(path))
    throw DataError("file for '" + logical + "' does not exist: " + path.string());
  AnnotationMatrix out = read_annotations_csv(path);
  if (out.rows != rows || out.cols != cols)
    throw DataError("file for '" + logical + "' is " + std::to_string(out.rows) +
                    "x" + std::to_string(out.cols) + ", manifest declares " +
                    std::to_string(rows) + "x" + std::to_string(cols));

  const std::string noiseless_name = logical + "_noiseless";
  if (m.files.count(noiseless_name)) {
    AnnotationMatrix clean =
        read_annotations_csv(dir / m.files.at(noiseless_name));
    if (clean.rows != rows || clean.cols != cols)
      throw DataError("file for '" + noiseless_name + "' shape mismatch");
    out.noiseless = std::move(clean.values);
  }
  return out;
}

void dump_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

json slurp_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  Matrix out(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(i, j) = rows[i][j];
    }
  return out;
}

void write_annotation_values_csv(const fs::path& path,
                                 const std::vector<std::int8_t>& values,
                                 std::size_t rows, std::size_t cols) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out << ',';
      out << static_cast<int>(values[i * cols + j]);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

AnnotationMatrix read_annotations_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  AnnotationMatrix out(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.set(i, j, to_annotation(rows[i][j], path, i, j));
  return out;
}

DatasetManifest write_world(const fs::path& dir, const GeneratedWorld& world) {
  fs::create_directories(dir);
  DatasetManifest m;
  m.d = world.config.d;
  m.n = world.config.n;
  m.m_train = world.config.m_train;
  m.m_test = world.config.m_test;
  m.l_seen = world.config.l_seen;
  m.l_unseen = world.config.l_unseen;
  m.flip_prob = world.config.flip_prob;
  m.seed = world.config.seed;

  auto put_matrix = [&](const std::string& logical, const Matrix& mat) {
    const std::string file = logical + ".csv";
    write_matrix_csv(dir / file, mat);
    m.files[logical] = file;
  };
  auto put_values = [&](const std::string& logical,
                        const std::vector<std::int8_t>& values, std::size_t r,
                        std::size_t c) {
    const std::string file = logical + ".csv";
    write_annotation_values_csv(dir / file, values, r, c);
    m.files[logical] = file;
  };

  put_matrix("train_features", world.train_features);
  put_matrix("test_features", world.test_features);
  put_matrix("seen_labels", world.seen_labels);
  if (world.unseen_labels) put_matrix("unseen_labels", *world.unseen_labels);
  put_matrix("ground_truth_v", world.world.v_star.v);

  const AnnotationMatrix& train = world.train_annotations;
  put_values("train_annotations", train.values, train.rows, train.cols);
  if (train.noiseless)
    put_values("train_annotations_noiseless", *train.noiseless, train.rows,
               train.cols);

  // the combined test block splits into seen / unseen column ranges
  const AnnotationMatrix& test = world.test_annotations;
  const std::size_t ls = world.config.l_seen;
  const std::size_t lu = world.config.l_unseen;
  std::vector<std::size_t> seen_idx(ls);
  for (std::size_t i = 0; i < ls; ++i) seen_idx[i] = i;
  AnnotationMatrix test_seen = select_cols(test, seen_idx);
  put_values("test_annotations_seen", test_seen.values, test_seen.rows,
             test_seen.cols);
  if (test_seen.noiseless)
    put_values("test_annotations_seen_noiseless", *test_seen.noiseless,
               test_seen.rows, test_seen.cols);
  if (lu > 0) {
    std::vector<std::size_t> unseen_idx(lu);
    for (std::size_t i = 0; i < lu; ++i) unseen_idx[i] = ls + i;
    AnnotationMatrix test_unseen = select_cols(test, unseen_idx);
    put_values("test_annotations_unseen", test_unseen.values, test_unseen.rows,
               test_unseen.cols);
    if (test_unseen.noiseless)
      put_values("test_annotations_unseen_noiseless", *test_unseen.noiseless,
                 test_unseen.rows, test_unseen.cols);
  }

  dump_json(dir / "manifest.json", manifest_to_json(m));
  return m;
}

Dataset read_world(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw DataError("no manifest.json in " + dir.string());
  Dataset data;
  data.manifest = manifest_from_json(slurp_json(manifest_path), manifest_path);
  const DatasetManifest& m = data.manifest;

  data.train_features = load_shaped(dir, m, "train_features", m.m_train, m.d);
  data.seen_labels = load_shaped(dir, m, "seen_labels", m.l_seen, m.n);
  data.train_annotations =
      load_annotations(dir, m, "train_annotations", m.m_train, m.l_seen);
  if (m.l_unseen > 0)
    data.unseen_labels = load_shaped(dir, m, "unseen_labels", m.l_unseen, m.n);
  if (m.m_test > 0) {
    data.test_features = load_shaped(dir, m, "test_features", m.m_test, m.d);
    data.test_annotations_seen =
        load_annotations(dir, m, "test_annotations_seen", m.m_test, m.l_seen);
    if (m.l_unseen > 0)
      data.test_annotations_unseen = load_annotations(
          dir, m, "test_annotations_unseen", m.m_test, m.l_unseen);
  }
  if (m.files.count("ground_truth_v"))
    data.ground_truth_v = load_shaped(dir, m, "ground_truth_v", m.n, m.d);
  return data;
}

Dataset to_dataset(const GeneratedWorld& world) {
  Dataset data;
  data.manifest.d = world.config.d;
  data.manifest.n = world.config.n;
  data.manifest.m_train = world.config.m_train;
  data.manifest.m_test = world.config.m_test;
  data.manifest.l_seen = world.config.l_seen;
  data.manifest.l_unseen = world.config.l_unseen;
  data.manifest.flip_prob = world.config.flip_prob;
  data.manifest.seed = world.config.seed;

  data.train_features = world.train_features;
  data.train_annotations = world.train_annotations;
  data.seen_labels = world.seen_labels;
  data.unseen_labels = world.unseen_labels;
  data.test_features = world.test_features;

  const std::size_t ls = world.config.l_seen;
  const std::size_t lu = world.config.l_unseen;
  std::vector<std::size_t> seen_idx(ls);
  for (std::size_t i = 0; i < ls; ++i) seen_idx[i] = i;
  data.test_annotations_seen = select_cols(world.test_annotations, seen_idx);
  if (lu > 0) {
    std::vector<std::size_t> unseen_idx(lu);
    for (std::size_t i = 0; i < lu; ++i) unseen_idx[i] = ls + i;
    data.test_annotations_unseen = select_cols(world.test_annotations, unseen_idx);
  }
  data.ground_truth_v = world.world.v_star.v;
  return data;
}

fs::path model_sidecar_path(const fs::path& csv_path) {
  fs::path sidecar = csv_path;
  sidecar.replace_extension(".json");
  return sidecar;
}

void write_model(const fs::path& csv_path, const SavedModel& model) {
  json sidecar;
  sidecar["format_version"] = "1";
  sidecar["learner"] = model.meta.learner;
  sidecar["seed"] = model.meta.seed;
  sidecar["objective"] = model.meta.objective;
  json hp = json::object();
  for (const auto& [key, value] : model.meta.hyperparameters) hp[key] = value;
  sidecar["hyperparameters"] = hp;
  sidecar["n"] = model.n();
  sidecar["d"] = model.d();

  if (model.is_bilinear()) {
    write_matrix_csv(csv_path, model.bilinear().v);
  } else {
    // conse rows: [w_l (d) | bias | lambda_l (n)]
    const ConseModel& c = model.conse();
    const std::size_t ls = c.weights.rows();
    Matrix stacked(ls, c.d() + 1 + c.n());
    for (std::size_t l = 0; l < ls; ++l) {
      for (std::size_t k = 0; k < c.d(); ++k) stacked(l, k) = c.weights(l, k);
      stacked(l, c.d()) = c.biases[l];
      for (std::size_t j = 0; j < c.n(); ++j)
        stacked(l, c.d() + 1 + j) = c.seen_labels(l, j);
    }
    write_matrix_csv(csv_path, stacked);
    sidecar["l_seen"] = ls;
    sidecar["t"] = c.t;
  }
  dump_json(model_sidecar_path(csv_path), sidecar);
}

SavedModel read_model(const fs::path& csv_path) {
  const fs::path sidecar_path = model_sidecar_path(csv_path);
  const json sidecar = slurp_json(sidecar_path);
  const Matrix raw = read_matrix_csv(csv_path);

  SavedModel model;
  try {
    model.meta.learner = sidecar.at("learner").get<std::string>();
    model.meta.seed = sidecar.at("seed").get<std::uint64_t>();
    model.meta.objective = sidecar.at("objective").get<double>();
    for (const auto& [key, value] : sidecar.at("hyperparameters").items())
      model.meta.hyperparameters.emplace_back(key, value.get<double>());
    const std::size_t n = sidecar.at("n").get<std::size_t>();
    const std::size_t d = sidecar.at("d").get<std::size_t>();

    if (model.meta.learner == "conse") {
      const std::size_t ls = sidecar.at("l_seen").get<std::size_t>();
      const std::size_t t = sidecar.at("t").get<std::size_t>();
      if (raw.rows() != ls || raw.cols() != d + 1 + n)
        throw DataError("model CSV " + csv_path.string() + " is " +
                        std::to_string(raw.rows()) + "x" +
                        std::to_string(raw.cols()) + ", sidecar declares " +
                        std::to_string(ls) + "x" + std::to_string(d + 1 + n));
      ConseModel c;
      c.weights = Matrix(ls, d);
      c.biases = Vector(ls);
      c.seen_labels = Matrix(ls, n);
      for (std::size_t l = 0; l < ls; ++l) {
        for (std::size_t k = 0; k < d; ++k) c.weights(l, k) = raw(l, k);
        c.biases[l] = raw(l, d);
        for (std::size_t j = 0; j < n; ++j) c.seen_labels(l, j) = raw(l, d + 1 + j);
      }
      c.t = t;
      model.model = std::move(c);
    } else {
      if (raw.rows() != n || raw.cols() != d)
        throw DataError("model CSV " + csv_path.string() + " is " +
                        std::to_string(raw.rows()) + "x" +
                        std::to_string(raw.cols()) + ", sidecar declares " +
                        std::to_string(n) + "x" + std::to_string(d));
      model.model = BilinearModel{raw};
    }
  } catch (const json::exception& e) {
    throw DataError("invalid model sidecar " + sidecar_path.string() + ": " +
                    e.what());
  }
  return model;
}

IngestResult ingest_external(const fs::path& features_csv,
                             const fs::path& labels_csv,
                             const fs::path& annotations_csv,
                             const fs::path& out_dir) {
  IngestResult result;
  const Matrix features = read_matrix_csv(features_csv);
  const Matrix labels = read_matrix_csv(labels_csv);
  const auto raw = read_rows(annotations_csv);

  if (raw.size() != features.rows())
    throw DataError("annotations have " + std::to_string(raw.size()) +
                    " rows, features have " + std::to_string(features.rows()));
  if (raw[0].size() != labels.rows())
    throw DataError("annotations have " + std::to_string(raw[0].size()) +
                    " columns, labels file has " + std::to_string(labels.rows()) +
                    " rows");

  // Detect the value convention: {-1,1} directly, or {0,1} mapped 0 -> -1.
  bool saw_zero = false, saw_minus = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < raw[i].size(); ++j) {
      const double v = raw[i][j];
      if (v == 0.0)
        saw_zero = true;
      else if (v == -1.0)
        saw_minus = true;
      else if (v != 1.0)
        throw DataError("invalid annotation in " + annotations_csv.string() +
                        " at row " + std::to_string(i + 1) + ", column " +
                        std::to_string(j + 1) + ": " + format_double(v));
    }
  }
  if (saw_zero && saw_minus)
    throw DataError("annotations mix 0 and -1 values in " +
                    annotations_csv.string() + "; use one convention");

  AnnotationMatrix annotations(raw.size(), raw[0].size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = 0; j < raw[i].size(); ++j)
      annotations.set(i, j, raw[i][j] > 0.0 ? 1 : -1);
  if (saw_zero)
    result.notices.push_back("annotations use the 0/1 convention; 0 mapped to -1");

  fs::create_directories(out_dir);
  DatasetManifest m;
  m.d = features.cols();
  m.n = labels.cols();
  m.m_train = features.rows();
  m.m_test = 0;
  m.l_seen = labels.rows();
  m.l_unseen = 0;
  m.flip_prob = 0.0;
  m.seed = 0;
  write_matrix_csv(out_dir / "train_features.csv", features);
  m.files["train_features"] = "train_features.csv";
  write_matrix_csv(out_dir / "seen_labels.csv", labels);
  m.files["seen_labels"] = "seen_labels.csv";
  write_annotation_values_csv(out_dir / "train_annotations.csv",
                              annotations.values, annotations.rows,
                              annotations.cols);
  m.files["train_annotations"] = "train_annotations.csv";
  dump_json(out_dir / "manifest.json", manifest_to_json(m));
  result.manifest = m;
  return result;
}

}  // namespace zsml

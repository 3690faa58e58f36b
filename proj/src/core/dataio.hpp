#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/learners.hpp"
#include "core/synthgen.hpp"

namespace zsml {

/// On-disk dataset description. `files` maps logical names
/// (train_features, seen_labels, ...) to paths relative to the directory.
struct DatasetManifest {
  std::string format_version = "1";
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t m_train = 0;
  std::size_t m_test = 0;
  std::size_t l_seen = 0;
  std::size_t l_unseen = 0;
  double flip_prob = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> files;
};

/// In-memory dataset; the optional blocks mirror optional files.
struct Dataset {
  DatasetManifest manifest;
  Matrix train_features;
  AnnotationMatrix train_annotations;
  Matrix seen_labels;
  std::optional<Matrix> unseen_labels;
  std::optional<Matrix> test_features;
  std::optional<AnnotationMatrix> test_annotations_seen;
  std::optional<AnnotationMatrix> test_annotations_unseen;
  std::optional<Matrix> ground_truth_v;
};

// CSV primitives: no header, comma separated, floats at 17 significant
// digits (lossless float64 round trip), annotations as -1/1 integers.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_annotation_values_csv(const std::filesystem::path& path,
                                 const std::vector<std::int8_t>& values,
                                 std::size_t rows, std::size_t cols);
AnnotationMatrix read_annotations_csv(const std::filesystem::path& path);

/// Writes manifest.json plus all dataset files for a generated benchmark,
/// including the noiseless annotation counterparts and ground_truth_v.csv.
DatasetManifest write_world(const std::filesystem::path& dir,
                            const GeneratedWorld& world);

Dataset read_world(const std::filesystem::path& dir);

/// In-memory equivalent of write_world + read_world (splits the combined
/// test annotation block at l_seen).
Dataset to_dataset(const GeneratedWorld& world);

void write_model(const std::filesystem::path& csv_path, const SavedModel& model);
SavedModel read_model(const std::filesystem::path& csv_path);

/// Sidecar path for a model file: extension replaced with .json.
std::filesystem::path model_sidecar_path(const std::filesystem::path& csv_path);

struct IngestResult {
  DatasetManifest manifest;
  std::vector<std::string> notices;
};

/// Validates an external (features, labels, annotations) CSV triple and
/// materializes a train-only dataset directory. 0/1 annotation files are
/// accepted and mapped to -1/+1 with a notice.
IngestResult ingest_external(const std::filesystem::path& features_csv,
                             const std::filesystem::path& labels_csv,
                             const std::filesystem::path& annotations_csv,
                             const std::filesystem::path& out_dir);

}  // namespace zsml

#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/annotations.hpp"
#include "core/numkit.hpp"

namespace zsml {

/// Grouping of unseen labels by distance to the seen set.
struct BinSpec {
  std::size_t bin_size = 500;
  bool include_seen_group = true;
};

struct MetricReport {
  double miap = 0.0;
  double precision_at_k = 0.0;
  double recall_at_k = 0.0;
  double f1_at_k = 0.0;
  double hamming = 0.0;
  std::size_t k = 3;
};

/// Mean over rows of (mismatched entries / number of labels).
double hamming_loss(const AnnotationMatrix& pred, const AnnotationMatrix& truth);

/// Per-item average precision of the ranking induced by descending scores,
/// ties broken by ascending label index. Requires at least one +1 in truth.
double average_precision(std::span<const double> scores,
                         std::span<const std::int8_t> truth);

/// Mean average precision over rows with at least one relevant label; rows
/// with none are excluded from the mean. Errors if every row is empty.
double miap(const Matrix& scores, const AnnotationMatrix& truth);

struct TopkResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Top-k precision/recall averaged over rows with at least one relevant
/// label; f1 is the harmonic mean of the averaged precision and recall.
TopkResult topk_prf(const Matrix& scores, const AnnotationMatrix& truth,
                    std::size_t k);

struct DistanceBins {
  struct Group {
    bool seen = false;
    // indices into the combined label ordering: seen labels first
    // (0 .. L_seen-1), then unseen labels (L_seen .. L_seen+L_unseen-1)
    std::vector<std::size_t> labels;
    double mean_distance = 0.0;
  };
  std::vector<Group> groups;
};

/// Sorts unseen labels by ascending min-l2 distance to the seen set (ties by
/// index) and chunks them into bins of bin_size; the last bin keeps the
/// remainder. Group 0 holds the seen labels when include_seen_group is set.
DistanceBins distance_bins(const Matrix& seen_labels, const Matrix& unseen_labels,
                           const BinSpec& spec);

/// Convenience bundle: MiAP, top-k P/R/F1 and Hamming of the sign
/// predictions, all against the same truth.
MetricReport evaluate_scores(const Matrix& scores, const AnnotationMatrix& truth,
                             std::size_t k);

}  // namespace zsml

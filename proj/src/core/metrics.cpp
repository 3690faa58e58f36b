#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/bilinear.hpp"

namespace zsml {

namespace {

// label indices ranked by (descending score, ascending index)
std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

double hamming_loss(const AnnotationMatrix& pred, const AnnotationMatrix& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols)
    throw ContractError("hamming_loss: shape mismatch " +
                        std::to_string(pred.rows) + "x" + std::to_string(pred.cols) +
                        " vs " + std::to_string(truth.rows) + "x" +
                        std::to_string(truth.cols));
  double total = 0.0;
  for (std::size_t m = 0; m < pred.rows; ++m) {
    std::size_t mismatches = 0;
    for (std::size_t l = 0; l < pred.cols; ++l)
      if (pred.at(m, l) != truth.at(m, l)) ++mismatches;
    total += static_cast<double>(mismatches) / static_cast<double>(pred.cols);
  }
  return total / static_cast<double>(pred.rows);
}

double average_precision(std::span<const double> scores,
                         std::span<const std::int8_t> truth) {
  if (scores.size() != truth.size())
    throw ContractError("average_precision: scores/truth length mismatch");
  std::size_t relevant = 0;
  for (std::int8_t t : truth)
    if (t == 1) ++relevant;
  if (relevant == 0)
    throw ContractError("average_precision: no relevant label in truth row");

  const std::vector<std::size_t> order = ranking(scores);
  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (truth[order[rank]] == 1) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return ap / static_cast<double>(relevant);
}

double miap(const Matrix& scores, const AnnotationMatrix& truth) {
  if (scores.rows() != truth.rows || scores.cols() != truth.cols)
    throw ContractError("miap: shape mismatch");
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t m = 0; m < truth.rows; ++m) {
    if (truth.relevant_count(m) == 0) continue;
    std::span<const double> row(scores.row(m), scores.cols());
    std::span<const std::int8_t> t(truth.values.data() + m * truth.cols,
                                   truth.cols);
    sum += average_precision(row, t);
    ++counted;
  }
  if (counted == 0)
    throw ContractError("miap: no row has a relevant label");
  return sum / static_cast<double>(counted);
}

TopkResult topk_prf(const Matrix& scores, const AnnotationMatrix& truth,
                    std::size_t k) {
  if (scores.rows() != truth.rows || scores.cols() != truth.cols)
    throw ContractError("topk_prf: shape mismatch");
  if (k < 1 || k > truth.cols)
    throw ContractError("topk_prf: k=" + std::to_string(k) +
                        " out of range for L=" + std::to_string(truth.cols));
  double psum = 0.0, rsum = 0.0;
  std::size_t counted = 0;
  for (std::size_t m = 0; m < truth.rows; ++m) {
    const std::size_t km = truth.relevant_count(m);
    if (km == 0) continue;
    std::span<const double> row(scores.row(m), scores.cols());
    const std::vector<std::size_t> order = ranking(row);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < k; ++r)
      if (truth.at(m, order[r]) == 1) ++hits;
    psum += static_cast<double>(hits) / static_cast<double>(k);
    rsum += static_cast<double>(hits) / static_cast<double>(km);
    ++counted;
  }
  if (counted == 0)
    throw ContractError("topk_prf: no row has a relevant label");
  TopkResult out;
  out.precision = psum / static_cast<double>(counted);
  out.recall = rsum / static_cast<double>(counted);
  out.f1 = (out.precision + out.recall > 0.0)
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

DistanceBins distance_bins(const Matrix& seen_labels, const Matrix& unseen_labels,
                           const BinSpec& spec) {
  if (spec.bin_size < 1) throw ContractError("distance_bins: bin_size must be >= 1");
  if (seen_labels.cols() != unseen_labels.cols())
    throw ContractError("distance_bins: label dims differ");

  const std::size_t ls = seen_labels.rows();
  const std::size_t lu = unseen_labels.rows();
  std::vector<double> dist(lu);
  for (std::size_t u = 0; u < lu; ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ls; ++s) {
      double sq = 0.0;
      for (std::size_t j = 0; j < seen_labels.cols(); ++j) {
        const double diff = seen_labels(s, j) - unseen_labels(u, j);
        sq += diff * diff;
      }
      best = std::min(best, std::sqrt(sq));
    }
    dist[u] = best;
  }

  std::vector<std::size_t> order(lu);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

  DistanceBins bins;
  if (spec.include_seen_group) {
    DistanceBins::Group g;
    g.seen = true;
    g.labels.resize(ls);
    std::iota(g.labels.begin(), g.labels.end(), 0);
    g.mean_distance = 0.0;
    bins.groups.push_back(std::move(g));
  }
  for (std::size_t start = 0; start < lu; start += spec.bin_size) {
    const std::size_t end = std::min(start + spec.bin_size, lu);
    DistanceBins::Group g;
    g.seen = false;
    double dsum = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      g.labels.push_back(ls + order[i]);
      dsum += dist[order[i]];
    }
    g.mean_distance = dsum / static_cast<double>(end - start);
    bins.groups.push_back(std::move(g));
  }
  return bins;
}

MetricReport evaluate_scores(const Matrix& scores, const AnnotationMatrix& truth,
                             std::size_t k) {
  MetricReport report;
  report.k = k;
  report.miap = miap(scores, truth);
  const TopkResult t = topk_prf(scores, truth, k);
  report.precision_at_k = t.precision;
  report.recall_at_k = t.recall;
  report.f1_at_k = t.f1;
  report.hamming = hamming_loss(signs_of(scores), truth);
  return report;
}

}  // namespace zsml

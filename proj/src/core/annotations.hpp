#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/error.hpp"

namespace zsml {

/// M x L relevance indicators over {-1,+1}. `values` holds the observed
/// (possibly sign-flipped) annotations; `noiseless`, when present, holds the
/// pre-flip ground truth of identical shape.
struct AnnotationMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int8_t> values;
  std::optional<std::vector<std::int8_t>> noiseless;

  AnnotationMatrix() = default;
  AnnotationMatrix(std::size_t m, std::size_t l)
      : rows(m), cols(l), values(m * l, -1) {
    if (m == 0 || l == 0)
      throw ContractError("AnnotationMatrix: rows and cols must be >= 1");
  }

  std::int8_t at(std::size_t m, std::size_t l) const {
    return values[m * cols + l];
  }
  void set(std::size_t m, std::size_t l, std::int8_t v) {
    values[m * cols + l] = v;
  }
  std::int8_t noiseless_at(std::size_t m, std::size_t l) const {
    return (*noiseless)[m * cols + l];
  }

  /// Number of +1 entries in a row.
  std::size_t relevant_count(std::size_t m) const {
    std::size_t k = 0;
    for (std::size_t l = 0; l < cols; ++l)
      if (at(m, l) == 1) ++k;
    return k;
  }

  bool operator==(const AnnotationMatrix&) const = default;
};

inline AnnotationMatrix select_rows(const AnnotationMatrix& a,
                                    const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ContractError("select_rows: empty index set");
  AnnotationMatrix out(idx.size(), a.cols);
  if (a.noiseless) out.noiseless.emplace(idx.size() * a.cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= a.rows) throw ContractError("select_rows: index out of range");
    for (std::size_t l = 0; l < a.cols; ++l) {
      out.set(i, l, a.at(idx[i], l));
      if (a.noiseless) (*out.noiseless)[i * a.cols + l] = a.noiseless_at(idx[i], l);
    }
  }
  return out;
}

inline AnnotationMatrix select_cols(const AnnotationMatrix& a,
                                    const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ContractError("select_cols: empty index set");
  AnnotationMatrix out(a.rows, idx.size());
  if (a.noiseless) out.noiseless.emplace(a.rows * idx.size());
  for (std::size_t m = 0; m < a.rows; ++m) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] >= a.cols) throw ContractError("select_cols: index out of range");
      out.set(m, j, a.at(m, idx[j]));
      if (a.noiseless)
        (*out.noiseless)[m * idx.size() + j] = a.noiseless_at(m, idx[j]);
    }
  }
  return out;
}

}  // namespace zsml

#pragma once

#include <cstdint>

#include "core/annotations.hpp"
#include "core/numkit.hpp"

namespace zsml {

/// Sign convention shared by the synthetic annotator and the predictor:
/// a score of exactly zero maps to "not relevant".
inline std::int8_t sign_label(double score) { return score > 0.0 ? 1 : -1; }

/// Bilinear hypothesis: score(x, lambda) = <V x, lambda> with V in R^{n x d};
/// the decision rule is the sign of the score.
struct BilinearModel {
  Matrix v;  // n x d

  std::size_t n() const { return v.rows(); }
  std::size_t d() const { return v.cols(); }
};

/// Pre-sign compatibility value lambda^T (V x).
double score(const BilinearModel& model, const Vector& x, const Vector& lambda);

/// Batched scores, entry (m, l) = score(x_m, lambda_l). Computed as
/// (X V^T) Lambda^T with the same accumulation order as `score`, so entries
/// are bit-identical to the per-pair calls.
Matrix score_all(const BilinearModel& model, const Matrix& features,
                 const Matrix& labels);

int predict(const BilinearModel& model, const Vector& x, const Vector& lambda);

AnnotationMatrix predict_all(const BilinearModel& model, const Matrix& features,
                             const Matrix& labels);

/// Sign matrix of an arbitrary score matrix (zero maps to -1).
AnnotationMatrix signs_of(const Matrix& scores);

}  // namespace zsml

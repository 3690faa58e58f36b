#include "core/bilinear.hpp"

namespace zsml {

double score(const BilinearModel& model, const Vector& x, const Vector& lambda) {
  const Matrix& v = model.v;
  if (x.dim() != v.cols())
    throw ContractError("score: x has dim " + std::to_string(x.dim()) +
                        ", model expects d=" + std::to_string(v.cols()));
  if (lambda.dim() != v.rows())
    throw ContractError("score: lambda has dim " + std::to_string(lambda.dim()) +
                        ", model expects n=" + std::to_string(v.rows()));
  double s = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    double vx = 0.0;
    for (std::size_t k = 0; k < v.cols(); ++k) vx += x[k] * v(i, k);
    s += vx * lambda[i];
  }
  return s;
}

Matrix score_all(const BilinearModel& model, const Matrix& features,
                 const Matrix& labels) {
  if (features.cols() != model.d())
    throw ContractError("score_all: features have d=" +
                        std::to_string(features.cols()) + ", model expects d=" +
                        std::to_string(model.d()));
  if (labels.cols() != model.n())
    throw ContractError("score_all: labels have n=" +
                        std::to_string(labels.cols()) + ", model expects n=" +
                        std::to_string(model.n()));
  return matmul(matmul(features, transpose(model.v)), transpose(labels));
}

int predict(const BilinearModel& model, const Vector& x, const Vector& lambda) {
  return sign_label(score(model, x, lambda));
}

AnnotationMatrix predict_all(const BilinearModel& model, const Matrix& features,
                             const Matrix& labels) {
  return signs_of(score_all(model, features, labels));
}

AnnotationMatrix signs_of(const Matrix& scores) {
  AnnotationMatrix out(scores.rows(), scores.cols());
  for (std::size_t m = 0; m < scores.rows(); ++m)
    for (std::size_t l = 0; l < scores.cols(); ++l)
      out.set(m, l, sign_label(scores(m, l)));
  return out;
}

}  // namespace zsml

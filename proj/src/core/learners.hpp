#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "core/annotations.hpp"
#include "core/bilinear.hpp"
#include "core/numkit.hpp"

namespace zsml {

struct HingeConfig {
  std::size_t epochs = 200;
  double step0 = 0.5;
  std::optional<std::size_t> batch;  // empty = full batch
  std::uint64_t seed = 0;
};

struct RankNetConfig {
  std::size_t epochs = 150;
  double step0 = 2.0;
  double gamma = 0.0;
  std::optional<std::size_t> batch;
  std::uint64_t seed = 0;
};

struct ConseConfig {
  std::size_t epochs = 200;
  double step0 = 1.0;
  double reg = 1e-4;
  std::size_t t = 5;
  std::uint64_t seed = 0;
};

struct TrainTrace {
  std::vector<double> objectives;  // full objective after each epoch
  double final_objective = 0.0;    // objective of the returned iterate
  double seconds = 0.0;
};

/// Mean hinge loss (1/ML) sum_m sum_l max(1 - y_ml <V x_m, lambda_l>, 0).
double hinge_objective(const BilinearModel& model, const Matrix& features,
                       const Matrix& labels, const AnnotationMatrix& y);

/// Subgradient descent from V=0 with step step0/sqrt(t); cells at margin
/// exactly 1 contribute no subgradient. Returns the best-objective iterate.
std::pair<BilinearModel, TrainTrace> train_hinge(const Matrix& features,
                                                 const Matrix& labels,
                                                 const AnnotationMatrix& y,
                                                 const HingeConfig& cfg);

/// Pairwise logistic ranking loss: mean over retained rows of
///   1/((L-K_m) K_m) * sum over (relevant k, irrelevant kbar) of
///   log(1 + exp(s_kbar - s_k)),
/// plus gamma * ||V||_F^2. Rows with K_m == 0 or K_m == L are dropped from
/// both the sum and the normalizer.
double ranknet_objective(const BilinearModel& model, const Matrix& features,
                         const Matrix& labels, const AnnotationMatrix& y,
                         double gamma);

/// Exact gradient of ranknet_objective with respect to V.
Matrix ranknet_gradient(const BilinearModel& model, const Matrix& features,
                        const Matrix& labels, const AnnotationMatrix& y,
                        double gamma);

std::pair<BilinearModel, TrainTrace> train_ranknet(const Matrix& features,
                                                   const Matrix& labels,
                                                   const AnnotationMatrix& y,
                                                   const RankNetConfig& cfg);

/// Closed-form ridge solution
///   V = (L^T L + gl I)^-1 L^T Y^T X (X^T X + gd I)^-1,
/// the stationary point of
///   ||L V X^T - Y^T||_F^2 + gd ||L V||_F^2 + gl ||V X^T||_F^2 + gl gd ||V||_F^2.
BilinearModel train_eszsl(const Matrix& features, const Matrix& labels,
                          const AnnotationMatrix& y, double gamma_label,
                          double gamma_data);

/// The regularized least-squares objective minimized by train_eszsl.
double eszsl_objective(const BilinearModel& model, const Matrix& features,
                       const Matrix& labels, const AnnotationMatrix& y,
                       double gamma_label, double gamma_data);

/// Per-seen-label one-vs-rest logistic classifiers plus the seen label codes.
/// At inference the top-t labels by probability form a convex combination
/// e(x) of their codes; candidates score by cosine similarity to e(x).
struct ConseModel {
  Matrix weights;      // l_seen x d
  Vector biases;       // l_seen
  Matrix seen_labels;  // l_seen x n
  std::size_t t = 1;

  std::size_t d() const { return weights.cols(); }
  std::size_t n() const { return seen_labels.cols(); }
};

ConseModel train_conse(const Matrix& features, const Matrix& labels,
                       const AnnotationMatrix& y, std::size_t t,
                       const ConseConfig& cfg);

double conse_score(const ConseModel& model, const Vector& x,
                   const Vector& lambda);

Matrix conse_score_all(const ConseModel& model, const Matrix& features,
                       const Matrix& labels);

/// The convex combination e(x) of the top-t seen label codes (zero vector
/// when every probability is zero).
Vector conse_embedding(const ConseModel& model, const Vector& x);

/// A trained model of any learner plus its serialization metadata.
struct SavedModelMeta {
  std::string learner;  // hinge | ranknet | eszsl | conse
  std::uint64_t seed = 0;
  double objective = 0.0;
  // flat key -> value hyperparameter map, serialized into the sidecar
  std::vector<std::pair<std::string, double>> hyperparameters;
};

struct SavedModel {
  std::variant<BilinearModel, ConseModel> model;
  SavedModelMeta meta;

  bool is_bilinear() const { return model.index() == 0; }
  const BilinearModel& bilinear() const { return std::get<BilinearModel>(model); }
  const ConseModel& conse() const { return std::get<ConseModel>(model); }
  std::size_t d() const;
  std::size_t n() const;
};

/// Score matrix under whichever model kind is stored.
Matrix model_score_all(const SavedModel& model, const Matrix& features,
                       const Matrix& labels);

}  // namespace zsml

#include "core/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/rng.hpp"

namespace zsml {

namespace {

// log(1 + exp(z)) without overflow
double log1p_exp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_training_shapes(const Matrix& features, const Matrix& labels,
                           const AnnotationMatrix& y, const char* who) {
  if (y.rows != features.rows() || y.cols != labels.rows())
    throw ContractError(std::string(who) + ": annotations are " +
                        std::to_string(y.rows) + "x" + std::to_string(y.cols) +
                        ", expected " + std::to_string(features.rows()) + "x" +
                        std::to_string(labels.rows()));
}

std::vector<std::size_t> all_rows(std::size_t m) {
  std::vector<std::size_t> rows(m);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

void shuffle_rows(std::vector<std::size_t>& rows, Rng& rng) {
  for (std::size_t i = rows.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(rows[i - 1], rows[j < i ? j : i - 1]);
  }
}

// Generic descent driver shared by the hinge and RankNet trainers: step
// step0/sqrt(t) from V = 0, evaluating the full objective once per epoch and
// keeping the best iterate seen (the start included).
template <typename GradientFn, typename ObjectiveFn>
std::pair<BilinearModel, TrainTrace> descend(
    std::size_t n, std::size_t d, std::size_t m_rows, std::size_t epochs,
    double step0, std::optional<std::size_t> batch, std::uint64_t seed,
    const char* who, GradientFn&& batch_gradient, ObjectiveFn&& full_objective) {
  if (epochs < 1) throw ContractError(std::string(who) + ": epochs must be >= 1");
  if (!(step0 > 0.0)) throw ContractError(std::string(who) + ": step0 must be > 0");
  if (batch && *batch < 1)
    throw ContractError(std::string(who) + ": batch must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  BilinearModel model{Matrix(n, d)};
  BilinearModel best = model;
  double best_obj = full_objective(model);
  TrainTrace trace;
  trace.objectives.reserve(epochs);

  std::vector<std::size_t> rows = all_rows(m_rows);
  const std::size_t batch_size = batch ? std::min(*batch, m_rows) : m_rows;
  Rng shuffle_rng(derive_seed(seed, "batch_shuffle"));
  Matrix grad(n, d);
  std::size_t step_index = 0;

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    if (batch) shuffle_rows(rows, shuffle_rng);
    for (std::size_t begin = 0; begin < m_rows; begin += batch_size) {
      const std::size_t end = std::min(begin + batch_size, m_rows);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) grad(i, j) = 0.0;
      batch_gradient(model, rows, begin, end, grad);
      ++step_index;
      const double eta = step0 / std::sqrt(static_cast<double>(step_index));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) model.v(i, j) -= eta * grad(i, j);
    }
    const double obj = full_objective(model);
    if (!std::isfinite(obj))
      throw DivergedError(std::string(who) + ": objective diverged at epoch " +
                              std::to_string(epoch),
                          epoch);
    trace.objectives.push_back(obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = model;
    }
  }
  trace.final_objective = best_obj;
  trace.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {std::move(best), std::move(trace)};
}

}  // namespace

double hinge_objective(const BilinearModel& model, const Matrix& features,
                       const Matrix& labels, const AnnotationMatrix& y) {
  check_training_shapes(features, labels, y, "hinge_objective");
  const Matrix scores = score_all(model, features, labels);
  double sum = 0.0;
  for (std::size_t m = 0; m < y.rows; ++m)
    for (std::size_t l = 0; l < y.cols; ++l)
      sum += std::max(1.0 - static_cast<double>(y.at(m, l)) * scores(m, l), 0.0);
  return sum / static_cast<double>(y.rows * y.cols);
}

std::pair<BilinearModel, TrainTrace> train_hinge(const Matrix& features,
                                                 const Matrix& labels,
                                                 const AnnotationMatrix& y,
                                                 const HingeConfig& cfg) {
  check_training_shapes(features, labels, y, "train_hinge");
  const std::size_t n = labels.cols();
  const std::size_t d = features.cols();

  auto gradient = [&](const BilinearModel& model,
                      const std::vector<std::size_t>& rows, std::size_t begin,
                      std::size_t end, Matrix& grad) {
    const double scale =
        1.0 / (static_cast<double>(end - begin) * static_cast<double>(y.cols));
    std::vector<double> vx(n);
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t m = rows[r];
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += model.v(i, k) * features(m, k);
        vx[i] = s;
      }
      for (std::size_t l = 0; l < y.cols; ++l) {
        double sc = 0.0;
        for (std::size_t i = 0; i < n; ++i) sc += vx[i] * labels(l, i);
        const double ym = static_cast<double>(y.at(m, l));
        if (ym * sc < 1.0) {
          for (std::size_t i = 0; i < n; ++i) {
            const double c = -ym * labels(l, i) * scale;
            for (std::size_t k = 0; k < d; ++k) grad(i, k) += c * features(m, k);
          }
        }
      }
    }
  };
  auto objective = [&](const BilinearModel& model) {
    return hinge_objective(model, features, labels, y);
  };
  return descend(n, d, y.rows, cfg.epochs, cfg.step0, cfg.batch, cfg.seed,
                 "train_hinge", gradient, objective);
}

namespace {

// Splits a row into relevant/irrelevant label indices.
void split_row(const AnnotationMatrix& y, std::size_t m,
               std::vector<std::size_t>& pos, std::vector<std::size_t>& neg) {
  pos.clear();
  neg.clear();
  for (std::size_t l = 0; l < y.cols; ++l)
    (y.at(m, l) == 1 ? pos : neg).push_back(l);
}

}  // namespace

double ranknet_objective(const BilinearModel& model, const Matrix& features,
                         const Matrix& labels, const AnnotationMatrix& y,
                         double gamma) {
  check_training_shapes(features, labels, y, "ranknet_objective");
  if (gamma < 0.0) throw ContractError("ranknet_objective: gamma must be >= 0");
  const Matrix scores = score_all(model, features, labels);
  std::vector<std::size_t> pos, neg;
  double sum = 0.0;
  std::size_t retained = 0;
  for (std::size_t m = 0; m < y.rows; ++m) {
    split_row(y, m, pos, neg);
    if (pos.empty() || neg.empty()) continue;  // dropped from the normalizer too
    const double w = 1.0 / (static_cast<double>(neg.size()) *
                            static_cast<double>(pos.size()));
    double row_sum = 0.0;
    for (std::size_t k : pos)
      for (std::size_t kb : neg)
        row_sum += log1p_exp(scores(m, kb) - scores(m, k));
    sum += w * row_sum;
    ++retained;
  }
  if (retained == 0)
    throw ContractError(
        "ranknet_objective: every row was dropped (no usable pairs)");
  return sum / static_cast<double>(retained) + gamma * frobenius_norm_sq(model.v);
}

namespace {

// Accumulates the unnormalized pair-loss gradient of the rows [begin, end)
// into grad and returns how many of those rows were retained; the caller
// applies the 1/retained scaling and the regularizer term.
std::size_t ranknet_accumulate(const BilinearModel& model, const Matrix& features,
                               const Matrix& labels, const AnnotationMatrix& y,
                               const std::vector<std::size_t>& rows,
                               std::size_t begin, std::size_t end, Matrix& grad,
                               std::vector<double>& coeff,
                               std::vector<double>& combo) {
  const std::size_t n = labels.cols();
  std::vector<std::size_t> pos, neg;
  std::size_t retained = 0;
  for (std::size_t r = begin; r < end; ++r) {
    const std::size_t m = rows[r];
    split_row(y, m, pos, neg);
    if (pos.empty() || neg.empty()) continue;
    ++retained;
    const double w = 1.0 / (static_cast<double>(neg.size()) *
                            static_cast<double>(pos.size()));
    // per-label pair coefficients, then one rank-1 update per row
    std::fill(coeff.begin(), coeff.end(), 0.0);
    Vector x = matrix_row(features, m);
    const Vector vx_lambda = [&] {
      std::vector<double> vx(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < features.cols(); ++k)
          vx[i] += model.v(i, k) * x[k];
      return Vector(std::move(vx));
    }();
    std::vector<double> s(y.cols);
    for (std::size_t l = 0; l < y.cols; ++l) {
      double sc = 0.0;
      for (std::size_t i = 0; i < n; ++i) sc += vx_lambda[i] * labels(l, i);
      s[l] = sc;
    }
    for (std::size_t k : pos) {
      for (std::size_t kb : neg) {
        const double sg = sigmoid(s[kb] - s[k]);
        coeff[kb] += sg;
        coeff[k] -= sg;
      }
    }
    std::fill(combo.begin(), combo.end(), 0.0);
    for (std::size_t l = 0; l < y.cols; ++l) {
      const double c = w * coeff[l];
      if (c == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) combo[i] += c * labels(l, i);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < features.cols(); ++k)
        grad(i, k) += combo[i] * x[k];
  }
  return retained;
}

}  // namespace

Matrix ranknet_gradient(const BilinearModel& model, const Matrix& features,
                        const Matrix& labels, const AnnotationMatrix& y,
                        double gamma) {
  check_training_shapes(features, labels, y, "ranknet_gradient");
  if (gamma < 0.0) throw ContractError("ranknet_gradient: gamma must be >= 0");
  const std::size_t n = labels.cols();
  const std::size_t d = features.cols();
  Matrix grad(n, d);
  std::vector<double> coeff(y.cols), combo(n);
  const std::vector<std::size_t> rows = all_rows(y.rows);
  const std::size_t retained = ranknet_accumulate(model, features, labels, y,
                                                  rows, 0, y.rows, grad, coeff,
                                                  combo);
  if (retained == 0)
    throw ContractError(
        "ranknet_gradient: every row was dropped (no usable pairs)");
  const double scale = 1.0 / static_cast<double>(retained);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      grad(i, k) = grad(i, k) * scale + 2.0 * gamma * model.v(i, k);
  return grad;
}

std::pair<BilinearModel, TrainTrace> train_ranknet(const Matrix& features,
                                                   const Matrix& labels,
                                                   const AnnotationMatrix& y,
                                                   const RankNetConfig& cfg) {
  check_training_shapes(features, labels, y, "train_ranknet");
  if (cfg.gamma < 0.0) throw ContractError("train_ranknet: gamma must be >= 0");
  const std::size_t n = labels.cols();
  const std::size_t d = features.cols();

  auto gradient = [&](const BilinearModel& model,
                      const std::vector<std::size_t>& rows, std::size_t begin,
                      std::size_t end, Matrix& grad) {
    std::vector<double> coeff(y.cols), combo(n);
    const std::size_t retained = ranknet_accumulate(
        model, features, labels, y, rows, begin, end, grad, coeff, combo);
    const double scale =
        retained > 0 ? 1.0 / static_cast<double>(retained) : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k)
        grad(i, k) = grad(i, k) * scale + 2.0 * cfg.gamma * model.v(i, k);
  };
  auto objective = [&](const BilinearModel& model) {
    return ranknet_objective(model, features, labels, y, cfg.gamma);
  };
  return descend(n, d, y.rows, cfg.epochs, cfg.step0, cfg.batch, cfg.seed,
                 "train_ranknet", gradient, objective);
}

namespace {

Matrix annotations_as_matrix(const AnnotationMatrix& y) {
  Matrix out(y.rows, y.cols);
  for (std::size_t m = 0; m < y.rows; ++m)
    for (std::size_t l = 0; l < y.cols; ++l)
      out(m, l) = static_cast<double>(y.at(m, l));
  return out;
}

}  // namespace

BilinearModel train_eszsl(const Matrix& features, const Matrix& labels,
                          const AnnotationMatrix& y, double gamma_label,
                          double gamma_data) {
  check_training_shapes(features, labels, y, "train_eszsl");
  if (gamma_label < 0.0 || gamma_data < 0.0)
    throw ContractError("train_eszsl: regularizers must be >= 0");
  const std::size_t n = labels.cols();
  const std::size_t d = features.cols();

  Matrix a = matmul(transpose(labels), labels);  // n x n
  for (std::size_t i = 0; i < n; ++i) a(i, i) += gamma_label;
  Matrix b = matmul(transpose(features), features);  // d x d
  for (std::size_t i = 0; i < d; ++i) b(i, i) += gamma_data;

  const Matrix yd = annotations_as_matrix(y);
  const Matrix rhs = matmul(matmul(transpose(labels), transpose(yd)), features);
  const Matrix c = solve_spd(a, rhs);                  // n x d
  return BilinearModel{transpose(solve_spd(b, transpose(c)))};
}

double eszsl_objective(const BilinearModel& model, const Matrix& features,
                       const Matrix& labels, const AnnotationMatrix& y,
                       double gamma_label, double gamma_data) {
  check_training_shapes(features, labels, y, "eszsl_objective");
  const Matrix lv = matmul(labels, model.v);               // L x d
  const Matrix fit = matmul(lv, transpose(features));      // L x M
  double residual = 0.0;
  for (std::size_t l = 0; l < y.cols; ++l)
    for (std::size_t m = 0; m < y.rows; ++m) {
      const double diff = fit(l, m) - static_cast<double>(y.at(m, l));
      residual += diff * diff;
    }
  const Matrix vx = matmul(model.v, transpose(features));  // n x M
  return residual + gamma_data * frobenius_norm_sq(lv) +
         gamma_label * frobenius_norm_sq(vx) +
         gamma_label * gamma_data * frobenius_norm_sq(model.v);
}

ConseModel train_conse(const Matrix& features, const Matrix& labels,
                       const AnnotationMatrix& y, std::size_t t,
                       const ConseConfig& cfg) {
  check_training_shapes(features, labels, y, "train_conse");
  if (t < 1 || t > labels.rows())
    throw ContractError("train_conse: t must be in [1, l_seen]");
  if (cfg.epochs < 1) throw ContractError("train_conse: epochs must be >= 1");
  if (!(cfg.step0 > 0.0)) throw ContractError("train_conse: step0 must be > 0");

  const std::size_t m_rows = features.rows();
  const std::size_t d = features.cols();
  ConseModel model;
  model.weights = Matrix(labels.rows(), d);
  model.biases = Vector(labels.rows());
  model.seen_labels = labels;
  model.t = t;

  // One-vs-rest regularized logistic regression per label. A single-class
  // column simply drives the classifier toward the prior; that is expected.
  std::vector<double> w(d), gw(d);
  for (std::size_t l = 0; l < labels.rows(); ++l) {
    std::fill(w.begin(), w.end(), 0.0);
    double bias = 0.0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0.0;
      for (std::size_t m = 0; m < m_rows; ++m) {
        double f = bias;
        for (std::size_t k = 0; k < d; ++k) f += w[k] * features(m, k);
        const double z = static_cast<double>(y.at(m, l));
        const double coef = -z * sigmoid(-z * f);
        for (std::size_t k = 0; k < d; ++k) gw[k] += coef * features(m, k);
        gb += coef;
      }
      const double inv_m = 1.0 / static_cast<double>(m_rows);
      const double eta = cfg.step0 / std::sqrt(static_cast<double>(epoch));
      for (std::size_t k = 0; k < d; ++k)
        w[k] -= eta * (gw[k] * inv_m + 2.0 * cfg.reg * w[k]);
      bias -= eta * gb * inv_m;
    }
    for (std::size_t k = 0; k < d; ++k) model.weights(l, k) = w[k];
    model.biases[l] = bias;
  }
  return model;
}

Vector conse_embedding(const ConseModel& model, const Vector& x) {
  if (x.dim() != model.d())
    throw ContractError("conse_embedding: x has dim " + std::to_string(x.dim()) +
                        ", model expects d=" + std::to_string(model.d()));
  const std::size_t l_seen = model.weights.rows();
  std::vector<double> prob(l_seen);
  for (std::size_t l = 0; l < l_seen; ++l) {
    double f = model.biases[l];
    for (std::size_t k = 0; k < x.dim(); ++k) f += model.weights(l, k) * x[k];
    prob[l] = sigmoid(f);
  }
  std::vector<std::size_t> order(l_seen);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prob[a] > prob[b];
  });

  std::vector<double> e(model.n(), 0.0);
  double norm = 0.0;
  for (std::size_t r = 0; r < model.t; ++r) norm += prob[order[r]];
  if (norm > 0.0) {
    for (std::size_t r = 0; r < model.t; ++r) {
      const double p = prob[order[r]] / norm;
      for (std::size_t j = 0; j < model.n(); ++j)
        e[j] += p * model.seen_labels(order[r], j);
    }
  }
  return Vector(std::move(e));
}

namespace {

double cosine(const Vector& a, const Vector& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace

double conse_score(const ConseModel& model, const Vector& x,
                   const Vector& lambda) {
  if (lambda.dim() != model.n())
    throw ContractError("conse_score: lambda has dim " +
                        std::to_string(lambda.dim()) + ", model expects n=" +
                        std::to_string(model.n()));
  return cosine(conse_embedding(model, x), lambda);
}

Matrix conse_score_all(const ConseModel& model, const Matrix& features,
                       const Matrix& labels) {
  if (features.cols() != model.d() || labels.cols() != model.n())
    throw ContractError("conse_score_all: feature/label dims do not match model");
  Matrix out(features.rows(), labels.rows());
  for (std::size_t m = 0; m < features.rows(); ++m) {
    const Vector e = conse_embedding(model, matrix_row(features, m));
    for (std::size_t l = 0; l < labels.rows(); ++l)
      out(m, l) = cosine(e, matrix_row(labels, l));
  }
  return out;
}

std::size_t SavedModel::d() const {
  return is_bilinear() ? bilinear().d() : conse().d();
}

std::size_t SavedModel::n() const {
  return is_bilinear() ? bilinear().n() : conse().n();
}

Matrix model_score_all(const SavedModel& model, const Matrix& features,
                       const Matrix& labels) {
  if (model.is_bilinear()) return score_all(model.bilinear(), features, labels);
  return conse_score_all(model.conse(), features, labels);
}

}  // namespace zsml

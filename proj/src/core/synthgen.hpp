#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/annotations.hpp"
#include "core/bilinear.hpp"
#include "core/numkit.hpp"

namespace zsml {

/// Gaussian mixture over the data space: component k has weight weights[k],
/// mean means[k] and covariance factors[k] * factors[k]^T.
struct GmmParams {
  std::size_t k = 0;
  Vector weights;
  std::vector<Vector> means;
  std::vector<Matrix> factors;

  std::size_t dim() const { return means.empty() ? 0 : means.front().dim(); }
};

struct LabelGaussian {
  Vector mean;
  Matrix cov;
};

/// Full generative ground truth for a synthetic benchmark: data mixture,
/// label Gaussian, true scoring matrix, and the annotation flip rate.
struct SyntheticWorld {
  GmmParams gmm;
  LabelGaussian label_dist;
  BilinearModel v_star;
  double flip_prob = 0.0;
  std::uint64_t seed = 0;
};

struct SynthConfig {
  std::size_t d = 3;
  std::size_t n = 2;
  std::size_t k = 5;
  double dirichlet_alpha = 3.0;
  std::size_t m_train = 500;
  std::size_t m_test = 1000;
  std::size_t l_seen = 10;
  std::size_t l_unseen = 2990;
  double flip_prob = 0.1;
  std::uint64_t seed = 0;
  // optional override of the label Gaussian; see default_label_gaussian
  std::optional<Vector> label_mean;
  std::optional<Matrix> label_cov;
};

/// A generated benchmark instance. Test annotations cover seen labels first,
/// then unseen labels, in one M_test x (l_seen + l_unseen) block.
struct GeneratedWorld {
  SyntheticWorld world;
  SynthConfig config;
  Matrix train_features;          // m_train x d
  AnnotationMatrix train_annotations;  // m_train x l_seen
  Matrix test_features;           // m_test x d
  AnnotationMatrix test_annotations;   // m_test x (l_seen + l_unseen)
  Matrix seen_labels;             // l_seen x n
  std::optional<Matrix> unseen_labels;  // l_unseen x n when l_unseen > 0
};

/// Mixture weights from Dirichlet(alpha, ..., alpha); means and covariance
/// factors with i.i.d. standard normal entries.
GmmParams sample_gmm_params(std::size_t d, std::size_t k, double dirichlet_alpha,
                            std::uint64_t seed);

/// count i.i.d. draws: pick a component by weight, then mean + factor * z.
Matrix sample_data(const GmmParams& gmm, std::size_t count, std::uint64_t seed);

/// count i.i.d. Gaussian label codes via the PSD-tolerant Cholesky factor.
Matrix sample_labels(const LabelGaussian& dist, std::size_t count,
                     std::uint64_t seed);

/// Noiseless truth sgn<V* x_m, lambda_l> plus independent sign flips at
/// world.flip_prob; the returned matrix carries both.
AnnotationMatrix annotate(const SyntheticWorld& world, const Matrix& features,
                          const Matrix& labels, std::uint64_t seed);

/// The label Gaussian used when the config does not override it: the
/// correlated 2-d Gaussian benchmark for n == 2, standard normal otherwise.
LabelGaussian default_label_gaussian(std::size_t n);

/// Generative parameters only (no datasets drawn).
SyntheticWorld make_world(const SynthConfig& config, std::uint64_t seed);

/// Whole benchmark: world parameters plus train/test features, seen and
/// unseen label codes, and annotations. Every random stream uses a sub-seed
/// derived from (seed, stream-name).
GeneratedWorld generate_world(const SynthConfig& config, std::uint64_t seed);

}  // namespace zsml

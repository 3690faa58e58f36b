#include "core/synthgen.hpp"

#include <string>

#include "core/rng.hpp"

namespace zsml {

GmmParams sample_gmm_params(std::size_t d, std::size_t k, double dirichlet_alpha,
                            std::uint64_t seed) {
  if (d < 1 || k < 1) throw ContractError("sample_gmm_params: d and k must be >= 1");
  if (!(dirichlet_alpha > 0.0))
    throw ContractError("sample_gmm_params: dirichlet_alpha must be > 0");

  GmmParams params;
  params.k = k;

  // Dirichlet(alpha,...,alpha) as normalized Gamma(alpha) draws
  Rng wrng(derive_seed(seed, "gmm_weights"));
  std::vector<double> w(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = wrng.gamma(dirichlet_alpha);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  params.weights = Vector(std::move(w));

  Rng mrng(derive_seed(seed, "gmm_means"));
  Rng frng(derive_seed(seed, "gmm_factors"));
  params.means.reserve(k);
  params.factors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> mu(d);
    for (double& v : mu) v = mrng.normal();
    params.means.emplace_back(std::move(mu));

    std::vector<double> u(d * d);
    for (double& v : u) v = frng.normal();
    params.factors.emplace_back(d, d, std::move(u));
  }
  return params;
}

Matrix sample_data(const GmmParams& gmm, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw ContractError("sample_data: count must be >= 1");
  const std::size_t d = gmm.dim();
  Rng rng(seed);
  Matrix out(count, d);
  std::vector<double> z(d);
  for (std::size_t m = 0; m < count; ++m) {
    const double u = rng.uniform();
    std::size_t comp = gmm.k - 1;
    double cum = 0.0;
    for (std::size_t i = 0; i < gmm.k; ++i) {
      cum += gmm.weights[i];
      if (u < cum) {
        comp = i;
        break;
      }
    }
    for (double& v : z) v = rng.normal();
    const Matrix& factor = gmm.factors[comp];
    for (std::size_t i = 0; i < d; ++i) {
      double x = gmm.means[comp][i];
      for (std::size_t j = 0; j < d; ++j) x += factor(i, j) * z[j];
      out(m, i) = x;
    }
  }
  return out;
}

Matrix sample_labels(const LabelGaussian& dist, std::size_t count,
                     std::uint64_t seed) {
  if (count < 1) throw ContractError("sample_labels: count must be >= 1");
  const std::size_t n = dist.mean.dim();
  if (dist.cov.rows() != n || dist.cov.cols() != n)
    throw ContractError("sample_labels: cov shape does not match mean dim");
  const Matrix factor = cholesky_psd(dist.cov);
  Rng rng(seed);
  Matrix out(count, n);
  std::vector<double> z(n);
  for (std::size_t l = 0; l < count; ++l) {
    for (double& v : z) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double x = dist.mean[i];
      for (std::size_t j = 0; j <= i && j < n; ++j) x += factor(i, j) * z[j];
      out(l, i) = x;
    }
  }
  return out;
}

AnnotationMatrix annotate(const SyntheticWorld& world, const Matrix& features,
                          const Matrix& labels, std::uint64_t seed) {
  const Matrix scores = score_all(world.v_star, features, labels);
  AnnotationMatrix out(features.rows(), labels.rows());
  out.noiseless.emplace(out.rows * out.cols);
  Rng rng(seed);
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t l = 0; l < out.cols; ++l) {
      const std::int8_t truth = sign_label(scores(m, l));
      (*out.noiseless)[m * out.cols + l] = truth;
      const bool flip = rng.bernoulli(world.flip_prob);
      out.set(m, l, flip ? static_cast<std::int8_t>(-truth) : truth);
    }
  }
  return out;
}

LabelGaussian default_label_gaussian(std::size_t n) {
  if (n == 2) {
    return LabelGaussian{Vector{2.0, 3.0}, Matrix{{1.0, 1.5}, {1.5, 3.0}}};
  }
  return LabelGaussian{Vector(std::vector<double>(n, 0.0)), Matrix::identity(n)};
}

SyntheticWorld make_world(const SynthConfig& config, std::uint64_t seed) {
  if (config.d < 1 || config.n < 1 || config.k < 1 || config.m_train < 1 ||
      config.m_test < 1 || config.l_seen < 1)
    throw ContractError("make_world: config counts must be >= 1");
  if (config.flip_prob < 0.0 || config.flip_prob > 1.0)
    throw ContractError("make_world: flip_prob must be in [0,1]");

  SyntheticWorld world;
  world.seed = seed;
  world.flip_prob = config.flip_prob;
  world.gmm = sample_gmm_params(config.d, config.k, config.dirichlet_alpha,
                                derive_seed(seed, "gmm"));

  if (config.label_mean || config.label_cov) {
    LabelGaussian dist = default_label_gaussian(config.n);
    if (config.label_mean) dist.mean = *config.label_mean;
    if (config.label_cov) dist.cov = *config.label_cov;
    if (dist.mean.dim() != config.n || dist.cov.rows() != config.n)
      throw ContractError("make_world: label distribution dims != n");
    world.label_dist = dist;
  } else {
    world.label_dist = default_label_gaussian(config.n);
  }

  Rng vrng(derive_seed(seed, "v_star"));
  Matrix v(config.n, config.d);
  for (std::size_t i = 0; i < config.n; ++i)
    for (std::size_t j = 0; j < config.d; ++j) v(i, j) = vrng.normal();
  world.v_star = BilinearModel{std::move(v)};
  return world;
}

GeneratedWorld generate_world(const SynthConfig& config, std::uint64_t seed) {
  GeneratedWorld g;
  g.world = make_world(config, seed);
  g.config = config;
  g.config.seed = seed;

  g.train_features = sample_data(g.world.gmm, config.m_train,
                                 derive_seed(seed, "train_data"));
  g.test_features =
      sample_data(g.world.gmm, config.m_test, derive_seed(seed, "test_data"));
  g.seen_labels = sample_labels(g.world.label_dist, config.l_seen,
                                derive_seed(seed, "seen_labels"));
  if (config.l_unseen > 0) {
    g.unseen_labels = sample_labels(g.world.label_dist, config.l_unseen,
                                    derive_seed(seed, "unseen_labels"));
  }

  g.train_annotations = annotate(g.world, g.train_features, g.seen_labels,
                                 derive_seed(seed, "train_flips"));

  Matrix all_labels = g.seen_labels;
  if (g.unseen_labels) {
    Matrix combined(config.l_seen + config.l_unseen, config.n);
    for (std::size_t l = 0; l < config.l_seen; ++l)
      for (std::size_t j = 0; j < config.n; ++j)
        combined(l, j) = g.seen_labels(l, j);
    for (std::size_t l = 0; l < config.l_unseen; ++l)
      for (std::size_t j = 0; j < config.n; ++j)
        combined(config.l_seen + l, j) = (*g.unseen_labels)(l, j);
    all_labels = std::move(combined);
  }
  g.test_annotations = annotate(g.world, g.test_features, all_labels,
                                derive_seed(seed, "test_flips"));
  return g;
}

}  // namespace zsml

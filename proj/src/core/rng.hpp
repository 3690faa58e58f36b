#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace zsml {

std::uint64_t splitmix64(std::uint64_t x);

/// Stable sub-seed for a named random stream. Hashing (master, name) keeps
/// streams independent: changing how many labels are drawn never perturbs
/// the data draw.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Seeded generator with hand-rolled transforms (Box-Muller normals,
/// Marsaglia-Tsang gammas) so draws are bit-reproducible within a build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Standard normal.
  double normal();
  /// Gamma(alpha, 1), alpha > 0.
  double gamma(double alpha);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zsml

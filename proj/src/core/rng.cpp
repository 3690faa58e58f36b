#include "core/rng.hpp"

#include <cmath>

#include "core/error.hpp"

namespace zsml {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
// FNV-1a; std::hash is not stable across implementations.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  return splitmix64(master ^ fnv1a(stream));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = derive_seed(master, stream);
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b));
  h = splitmix64(h ^ splitmix64(c));
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u = uniform_pos();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double t = 2.0 * 3.14159265358979323846 * v;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

double Rng::gamma(double alpha) {
  if (!(alpha > 0.0)) throw ContractError("gamma: alpha must be > 0");
  if (alpha < 1.0) {
    // boost to alpha+1 and scale back down
    return gamma(alpha + 1.0) * std::pow(uniform_pos(), 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace zsml

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace skewirt {

/// Random stream used throughout the library. Draws are reproducible for a
/// given seed on a given standard library build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  /// Uniform on the open interval (0, 1); safe to take a log of.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

  /// log of a Gamma(shape, 1) variate. Stays finite for shapes well below 1,
  /// where the variate itself routinely underflows.
  double log_gamma_variate(double shape) {
    if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(engine_));
    const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(engine_);
    return std::log(g) + std::log(uniform_pos()) / shape;
  }

  double beta(double a, double b) {
    const double lx = log_gamma_variate(a);
    const double ly = log_gamma_variate(b);
    const double m = std::max(lx, ly);
    const double x = std::exp(lx - m);
    const double y = std::exp(ly - m);
    return x / (x + y);
  }

  /// Dirichlet draw normalised in log space; components are clamped to the
  /// smallest normal double so they stay strictly positive.
  std::array<double, 3> dirichlet(const std::array<double, 3>& alpha) {
    std::array<double, 3> lg{};
    for (int k = 0; k < 3; ++k) lg[k] = log_gamma_variate(alpha[k]);
    const double m = std::max({lg[0], lg[1], lg[2]});
    double total = 0.0;
    std::array<double, 3> w{};
    for (int k = 0; k < 3; ++k) total += (w[k] = std::exp(lg[k] - m));
    for (auto& v : w) v = std::max(v / total, std::numeric_limits<double>::min());
    return w;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace skewirt

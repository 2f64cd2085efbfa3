#pragma once

#include <cstddef>
#include <vector>

#include "skewirt/random.hpp"

// Centred skew-normal (CSN) distribution: the skew-normal family
// reparametrised to mean 0 and variance 1, indexed by Pearson skewness.
namespace skewirt::csn {

/// Open bound on |skewness|; the skewness of the half-normal limit, truncated.
inline constexpr double kGammaMax = 0.99527;

/// r = sqrt(2/pi), the mean of the standard half-normal.
inline constexpr double kR = 0.79788456080286535588;
/// s = (2 / (4 - pi))^(1/3).
inline constexpr double kS = 1.32570081510001124945;

/// Pearson skewness restricted to (-kGammaMax, kGammaMax).
class Skewness {
 public:
  constexpr Skewness() = default;
  /// Throws std::domain_error outside the open interval or for non-finite input.
  explicit Skewness(double gamma);

  constexpr double value() const { return gamma_; }
  static constexpr bool admissible(double gamma) {
    return gamma > -kGammaMax && gamma < kGammaMax;
  }

 private:
  double gamma_ = 0.0;
};

/// Direct (location, scale, shape) parameters of the equivalent skew normal.
struct DirectParams {
  double xi = 0.0;
  double omega = 1.0;
  double alpha = 0.0;
  double delta = 0.0;
};

/// Signed real cube root.
double signed_cbrt(double x);

DirectParams to_direct(Skewness gamma);

/// Shape map g(gamma) = s gamma^(1/3) [r^2 + s^2 gamma^(2/3) (r^2 - 1)]^(-1/2).
double shape_g(Skewness gamma);

/// Owen's T(h, a) = (1/2pi) int_0^a exp(-h^2 (1 + x^2) / 2) / (1 + x^2) dx.
double owen_t(double h, double a);

/// Standard normal cdf and density.
double norm_cdf(double x);
double norm_pdf(double x);

double pdf(double u, Skewness gamma);
double cdf(double u, Skewness gamma);
/// 1 - cdf(u, gamma), evaluated without cancellation against 1.
double ccdf(double u, Skewness gamma);
/// Inverse cdf by bisection, accurate to about 1e-12 in u.
double quantile(double p, Skewness gamma);

/// n i.i.d. variates from the stochastic representation
/// xi + omega * (delta |U0| + sqrt(1 - delta^2) U1).
std::vector<double> sample(Skewness gamma, std::size_t n, Rng& rng);
double sample_one(const DirectParams& dp, Rng& rng);

}  // namespace skewirt::csn

#pragma once

// Reference computations for the tests. They share no code with the library:
// the skew-normal parameters are solved from the moment equations directly,
// and every cdf comes from numerical integration of the density.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

struct SN {
  double xi, omega, alpha, delta;
};

// Mean 0, variance 1, skewness gamma. With mu = delta sqrt(2/pi), the skewness
// of SN is ((4 - pi)/2) mu^3 / (1 - mu^2)^(3/2); solve for mu, then pick the
// scale and location that standardise it.
inline SN centred(double gamma) {
  const double r = std::sqrt(2.0 / kPi);
  const double k = std::cbrt(2.0 * gamma / (4.0 - kPi));  // mu / sqrt(1 - mu^2)
  const double mu = k / std::sqrt(1.0 + k * k);
  const double delta = mu / r;
  const double omega = 1.0 / std::sqrt(1.0 - mu * mu);
  const double xi = -omega * mu;
  const double alpha = delta / std::sqrt(1.0 - delta * delta);
  return {xi, omega, alpha, delta};
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double sn_pdf(double u, const SN& p) {
  const double z = (u - p.xi) / p.omega;
  return 2.0 / p.omega * phi(z) * Phi(p.alpha * z);
}

inline double csn_pdf(double u, double gamma) { return sn_pdf(u, centred(gamma)); }

/// Composite 30-point Gauss-Legendre with panels no wider than 0.25. The
/// integrands here are analytic, so this converges to rounding level.
template <typename F>
double integrate(F f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
  const double w = (hi - lo) / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += boost::math::quadrature::gauss<double, 30>::integrate(f, lo + k * w, lo + (k + 1) * w);
  return sum;
}

// Lower end of the support that matters: the density is below 1e-40 there.
inline constexpr double kLo = -16.0;

/// cdf by adaptive quadrature of the density, split at the location so the
/// kink-like region of large shapes sits on a panel boundary.
inline double csn_cdf(double u, double gamma) {
  const SN p = centred(gamma);
  auto f = [&](double t) { return sn_pdf(t, p); };
  if (u <= p.xi) return integrate(f, kLo, u);
  return integrate(f, kLo, p.xi) + integrate(f, p.xi, u);
}

/// Integral of t^k times the density over [kLo, -kLo].
inline double csn_moment(double gamma, int k) {
  const SN p = centred(gamma);
  auto f = [&](double t) { return std::pow(t, k) * sn_pdf(t, p); };
  return integrate(f, kLo, p.xi) + integrate(f, p.xi, -kLo);
}

/// Owen's T from a fixed 64-node Gauss-Legendre rule on the defining integral.
inline double owen_t(double h, double a) {
  auto f = [h](double x) { return std::exp(-0.5 * h * h * (1.0 + x * x)) / (1.0 + x * x); };
  return boost::math::quadrature::gauss<double, 64>::integrate(f, 0.0, a) / (2.0 * kPi);
}

/// Non-centred skew normal SN(0, 1, lambda) cdf by quadrature.
inline double sn_cdf(double u, double lambda) {
  const SN p{0.0, 1.0, lambda, lambda / std::sqrt(1.0 + lambda * lambda)};
  auto f = [&](double t) { return sn_pdf(t, p); };
  if (u <= 0.0) return integrate(f, kLo, u);
  return integrate(f, kLo, 0.0) + integrate(f, 0.0, u);
}

}  // namespace oracle

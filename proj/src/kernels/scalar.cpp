#include <algorithm>
#include <cmath>

#include "skewirt/kernels.hpp"

namespace skewirt::kernels {

namespace {

void log_terms_scalar(const ItemLink& link, const double* theta, const std::uint8_t* y, double* out,
                      std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double z = (link.a * (theta[j] - link.b) - link.xi) / link.omega;
    double p;
    if (link.alpha == 0.0) {
      p = y[j] ? csn::norm_cdf(z) : csn::norm_cdf(-z);
    } else {
      const double t = 2.0 * csn::owen_t(z, link.alpha);
      p = y[j] ? csn::norm_cdf(z) - t : csn::norm_cdf(-z) + t;
    }
    out[j] = std::log(std::clamp(p, kProbFloor, kProbCeil));
  }
}

double masked_delta_scalar(const double* lhs, const double* rhs, const std::uint8_t* skip,
                           std::size_t n) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!skip[j]) sum += lhs[j] - rhs[j];
  }
  return sum;
}

}  // namespace

ItemLink make_link(double a, double b, csn::Skewness gamma) {
  const csn::DirectParams dp = csn::to_direct(gamma);
  return {a, b, dp.xi, dp.omega, dp.alpha};
}

const KernelSet& scalar_kernels() {
  static const KernelSet set{"scalar", &log_terms_scalar, &masked_delta_scalar};
  return set;
}

}  // namespace skewirt::kernels

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "skewirt/csn.hpp"

// Batched response log-likelihood kernels. The scalar set is the reference;
// vector sets must agree with it to within a few ulps of the log terms and are
// chosen at runtime from what the CPU supports.
namespace skewirt::kernels {

/// Probabilities are clamped to [kProbFloor, kProbCeil] before taking logs.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 1e-16;

/// One item's link: predictor m = a (theta - b) pushed through a CSN cdf
/// given in direct form (xi, omega, alpha).
struct ItemLink {
  double a = 1.0;
  double b = 0.0;
  double xi = 0.0;
  double omega = 1.0;
  double alpha = 0.0;
};

ItemLink make_link(double a, double b, csn::Skewness gamma);

/// out[j] = log P(Y = y[j] | theta[j]) for the item.
using LogTermsFn = void (*)(const ItemLink& link, const double* theta, const std::uint8_t* y,
                            double* out, std::size_t n);

/// Sum over j with skip[j] == 0 of (lhs[j] - rhs[j]).
using MaskedDeltaFn = double (*)(const double* lhs, const double* rhs, const std::uint8_t* skip,
                                 std::size_t n);

struct KernelSet {
  std::string_view name;
  LogTermsFn log_terms;
  MaskedDeltaFn masked_delta;
};

const KernelSet& scalar_kernels();

/// nullptr when the AVX2 set was not compiled in or the CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels();

/// Best available set. SKEWIRT_KERNEL=scalar forces the reference kernels.
const KernelSet& active_kernels();

/// Lookup by name ("scalar", "avx2", "auto"); throws std::invalid_argument
/// for unknown or unavailable names.
const KernelSet& kernels_by_name(std::string_view name);

}  // namespace skewirt::kernels

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstring>

#include "avx2_math.hpp"
#include "gauss_legendre.hpp"
#include "skewirt/kernels.hpp"

namespace skewirt::kernels {

namespace {

using namespace avx2;

constexpr std::size_t kOwenNodes = 14;

// T(h, a) for a fixed 0 < a <= 1 as sum_k coef_k exp(-h^2 expo_k): Gauss-Legendre
// on the defining integral, whose integrand is smooth on [0, a].
struct OwenPlan {
  std::array<double, kOwenNodes> coef{};
  std::array<double, kOwenNodes> expo{};
};

OwenPlan make_owen_plan(double a) {
  static const auto rule = detail::gauss_legendre(kOwenNodes);
  constexpr double kInv4Pi = 0.079577471545947667884;
  OwenPlan plan;
  for (std::size_t k = 0; k < kOwenNodes; ++k) {
    const double x = 0.5 * a * (1.0 + rule.first[k]);
    const double q = 1.0 + x * x;
    plan.coef[k] = a * rule.second[k] * kInv4Pi / q;
    plan.expo[k] = 0.5 * q;
  }
  return plan;
}

inline __m256d owen_t_pd(__m256d h, const OwenPlan& plan) {
  const __m256d neg_hh = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(h, h));
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < kOwenNodes; ++k) {
    const __m256d e = exp_pd(_mm256_mul_pd(neg_hh, _mm256_set1_pd(plan.expo[k])));
    acc = _mm256_fmadd_pd(_mm256_set1_pd(plan.coef[k]), e, acc);
  }
  return acc;
}

inline __m256d load_flags(const std::uint8_t* p) {
  std::int32_t bits;
  std::memcpy(&bits, p, sizeof(bits));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(bits));
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

enum class LinkShape { symmetric, narrow, wide };

struct Prepared {
  LinkShape shape = LinkShape::symmetric;
  bool reflect = false;
  double abs_alpha = 0.0;
  OwenPlan plan;
};

Prepared prepare(const ItemLink& link) {
  Prepared p;
  p.reflect = link.alpha < 0.0;
  p.abs_alpha = std::abs(link.alpha);
  if (p.abs_alpha == 0.0) return p;
  p.shape = p.abs_alpha <= 1.0 ? LinkShape::narrow : LinkShape::wide;
  p.plan = make_owen_plan(p.shape == LinkShape::narrow ? p.abs_alpha : 1.0 / p.abs_alpha);
  return p;
}

// P(Y = y) for four subjects; `ones` holds the lanes with y = 1.
inline __m256d response_prob(const ItemLink& link, const Prepared& prep, __m256d theta,
                             __m256d ones) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d m = _mm256_mul_pd(_mm256_set1_pd(link.a), _mm256_sub_pd(theta, _mm256_set1_pd(link.b)));
  __m256d z = _mm256_div_pd(_mm256_sub_pd(m, _mm256_set1_pd(link.xi)), _mm256_set1_pd(link.omega));

  // F(z; alpha) = 1 - F(-z; -alpha): work with |alpha| and swap the roles of
  // the two tails when alpha < 0.
  if (prep.reflect) {
    z = _mm256_sub_pd(_mm256_setzero_pd(), z);
    ones = _mm256_xor_pd(ones, _mm256_castsi256_pd(_mm256_set1_epi64x(-1)));
  }

  switch (prep.shape) {
    case LinkShape::symmetric: {
      const __m256d signed_z = _mm256_blendv_pd(_mm256_sub_pd(_mm256_setzero_pd(), z), z, ones);
      return norm_cdf_pd(signed_z);
    }
    case LinkShape::narrow: {
      // lower = Phi(z) - 2T(z, a), upper = Phi(-z) + 2T(z, a).
      const __m256d signed_z = _mm256_blendv_pd(_mm256_sub_pd(_mm256_setzero_pd(), z), z, ones);
      const __m256d t = owen_t_pd(z, prep.plan);
      const __m256d t2 = _mm256_add_pd(t, t);
      const __m256d phi = norm_cdf_pd(signed_z);
      return _mm256_blendv_pd(_mm256_add_pd(phi, t2), _mm256_sub_pd(phi, t2), ones);
    }
    case LinkShape::wide: {
      // With h = a z and T(z, a) + T(h, 1/a) = (Phi(z) + Phi(h))/2 - Phi(z) Phi(h):
      // lower = Phi(h) (Phi(z) - Phi(-z)) + 2T(h, 1/a)
      // upper = Phi(-h) + 2 Phi(h) Phi(-z) - 2T(h, 1/a)
      const __m256d h = _mm256_mul_pd(z, _mm256_set1_pd(prep.abs_alpha));
      const __m256d cz = norm_cdf_pd(_mm256_sub_pd(_mm256_setzero_pd(), z));
      const __m256d ch = norm_cdf_pd(_mm256_sub_pd(_mm256_setzero_pd(), h));
      const __m256d pz = _mm256_sub_pd(one, cz);
      const __m256d ph = _mm256_sub_pd(one, ch);
      const __m256d t = owen_t_pd(h, prep.plan);
      const __m256d t2 = _mm256_add_pd(t, t);
      const __m256d lower = _mm256_fmadd_pd(ph, _mm256_sub_pd(pz, cz), t2);
      const __m256d upper =
          _mm256_sub_pd(_mm256_fmadd_pd(_mm256_add_pd(ph, ph), cz, ch), t2);
      return _mm256_blendv_pd(upper, lower, ones);
    }
  }
  return one;
}

inline __m256d log_clamped(__m256d p) {
  p = _mm256_max_pd(_mm256_min_pd(p, _mm256_set1_pd(kProbCeil)), _mm256_set1_pd(kProbFloor));
  return log_pd(p);
}

void log_terms_avx2(const ItemLink& link, const double* theta, const std::uint8_t* y, double* out,
                    std::size_t n) {
  const Prepared prep = prepare(link);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d p = response_prob(link, prep, _mm256_loadu_pd(theta + j), load_flags(y + j));
    _mm256_storeu_pd(out + j, log_clamped(p));
  }
  if (j < n) {
    // Pad the remainder so every element goes through the same vector path.
    alignas(32) double th[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double res[4];
    std::uint8_t flags[4] = {1, 1, 1, 1};
    const std::size_t rest = n - j;
    for (std::size_t k = 0; k < rest; ++k) {
      th[k] = theta[j + k];
      flags[k] = y[j + k];
    }
    _mm256_store_pd(res, log_clamped(response_prob(link, prep, _mm256_load_pd(th), load_flags(flags))));
    for (std::size_t k = 0; k < rest; ++k) out[j + k] = res[k];
  }
}

double masked_delta_avx2(const double* lhs, const double* rhs, const std::uint8_t* skip,
                         std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(lhs + j), _mm256_loadu_pd(rhs + j));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(load_flags(skip + j), d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; j < n; ++j) {
    if (!skip[j]) sum += lhs[j] - rhs[j];
  }
  return sum;
}

}  // namespace

const KernelSet& avx2_kernel_set() {
  static const KernelSet set{"avx2", &log_terms_avx2, &masked_delta_avx2};
  return set;
}

}  // namespace skewirt::kernels

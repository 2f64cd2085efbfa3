#pragma once

// Four-lane double-precision exp, log and erfc for AVX2 + FMA. log and erfc
// follow the Cephes rational approximations; exp uses a division-free Taylor
// polynomial after Cody-Waite reduction. Only include from translation units built
// with -mavx2 -mfma.

#include <immintrin.h>

namespace skewirt::kernels::avx2 {

// Horner evaluation with leading coefficient first.
inline __m256d horner(__m256d x, __m256d acc) { (void)x; return acc; }

template <typename... Rest>
inline __m256d horner(__m256d x, __m256d acc, double c, Rest... rest) {
  return horner(x, _mm256_fmadd_pd(acc, x, _mm256_set1_pd(c)), rest...);
}

template <typename... Rest>
inline __m256d polevl(__m256d x, double lead, Rest... rest) {
  return horner(x, _mm256_set1_pd(lead), rest...);
}

/// Polynomial with an implicit leading coefficient of 1.
template <typename... Rest>
inline __m256d p1evl(__m256d x, Rest... rest) {
  return horner(x, _mm256_set1_pd(1.0), rest...);
}

inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39641853226410622);
  const __m256d hi = _mm256_set1_pd(709.78271289338399678);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);

  // Taylor polynomial of degree 13 on |r| <= ln(2)/2; truncation error < 1e-17.
  __m256d r = polevl(x, 1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                     1.0 / 3628800.0, 1.0 / 362880.0, 1.0 / 40320.0, 1.0 / 5040.0, 1.0 / 720.0,
                     1.0 / 120.0, 1.0 / 24.0, 1.0 / 6.0, 0.5, 1.0, 1.0);

  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
  return _mm256_andnot_pd(underflow, r);
}

/// Natural log for positive normal inputs.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);
  const __m256i pick = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
  const __m128i e32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(exp_field, pick));
  __m256d e = _mm256_sub_pd(_mm256_cvtepi32_pd(e32), _mm256_set1_pd(1022.0));

  const __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
      _mm256_set1_epi64x(0x3fe0000000000000LL));
  const __m256d m = _mm256_castsi256_pd(mant_bits);  // in [0.5, 1)

  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d xr = _mm256_blendv_pd(_mm256_sub_pd(m, one),
                                      _mm256_sub_pd(_mm256_add_pd(m, m), one), small);

  const __m256d z = _mm256_mul_pd(xr, xr);
  const __m256d p = polevl(xr, 1.01875663804580931796E-4, 4.97494994976747001425E-1,
                           4.70579119878881725854E0, 1.44989225341610930846E1,
                           1.79368678507819816313E1, 7.70838733755885391666E0);
  const __m256d q = p1evl(xr, 1.12873587189167450590E1, 4.52279145837532221105E1,
                          8.29875266912776603211E1, 7.11544750618563894466E1,
                          2.31251620126765340583E1);
  __m256d y = _mm256_mul_pd(xr, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), y);
  __m256d r = _mm256_add_pd(xr, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline bool any(__m256d mask) { return _mm256_movemask_pd(mask) != 0; }

/// Complementary error function, all finite inputs.
inline __m256d erfc_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ax = abs_pd(x);
  const __m256d xx = _mm256_mul_pd(x, x);
  const __m256d near = _mm256_cmp_pd(ax, one, _CMP_LT_OQ);
  const __m256d mid = _mm256_andnot_pd(near, _mm256_cmp_pd(ax, _mm256_set1_pd(8.0), _CMP_LT_OQ));
  const __m256d far = _mm256_cmp_pd(ax, _mm256_set1_pd(8.0), _CMP_GE_OQ);

  __m256d result = _mm256_setzero_pd();
  if (any(near)) {
    const __m256d t = polevl(xx, 9.60497373987051638749E0, 9.00260197203842689217E1,
                             2.23200534594684319226E3, 7.00332514112805075473E3,
                             5.55923013010394962768E4);
    const __m256d u = p1evl(xx, 3.35617141647503099647E1, 5.21357949780152679795E2,
                            4.59432382970980127987E3, 2.26290000613890934246E4,
                            4.92673942608635921086E4);
    const __m256d erf = _mm256_div_pd(_mm256_mul_pd(x, t), u);
    result = _mm256_blendv_pd(result, _mm256_sub_pd(one, erf), near);
  }
  if (any(_mm256_or_pd(mid, far))) {
    const __m256d ez = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), xx));
    __m256d tail = _mm256_setzero_pd();
    if (any(mid)) {
      const __m256d p = polevl(ax, 2.46196981473530512524E-10, 5.64189564831068821977E-1,
                               7.46321056442269912687E0, 4.86371970985681366614E1,
                               1.96520832956077098242E2, 5.26445194995477358631E2,
                               9.34528527171957607540E2, 1.02755188689515710272E3,
                               5.57535335369399327526E2);
      const __m256d q = p1evl(ax, 1.32281951154744992508E1, 8.67072140885989742329E1,
                              3.54937778887819891062E2, 9.75708501743205489753E2,
                              1.82390916687909736289E3, 2.24633760818710981792E3,
                              1.65666309194161350182E3, 5.57535340817727675546E2);
      tail = _mm256_blendv_pd(tail, _mm256_div_pd(_mm256_mul_pd(ez, p), q), mid);
    }
    if (any(far)) {
      const __m256d p = polevl(ax, 5.64189583547755073984E-1, 1.27536670759978104416E0,
                               5.01905042251180477414E0, 6.16021097993053585195E0,
                               7.40974269950448939160E0, 2.97886665372100240670E0);
      const __m256d q = p1evl(ax, 2.26052863220117276590E0, 9.39603524938001434673E0,
                              1.20489539808096656605E1, 1.70814450747565897222E1,
                              9.60896809063285878198E0, 3.36907645100081516050E0);
      tail = _mm256_blendv_pd(tail, _mm256_div_pd(_mm256_mul_pd(ez, p), q), far);
    }
    const __m256d negative = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    tail = _mm256_blendv_pd(tail, _mm256_sub_pd(two, tail), negative);
    result = _mm256_blendv_pd(tail, result, near);
  }
  return result;
}

/// Standard normal cdf.
inline __m256d norm_cdf_pd(__m256d x) {
  return _mm256_mul_pd(_mm256_set1_pd(0.5),
                       erfc_pd(_mm256_mul_pd(x, _mm256_set1_pd(-0.70710678118654752440))));
}

}  // namespace skewirt::kernels::avx2

// Compiled with -mavx2 -mfma. Nothing in here may run before dispatch.cpp has
// confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "hardynorm/kernels.hpp"

namespace hardynorm::kernels::detail::avx2 {

namespace {

// log and exp follow the fdlibm reductions and minimax coefficients; both are
// accurate to about one ulp on the ranges used here.

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline __m256d int_to_double(__m256i small_nonneg) {
  // Valid for integers in [0, 2^52).
  const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000LL);
  return _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(small_nonneg, magic_bits)),
      set1(4503599627370496.0));
}

/// log(x) for x > 0 finite, subnormals included.
inline __m256d vlog(__m256d x) {
  const __m256d tiny = set1(2.2250738585072014e-308);
  const __m256d is_sub = _mm256_cmp_pd(x, tiny, _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, set1(0x1.0p54)), is_sub);
  __m256d k_adj = _mm256_and_pd(is_sub, set1(-54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);
  __m256d k = _mm256_add_pd(_mm256_sub_pd(int_to_double(exp_field), set1(1023.0)), k_adj);

  const __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);
  const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  k = _mm256_add_pd(k, _mm256_and_pd(big, set1(1.0)));

  const __m256d f = _mm256_sub_pd(m, set1(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(set1(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  __m256d t1 = _mm256_fmadd_pd(w, set1(1.531383769920937332e-01), set1(2.222219843214978396e-01));
  t1 = _mm256_fmadd_pd(w, t1, set1(3.999999999940941908e-01));
  t1 = _mm256_mul_pd(w, t1);
  __m256d t2 = _mm256_fmadd_pd(w, set1(1.479819860511658591e-01), set1(1.818357216161805012e-01));
  t2 = _mm256_fmadd_pd(w, t2, set1(2.857142874366239149e-01));
  t2 = _mm256_fmadd_pd(w, t2, set1(6.666666666666735130e-01));
  t2 = _mm256_mul_pd(z, t2);
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(set1(0.5), _mm256_mul_pd(f, f));

  const __m256d ln2_hi = set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = set1(1.90821492927058770002e-10);
  // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
  const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)),
                                      _mm256_mul_pd(k, ln2_lo));
  return _mm256_sub_pd(_mm256_mul_pd(k, ln2_hi),
                       _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

/// exp(x); returns 0 below -708 and saturates the input at 709.
inline __m256d vexp(__m256d x) {
  const __m256d underflow = _mm256_cmp_pd(x, set1(-708.0), _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, set1(-708.0)), set1(709.0));

  const __m256d kd = _mm256_round_pd(_mm256_mul_pd(x, set1(1.44269504088896338700e+00)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_sub_pd(x, _mm256_mul_pd(kd, set1(6.93147180369123816490e-01)));
  const __m256d lo = _mm256_mul_pd(kd, set1(1.90821492927058770002e-10));
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d t = _mm256_mul_pd(r, r);
  __m256d poly = _mm256_fmadd_pd(t, set1(4.13813679705723846039e-08), set1(-1.65339022054652515390e-06));
  poly = _mm256_fmadd_pd(t, poly, set1(6.61375632143793436117e-05));
  poly = _mm256_fmadd_pd(t, poly, set1(-2.77777777770155933842e-03));
  poly = _mm256_fmadd_pd(t, poly, set1(1.66666666666666019037e-01));
  const __m256d c = _mm256_sub_pd(r, _mm256_mul_pd(t, poly));
  // y = 1 - ((lo - (r*c)/(2-c)) - hi)
  const __m256d rc = _mm256_div_pd(_mm256_mul_pd(r, c), _mm256_sub_pd(set1(2.0), c));
  const __m256d y = _mm256_sub_pd(set1(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, rc), hi));

  // 2^k through the exponent field; k in [-1021, 1023] after the clamp.
  const __m256d shifter = set1(6755399441055744.0);  // 1.5 * 2^52
  const __m256i k_int = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(kd, shifter)),
                                         _mm256_castpd_si256(shifter));
  const __m256i scale_bits =
      _mm256_slli_epi64(_mm256_add_epi64(k_int, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(y, _mm256_castsi256_pd(scale_bits));
  return _mm256_andnot_pd(underflow, result);
}

inline __m256d vabs(__m256d x) {
  return _mm256_andnot_pd(set1(-0.0), x);
}

/// |x|^p for p > 0; 0^p = 0.
inline __m256d vabs_pow(__m256d x, __m256d p) {
  const __m256d ax = vabs(x);
  const __m256d zero = _mm256_cmp_pd(ax, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d safe = _mm256_blendv_pd(ax, set1(1.0), zero);
  const __m256d r = vexp(_mm256_mul_pd(p, vlog(safe)));
  return _mm256_andnot_pd(zero, r);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

GapResult max_majorant_gap(const MajorantArgs& a, double lo, double hi,
                           std::size_t n) {
  const double y_pow = std::pow(std::abs(a.y), a.p - 2.0) * a.y;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  const __m256d vp = set1(a.p);
  const __m256d vly = set1(a.lambda * a.y);
  const __m256d vc = set1(a.c_pow_p);
  const __m256d vslope = set1(a.slope * y_pow);
  const __m256d vshift = set1(a.gamma * a.y);
  const __m256d vlo = set1(lo);
  const __m256d vstep = set1(step);

  __m256d best = set1(-HUGE_VAL);
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_add_pd(vlo, _mm256_mul_pd(idx, vstep));
    const __m256d v = _mm256_sub_pd(vabs_pow(_mm256_sub_pd(x, vly), vp),
                                    _mm256_mul_pd(vc, vabs_pow(x, vp)));
    const __m256d u = _mm256_mul_pd(vslope, _mm256_sub_pd(x, vshift));
    const __m256d gap = _mm256_sub_pd(v, u);
    const __m256d gt = _mm256_cmp_pd(gap, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, gap, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
    idx = _mm256_add_pd(idx, set1(4.0));
  }

  alignas(32) double lane_best[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_best, best);
  _mm256_store_pd(lane_idx, best_idx);
  GapResult out{-HUGE_VAL, 0};
  for (int l = 0; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_idx[l]);
    if (lane_best[l] > out.max_gap ||
        (lane_best[l] == out.max_gap && li < out.index)) {
      out = {lane_best[l], li};
    }
  }
  for (; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = std::pow(std::abs(x - a.lambda * a.y), a.p) -
                     a.c_pow_p * std::pow(std::abs(x), a.p);
    const double gap = v - a.slope * y_pow * (x - a.gamma * a.y);
    if (gap > out.max_gap) out = {gap, i};
  }
  return out;
}

void abs_pow(const double* v, std::size_t n, double p, double* out) {
  const __m256d vp = set1(p);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, vabs_pow(_mm256_loadu_pd(v + i), vp));
  }
  for (; i < n; ++i) out[i] = std::pow(std::abs(v[i]), p);
}

double weighted_power_sum(const double* w, const double* v, std::size_t n,
                          double p) {
  const __m256d vp = set1(p);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i),
                          vabs_pow(_mm256_loadu_pd(v + i), vp), acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += w[i] * std::pow(std::abs(v[i]), p);
  return sum;
}

double weighted_modulus_power_sum(const double* w, const double* re,
                                  const double* im, std::size_t n, double p) {
  const __m256d half_p = set1(0.5 * p);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    const __m256d sq = _mm256_fmadd_pd(r, r, _mm256_mul_pd(m, m));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs_pow(sq, half_p), acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    sum += w[i] * std::pow(re[i] * re[i] + im[i] * im[i], 0.5 * p);
  }
  return sum;
}

}  // namespace hardynorm::kernels::detail::avx2

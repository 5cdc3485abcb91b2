// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.
#include "kernels_impl.hpp"

#if defined(SEQGLR_HAVE_AVX2_TU)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqglr::kernels::detail {

namespace {

inline __m256d exp_pd(__m256d x) {
  const __m256d lo_cut = _mm256_set1_pd(-708.0);
  const __m256d hi_cut = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(0.693147180369123816490), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
  // Taylor series to degree 13; |r| <= ln2/2 keeps the truncation near 1e-18.
  static const double c[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                             1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                             1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                             1.0 / 24.0,         1.0 / 6.0,         0.5,
                             1.0,                1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  const __m256d out = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_blendv_pd(out, _mm256_setzero_pd(), underflow);
}

// Natural log for finite positive normal inputs.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256i e = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                                       _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_epi64(e, _mm256_and_si256(_mm256_castpd_si256(big), _mm256_set1_epi64x(1)));
  // int64 -> double for small magnitudes via the 2^52 + 2^51 bias trick.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256d ed = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(e, _mm256_castpd_si256(magic))), magic);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 21.0);
  for (int j = 19; j >= 1; j -= 2) p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / j));
  const __m256d logm = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
  return _mm256_fmadd_pd(ed, _mm256_set1_pd(0.6931471805599453), logm);
}

inline __m256d line_values(const double* logw, const double* d, const double* l, const double* z,
                           __m256d n, __m256d xbar) {
  const __m256d slope_part =
      _mm256_fmadd_pd(_mm256_loadu_pd(l), _mm256_sub_pd(xbar, _mm256_loadu_pd(z)),
                      _mm256_loadu_pd(d));
  return _mm256_fmadd_pd(n, slope_part, _mm256_loadu_pd(logw));
}

inline double hmax(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return std::max(std::max(t[0], t[1]), std::max(t[2], t[3]));
}

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

}  // namespace

ScanResult scan_avx2(double g, double log_r, int64_t k_lo, int64_t k_hi, int patience) {
  ScanResult best{std::numeric_limits<double>::infinity(), k_lo};
  double prev = std::numeric_limits<double>::infinity();
  int rising = 0;
  const __m256d gv = _mm256_set1_pd(g);
  const __m256d lr = _mm256_set1_pd(log_r);
  alignas(32) double vals[4];
  for (int64_t base = k_lo; base <= k_hi; base += 4) {
    const double b = static_cast<double>(base);
    const __m256d kd = _mm256_setr_pd(b, b + 1.0, b + 2.0, b + 3.0);
    const __m256d v = _mm256_fnmadd_pd(gv, exp_pd(_mm256_div_pd(lr, kd)), log_pd(kd));
    _mm256_store_pd(vals, v);
    const int64_t lanes = std::min<int64_t>(4, k_hi - base + 1);
    for (int64_t j = 0; j < lanes; ++j) {
      const double x = vals[j];
      if (x < best.log_value) best = {x, base + j};
      rising = x > prev ? rising + 1 : 0;
      if (patience > 0 && rising >= patience) return best;
      prev = x;
    }
  }
  return best;
}

double mixture_avx2(const double* logw, const double* d, const double* l, const double* z,
                    std::size_t count, double n, double xbar) {
  if (count == 0) return -std::numeric_limits<double>::infinity();
  const __m256d nv = _mm256_set1_pd(n);
  const __m256d xv = _mm256_set1_pd(xbar);
  const std::size_t body = count & ~static_cast<std::size_t>(3);
  double top = -std::numeric_limits<double>::infinity();
  if (body > 0) {
    __m256d mv = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < body; k += 4) {
      mv = _mm256_max_pd(mv, line_values(logw + k, d + k, l + k, z + k, nv, xv));
    }
    top = hmax(mv);
  }
  for (std::size_t k = body; k < count; ++k) {
    top = std::max(top, logw[k] + n * (d[k] + l[k] * (xbar - z[k])));
  }
  if (!std::isfinite(top)) return top;
  const __m256d tv = _mm256_set1_pd(top);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < body; k += 4) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(
                                 line_values(logw + k, d + k, l + k, z + k, nv, xv), tv)));
  }
  double sum = body > 0 ? hsum(acc) : 0.0;
  for (std::size_t k = body; k < count; ++k) {
    sum += std::exp(logw[k] + n * (d[k] + l[k] * (xbar - z[k])) - top);
  }
  return top + std::log(sum);
}

double max_avx2(const double* logw, const double* d, const double* l, const double* z,
                std::size_t count, double n, double xbar) {
  const __m256d nv = _mm256_set1_pd(n);
  const __m256d xv = _mm256_set1_pd(xbar);
  const std::size_t body = count & ~static_cast<std::size_t>(3);
  double top = -std::numeric_limits<double>::infinity();
  if (body > 0) {
    __m256d mv = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < body; k += 4) {
      mv = _mm256_max_pd(mv, line_values(logw + k, d + k, l + k, z + k, nv, xv));
    }
    top = hmax(mv);
  }
  for (std::size_t k = body; k < count; ++k) {
    top = std::max(top, logw[k] + n * (d[k] + l[k] * (xbar - z[k])));
  }
  return top;
}

}  // namespace seqglr::kernels::detail

#endif

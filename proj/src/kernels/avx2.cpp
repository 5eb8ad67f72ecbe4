// AVX2/FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be reached after a runtime CPU check.
#include "backends.hpp"

#include <immintrin.h>

#include <cmath>

namespace levy::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void project_rows_avx2(const double* rows, std::size_t n, std::size_t d, const double* xi,
                       double* out) {
  std::size_t k = 0;
  if (d == 1) {
    const __m256d w = _mm256_set1_pd(xi[0]);
    for (; k + 4 <= n; k += 4) _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(rows + k), w));
  } else {
    const __m256i stride = _mm256_set_epi64x(3 * static_cast<long long>(d),
                                             2 * static_cast<long long>(d),
                                             static_cast<long long>(d), 0);
    for (; k + 4 <= n; k += 4) {
      const double* r = rows + k * d;
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j < d; ++j) {
        const __m256d col = _mm256_i64gather_pd(r + j, stride, 8);
        acc = _mm256_fmadd_pd(col, _mm256_set1_pd(xi[j]), acc);
      }
      _mm256_storeu_pd(out + k, acc);
    }
  }
  for (; k < n; ++k) {
    const double* r = rows + k * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[j] * xi[j];
    out[k] = s;
  }
}

// sin/cos on [-pi/4, pi/4] (Cephes minimax coefficients).
inline __m256d poly_sin(__m256d y, __m256d z) {
  __m256d p = _mm256_set1_pd(1.58962301576546568060e-10);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.50507477628578072866e-8));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.75573136213857245213e-6));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.98412698295895385996e-4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(8.33333333332211858878e-3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.66666666666666307295e-1));
  return _mm256_fmadd_pd(_mm256_mul_pd(y, z), p, y);
}

inline __m256d poly_cos(__m256d z) {
  __m256d p = _mm256_set1_pd(-1.13585365213876817300e-11);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.08757008419747316778e-9));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.75573141792967388112e-7));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.48015872888517045348e-5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.38888888888730564116e-3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.16666666666665929218e-2));
  const __m256d zz = _mm256_mul_pd(z, z);
  return _mm256_fmadd_pd(zz, p, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));
}

inline __m256d mask_from_epi32(__m128i m) {
  return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(m));
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(0.63661977236758134308)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d y = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.57079632673412561417e+00), x);
  y = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.07710050630396597660e-11), y);
  y = _mm256_fnmadd_pd(k, _mm256_set1_pd(2.02226624871116645580e-21), y);
  const __m256d z = _mm256_mul_pd(y, y);
  const __m256d sy = poly_sin(y, z);
  const __m256d cy = poly_cos(z);

  const __m128i q = _mm256_cvtpd_epi32(k);
  const __m128i one = _mm_set1_epi32(1);
  const __m128i two = _mm_set1_epi32(2);
  const __m256d swap = mask_from_epi32(_mm_cmpeq_epi32(_mm_and_si128(q, one), one));
  const __m256d neg_s = mask_from_epi32(_mm_cmpeq_epi32(_mm_and_si128(q, two), two));
  const __m256d neg_c =
      mask_from_epi32(_mm_cmpeq_epi32(_mm_and_si128(_mm_add_epi32(q, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d s = _mm256_blendv_pd(sy, cy, swap);
  const __m256d c = _mm256_blendv_pd(cy, sy, swap);
  s_out = _mm256_xor_pd(s, _mm256_and_pd(neg_s, sign));
  c_out = _mm256_xor_pd(c, _mm256_and_pd(neg_c, sign));
}

void sum_cos_sin_avx2(const double* x, std::size_t n, double* cos_sum, double* sin_sum) {
  const __m256d limit = _mm256_set1_pd(detail::kTrigReductionLimit);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  __m256d cacc = _mm256_setzero_pd();
  __m256d sacc = _mm256_setzero_pd();
  double c_fix = 0.0, s_fix = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d xv = _mm256_loadu_pd(x + k);
    const __m256d big = _mm256_cmp_pd(_mm256_and_pd(xv, abs_mask), limit, _CMP_GT_OQ);
    const int big_bits = _mm256_movemask_pd(big);
    if (big_bits != 0) {
      for (int l = 0; l < 4; ++l) {
        if (big_bits & (1 << l)) {
          c_fix += std::cos(x[k + l]);
          s_fix += std::sin(x[k + l]);
        }
      }
      xv = _mm256_andnot_pd(big, xv);
    }
    __m256d s, c;
    sincos4(xv, s, c);
    cacc = _mm256_add_pd(cacc, _mm256_andnot_pd(big, c));
    sacc = _mm256_add_pd(sacc, _mm256_andnot_pd(big, s));
  }
  double cs = hsum(cacc) + c_fix;
  double ss = hsum(sacc) + s_fix;
  for (; k < n; ++k) {
    cs += std::cos(x[k]);
    ss += std::sin(x[k]);
  }
  *cos_sum = cs;
  *sin_sum = ss;
}

double weighted_pair_sum_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(a + k));
    acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + k), acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * a[k] * b[k];
  return s;
}

double weighted_abs_diff_sum_avx2(const double* p, const double* q, const double* w,
                                  std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(p + k), _mm256_loadu_pd(q + k));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), _mm256_and_pd(diff, abs_mask), acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * std::fabs(p[k] - q[k]);
  return s;
}

const KernelTable kAvx2 = {Backend::Avx2,          dot_avx2,
                           project_rows_avx2,      sum_cos_sin_avx2,
                           weighted_pair_sum_avx2, weighted_abs_diff_sum_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace levy::kernels

// AArch64 NEON kernels (two double lanes). Advanced SIMD is mandatory on
// AArch64, so no runtime feature probe is needed beyond the build check.
#include "backends.hpp"

#include <arm_neon.h>

#include <cmath>

namespace levy::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void project_rows_neon(const double* rows, std::size_t n, std::size_t d, const double* xi,
                       double* out) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const double* r = rows + k * d;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < d; ++j) {
      const double pair[2] = {r[j], r[d + j]};
      acc = vfmaq_n_f64(acc, vld1q_f64(pair), xi[j]);
    }
    vst1q_f64(out + k, acc);
  }
  for (; k < n; ++k) {
    const double* r = rows + k * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[j] * xi[j];
    out[k] = s;
  }
}

inline float64x2_t horner(float64x2_t z, const double* c, int count) {
  float64x2_t p = vdupq_n_f64(c[0]);
  for (int i = 1; i < count; ++i) p = vfmaq_f64(vdupq_n_f64(c[i]), p, z);
  return p;
}

constexpr double kSinCoef[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                                2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                                8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCosCoef[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                                -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                                -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline void sincos2(float64x2_t x, float64x2_t& s_out, float64x2_t& c_out) {
  const float64x2_t k = vrndnq_f64(vmulq_n_f64(x, 0.63661977236758134308));
  float64x2_t y = vfmsq_n_f64(x, k, 1.57079632673412561417e+00);
  y = vfmsq_n_f64(y, k, 6.07710050630396597660e-11);
  y = vfmsq_n_f64(y, k, 2.02226624871116645580e-21);
  const float64x2_t z = vmulq_f64(y, y);
  const float64x2_t sy = vfmaq_f64(y, vmulq_f64(y, z), horner(z, kSinCoef, 6));
  const float64x2_t cy =
      vfmaq_f64(vfmsq_n_f64(vdupq_n_f64(1.0), z, 0.5), vmulq_f64(z, z), horner(z, kCosCoef, 6));

  const int64x2_t q = vcvtq_s64_f64(k);
  const uint64x2_t swap = vtstq_s64(q, vdupq_n_s64(1));
  const uint64x2_t neg_s = vtstq_s64(q, vdupq_n_s64(2));
  const uint64x2_t neg_c = vtstq_s64(vaddq_s64(q, vdupq_n_s64(1)), vdupq_n_s64(2));
  const float64x2_t s = vbslq_f64(swap, cy, sy);
  const float64x2_t c = vbslq_f64(swap, sy, cy);
  const uint64x2_t sign = vdupq_n_u64(0x8000000000000000ull);
  s_out = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(s), vandq_u64(neg_s, sign)));
  c_out = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(c), vandq_u64(neg_c, sign)));
}

void sum_cos_sin_neon(const double* x, std::size_t n, double* cos_sum, double* sin_sum) {
  const float64x2_t limit = vdupq_n_f64(detail::kTrigReductionLimit);
  float64x2_t cacc = vdupq_n_f64(0.0);
  float64x2_t sacc = vdupq_n_f64(0.0);
  double c_fix = 0.0, s_fix = 0.0;
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t xv = vld1q_f64(x + k);
    const uint64x2_t big = vcagtq_f64(xv, limit);
    if (vmaxvq_u32(vreinterpretq_u32_u64(big)) != 0) {
      for (int l = 0; l < 2; ++l) {
        if (std::fabs(x[k + l]) > detail::kTrigReductionLimit) {
          c_fix += std::cos(x[k + l]);
          s_fix += std::sin(x[k + l]);
        }
      }
      xv = vbslq_f64(big, vdupq_n_f64(0.0), xv);
    }
    float64x2_t s, c;
    sincos2(xv, s, c);
    cacc = vaddq_f64(cacc, vbslq_f64(big, vdupq_n_f64(0.0), c));
    sacc = vaddq_f64(sacc, vbslq_f64(big, vdupq_n_f64(0.0), s));
  }
  double cs = vaddvq_f64(cacc) + c_fix;
  double ss = vaddvq_f64(sacc) + s_fix;
  for (; k < n; ++k) {
    cs += std::cos(x[k]);
    ss += std::sin(x[k]);
  }
  *cos_sum = cs;
  *sin_sum = ss;
}

double weighted_pair_sum_neon(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2)
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + k), vld1q_f64(a + k)), vld1q_f64(b + k));
  double s = vaddvq_f64(acc);
  for (; k < n; ++k) s += w[k] * a[k] * b[k];
  return s;
}

double weighted_abs_diff_sum_neon(const double* p, const double* q, const double* w,
                                  std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2)
    acc = vfmaq_f64(acc, vld1q_f64(w + k), vabdq_f64(vld1q_f64(p + k), vld1q_f64(q + k)));
  double s = vaddvq_f64(acc);
  for (; k < n; ++k) s += w[k] * std::fabs(p[k] - q[k]);
  return s;
}

const KernelTable kNeon = {Backend::Neon,          dot_neon,
                           project_rows_neon,      sum_cos_sin_neon,
                           weighted_pair_sum_neon, weighted_abs_diff_sum_neon};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace levy::kernels

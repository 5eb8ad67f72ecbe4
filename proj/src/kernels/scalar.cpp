#include "backends.hpp"

#include <cmath>

namespace levy::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void project_rows_scalar(const double* rows, std::size_t n, std::size_t d, const double* xi,
                         double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    const double* r = rows + k * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[j] * xi[j];
    out[k] = s;
  }
}

void sum_cos_sin_scalar(const double* x, std::size_t n, double* cos_sum, double* sin_sum) {
  double c = 0.0, s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c += std::cos(x[k]);
    s += std::sin(x[k]);
  }
  *cos_sum = c;
  *sin_sum = s;
}

double weighted_pair_sum_scalar(const double* w, const double* a, const double* b,
                                std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * a[k] * b[k];
  return s;
}

double weighted_abs_diff_sum_scalar(const double* p, const double* q, const double* w,
                                    std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * std::fabs(p[k] - q[k]);
  return s;
}

const KernelTable kScalar = {Backend::Scalar,          dot_scalar,
                             project_rows_scalar,      sum_cos_sin_scalar,
                             weighted_pair_sum_scalar, weighted_abs_diff_sum_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace levy::kernels

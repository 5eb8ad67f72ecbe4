#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace levy::kernels {

enum class Backend { Scalar, Avx2, Neon };

/// Function table implemented once per instruction set. The scalar table is
/// the reference; vector tables must agree with it up to reassociation of
/// floating-point sums.
struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// out[k] = <rows[k*d .. k*d+d), xi>
  void (*project_rows)(const double* rows, std::size_t n, std::size_t d, const double* xi,
                       double* out);
  /// Sum of cos(x[k]) and sin(x[k]).
  void (*sum_cos_sin)(const double* x, std::size_t n, double* cos_sum, double* sin_sum);
  /// sum w[k] * a[k] * b[k]
  double (*weighted_pair_sum)(const double* w, const double* a, const double* b, std::size_t n);
  /// sum w[k] * |p[k] - q[k]|
  double (*weighted_abs_diff_sum)(const double* p, const double* q, const double* w,
                                  std::size_t n);
};

const KernelTable& scalar_table();
bool available(Backend b);
const KernelTable& table(Backend b);

/// Best backend the running CPU supports, unless LEVY_SIMD=scalar is set.
const KernelTable& active();
std::string_view backend_name(Backend b);
std::vector<Backend> available_backends();

}  // namespace levy::kernels

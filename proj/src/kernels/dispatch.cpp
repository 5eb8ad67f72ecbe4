#include "backends.hpp"

#include "levy/error.hpp"

#include <cstdlib>
#include <string>

namespace levy::kernels {

namespace detail {
#ifndef LEVY_HAVE_AVX2_KERNELS
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef LEVY_HAVE_NEON_KERNELS
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(LEVY_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& pick() {
  if (const char* env = std::getenv("LEVY_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return scalar_table();
    if (want == "avx2" && available(Backend::Avx2)) return *detail::avx2_table();
    if (want == "neon" && available(Backend::Neon)) return *detail::neon_table();
  }
  if (available(Backend::Avx2)) return *detail::avx2_table();
  if (available(Backend::Neon)) return *detail::neon_table();
  return scalar_table();
}

}  // namespace

bool available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Backend::Neon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (!available(b))
    throw UnsupportedModelError("kernel backend " + std::string(backend_name(b)) +
                                " is not available on this machine");
  switch (b) {
    case Backend::Avx2:
      return *detail::avx2_table();
    case Backend::Neon:
      return *detail::neon_table();
    default:
      return scalar_table();
  }
}

const KernelTable& active() {
  static const KernelTable& chosen = pick();
  return chosen;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
    if (available(b)) out.push_back(b);
  return out;
}

}  // namespace levy::kernels

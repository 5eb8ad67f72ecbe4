#pragma once

#include "levy/kernels.hpp"

namespace levy::kernels::detail {

const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Inputs with magnitude above this go through std::cos/std::sin in every
/// backend; below it the vector reduction by pi/2 is exact to a few ulp.
inline constexpr double kTrigReductionLimit = 1.0e6;

}  // namespace levy::kernels::detail

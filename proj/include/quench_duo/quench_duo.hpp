#pragma once

// Umbrella header for the numerical library (the appio layer is included separately).

#include "quench_duo/eigenstates.hpp"
#include "quench_duo/errors.hpp"
#include "quench_duo/grid.hpp"
#include "quench_duo/observables.hpp"
#include "quench_duo/parallel.hpp"
#include "quench_duo/quadrature.hpp"
#include "quench_duo/quench.hpp"
#include "quench_duo/specfun.hpp"
#include "quench_duo/spectrum.hpp"

namespace quench_duo {
inline constexpr const char* kVersion = "1.0.0";
}  // namespace quench_duo

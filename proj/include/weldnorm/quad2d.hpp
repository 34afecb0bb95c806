#pragma once

#include <functional>

#include "weldnorm/sphere.hpp"

namespace weldnorm {

struct QuadratureConfig;
struct QuadratureDiagnostics;

/// \int_D F dA over the unit disk, in polar coordinates: Gauss-Legendre radially on
/// [0, 1-delta], uniform midpoint grid in the angle, and a dyadically refined
/// boundary layer on [1-delta, 1]. Doubles resolution until the target relative
/// tolerance is met; returns +infinity under the divergence rules.
double disk_integral(const std::function<double(Complex)>& F, const QuadratureConfig& cfg,
                     QuadratureDiagnostics* diag = nullptr);

}  // namespace weldnorm

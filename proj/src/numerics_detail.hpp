#pragma once

namespace fheston::detail {

/// int_0^t (t - s)^d exp(-kappa s) ds for d > -1, kappa >= 0, t >= 0.
double kernel_exp_integral(double d, double kappa, double t);

}  // namespace fheston::detail

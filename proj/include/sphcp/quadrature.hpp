#pragma once

#include <functional>

namespace sphcp {

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] to the given
/// absolute tolerance. Throws numerical_error if the interval budget is
/// exhausted before the tolerance is met.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_intervals = 4000);

}  // namespace sphcp

#pragma once

#include <functional>
#include <vector>

namespace specseg::detail {

/// Adaptive Simpson with Richardson correction on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 50);

/// Integral over [a, b] split at the given interior points (points outside
/// (a, b) are ignored), each piece integrated by adaptive_simpson.
double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breakpoints, double abs_tol);

}  // namespace specseg::detail

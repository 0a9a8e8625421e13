#pragma once

#include <functional>

namespace povmlab {

/// Adaptive Simpson integration of f over [a, b] to the given absolute
/// tolerance. Endpoints should already coincide with any kink of f; the
/// callers split at interval breakpoints before integrating.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

}  // namespace povmlab

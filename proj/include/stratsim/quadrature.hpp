#pragma once

#include <functional>

namespace stratsim {

/// Composite Gauss-Legendre integration with node doubling until two
/// successive refinements agree to rel_tol (Richardson-style acceptance).
/// Throws on non-convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10);

}  // namespace stratsim

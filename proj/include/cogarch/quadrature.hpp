#pragma once

#include <functional>

namespace cogarch {

// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to an absolute
// tolerance. Throws std::runtime_error when the subdivision budget is spent
// before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

// Integral over [a, inf) for integrands with eventually geometric decay:
// panels [a, a+w], [a+w, a+2w], [a+2w, a+4w], ... are added until three
// consecutive panels fall below the tolerance.
double integrate_half_line(const std::function<double(double)>& f, double a,
                           double initial_width, double abs_tol);

}  // namespace cogarch

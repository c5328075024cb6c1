#pragma once

// Small quadrature toolkit: recursive adaptive Simpson on finite
// intervals, and a periodic trapezoid rule with interval doubling
// (spectrally accurate for smooth periodic integrands).

#include <cstddef>
#include <functional>

namespace seqreg {

using Integrand = std::function<double(double)>;

// Adaptive Simpson on [a, b]; refines until the local error estimate is
// below tol (distributed over subintervals). Throws QuadratureFailure once
// more than max_eval evaluations have been spent.
double adaptive_simpson(const Integrand& f, double a, double b, double tol,
                        std::size_t max_eval = 1'000'000);

// Trapezoid rule on one period [0, period], doubling the point count from
// n0 until the relative change drops below rel_tol. Throws
// QuadratureFailure when max_points is reached without convergence.
double periodic_trapezoid(const Integrand& f, double period, double rel_tol,
                          std::size_t n0 = 64, std::size_t max_points = 1 << 22);

}  // namespace seqreg

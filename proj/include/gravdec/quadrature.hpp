// quadrature.hpp — adaptive quadrature wrappers (GSL QAG family)

#pragma once

#include <functional>

namespace gravdec::quadrature {

// Adaptive integral over [a, b]; throws NumericalError with the residual
// estimate when the requested tolerance cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0);

// Adaptive integral over [a, inf).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-10, double abs_tol = 0.0);

} // namespace gravdec::quadrature

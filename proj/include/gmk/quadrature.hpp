#pragma once

#include <functional>

namespace gmk::quad {

/// Adaptive integration of f over [a, b]; tolerates integrable endpoint
/// singularities.  Relative tolerance rel_tol, absolute floor abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 1e-14);

/// Adaptive integration of f over [a, +inf).
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-12, double abs_tol = 1e-14);

/// Fixed-order Gauss-Legendre panel on [a, b].  Supported orders: any n >= 1;
/// orders up to 50 use tabulated nodes, larger ones are computed once and cached.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order);

}  // namespace gmk::quad

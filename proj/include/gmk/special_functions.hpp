#pragma once

namespace gmk::sf {

/// log Gamma(x) for x > 0.  Accurate to ~1e-14 relative; throws precondition_error for x <= 0.
double log_gamma(double x);

/// Gamma(x) for x > 0, via exp(log_gamma).
double gamma_fn(double x);

/// log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a+b), a > 0, b > 0.
double log_beta(double a, double b);

/// B(a, b) for a, b > 0.
double beta_fn(double a, double b);

/// Regularized incomplete beta I_t(a, b) for a, b > 0 and t in [0, 1].
/// Monotone in t with I_0 = 0, I_1 = 1; satisfies I_t(a,b) + I_{1-t}(b,a) = 1.
double reg_inc_beta(double a, double b, double t);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x)/Gamma(a), a > 0, x >= 0.
double reg_lower_gamma(double a, double x);

/// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

}  // namespace gmk::sf

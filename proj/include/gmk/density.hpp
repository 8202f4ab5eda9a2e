#pragma once

#include <optional>

#include "gmk/params.hpp"

namespace gmk::density {

/// Radius of the cutoff sphere for q > 0; unbounded support otherwise.
std::optional<double> support_cutoff(const Params& prm);

/// [1 - (q/alpha) r^alpha]_+ for q != 0; exp(-r^alpha/alpha) plays its role at q = 0.
double bracket(const Params& prm, double r);

/// Exponent beta = 1/q - n/alpha - 1 applied to the bracket (q != 0 only).
double profile_exponent(const Params& prm);

/// Unnormalized radial profile U(r): bracket^beta for q != 0, exp(-r^alpha/alpha) for q = 0.
/// Zero at and outside the cutoff radius.
double unnormalized_profile(const Params& prm, double r);

/// Normalizing constant Z = integral of U(|x|) over R^n, in closed form
/// (gamma function at q = 0, beta functions otherwise).
double normalizer(const Params& prm);

/// Z recomputed by adaptive radial quadrature; cross-validation route for the closed form.
double normalizer_by_quadrature(const Params& prm, double rel_tol = 1e-11);

/// Density value g(x) as a function of r = |x|.
double density_at(const Params& prm, double r);

/// Mass of the centered ball of radius rho under g; reaches 1 at the cutoff (q > 0)
/// or asymptotically (q <= 0).  Closed form via regularized incomplete beta/gamma.
double ball_mass(const Params& prm, double rho);

/// -log of the unnormalized profile at radius t >= 0; the convexity of
/// omega(e^s) in s drives the dimensional comparison arguments.
double omega(const Params& prm, double t);

/// integral_0^rho bracket^{beta-1} r^{n+alpha-1} dr (q != 0), or
/// integral_0^rho exp(-r^alpha/alpha) r^{n+alpha-1} dr (q = 0).
/// Appears in the divergence identity linking surface and volume functionals.
/// For q in [alpha/(n+alpha), alpha/n) the closed form is unavailable and an
/// adaptive quadrature is used; rho must then lie strictly inside the support.
double radial_alpha_moment(const Params& prm, double rho);

enum class LogProfile { LogConcave, LogConvex, PoincareRange, Unclassified };

const char* to_string(LogProfile c);

/// Classification of the radial profile by (alpha, q), with
/// LogConcave > LogConvex > PoincareRange precedence on overlaps.
LogProfile classify_log_profile(const Params& prm);

}  // namespace gmk::density

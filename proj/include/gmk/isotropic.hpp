#pragma once

#include "gmk/params.hpp"

namespace gmk::iso {

/// Phi(r) = r^(n-p) * U(r) with U the unnormalized radial profile; a constant
/// support function h = r solves the isotropic equation with right-hand side c
/// exactly when Phi(r) = c * Z.  Requires p < n and r inside the support.
double phi(const Params& prm, double r);

struct CriticalConstant {
    /// False when Phi has no interior maximum (the profile regime where it is
    /// unbounded near the cutoff, or grows at infinity for strongly negative p).
    bool exists = false;
    double c_star = 0.0;  // max Phi / Z, by guarded scalar maximization
    double r_star = 0.0;  // argmax
    /// Root of (log Phi)' = 0 solved algebraically:
    /// r^alpha = alpha (n-p) / (alpha - q (alpha + p)).
    double r_star_closed = 0.0;
    /// Alternate closed expression ((n-p)/(1 - qn/a - q + n-p))^((n-p)/alpha)
    /// carried along for comparison; the numeric value is authoritative.
    double c_star_variant = 0.0;
    double r_gap = 0.0;  // |r_star - r_star_closed| / r_star
    double c_gap = 0.0;  // |c_star - c_star_variant| / c_star
};

CriticalConstant critical_constant(const Params& prm);

enum class RootKind { TwoRoots, OneRoot, NoRoot };

struct Trichotomy {
    RootKind kind = RootKind::NoRoot;
    double r1 = 0.0;  // r1 < r2 for TwoRoots; r1 = r2 for OneRoot
    double r2 = 0.0;
    double critical_c = 0.0;
    double phi_max_arg = 0.0;
};

/// Constant solutions of the isotropic equation with constant c: two, one or
/// none according to the position of c relative to the critical constant
/// (equality decided at 1e-10 relative).  Roots satisfy
/// |Phi(r) - cZ| <= 1e-12 * cZ.
Trichotomy constant_roots(const Params& prm, double c);

struct LinearizedCoefficient {
    /// Zeroth-order coefficient of the linearization at the constant solution,
    /// obtained by numeric differentiation of the residual along the constant
    /// direction; the rotationally symmetric mode carries eigenvalue
    /// coefficient - k(k+n-2) at wavenumber k.
    double coefficient = 0.0;
    /// (n-p) + (alpha q + n q - alpha) r^alpha / (alpha - q r^alpha)
    double coefficient_closed = 0.0;
    /// Same expression with r^(alpha+1-p) in place of r^alpha, carried along
    /// for comparison only.
    double coefficient_variant = 0.0;
    /// True when the coefficient stays at distance > 1e-6 from every
    /// spherical-Laplacian eigenvalue k(k+n-2), k >= 0.
    bool invertible = false;
};

LinearizedCoefficient linearized_coefficient(const Params& prm, double r);

}  // namespace gmk::iso

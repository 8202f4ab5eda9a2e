#include "gmk/isotropic.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gmk/density.hpp"

namespace gmk::iso {
namespace {

void require_p_below_n(const Params& prm) {
    prm.validate();
    if (!(prm.p < prm.n))
        throw precondition_error("isotropic analysis requires p < n");
}

double log_phi(const Params& prm, double r) {
    const double lead = (prm.n - prm.p) * std::log(r);
    if (prm.q == 0.0) return lead - std::pow(r, prm.alpha) / prm.alpha;
    const double br = density::bracket(prm, r);
    if (br <= 0.0) return -std::numeric_limits<double>::infinity();
    return lead + density::profile_exponent(prm) * std::log(br);
}

double log_phi_prime(const Params& prm, double r) {
    const double lead = (prm.n - prm.p) / r;
    if (prm.q == 0.0) return lead - std::pow(r, prm.alpha - 1.0);
    const double beta = density::profile_exponent(prm);
    return lead - beta * prm.q * std::pow(r, prm.alpha - 1.0) / density::bracket(prm, r);
}

/// Phi has an interior maximum iff q stays below alpha/(n+alpha) and the
/// algebraic stationarity denominator alpha - q(alpha + p) is positive.
bool interior_max_exists(const Params& prm) {
    return prm.q < prm.alpha / (prm.n + prm.alpha)
           && prm.alpha - prm.q * (prm.alpha + prm.p) > 0.0;
}

}  // namespace

double phi(const Params& prm, double r) {
    require_p_below_n(prm);
    if (!(r > 0.0)) throw precondition_error("phi: r must be positive");
    if (const auto cut = density::support_cutoff(prm))
        if (r >= *cut) throw precondition_error("phi: r outside the density support");
    return std::pow(r, prm.n - prm.p) * density::unnormalized_profile(prm, r);
}

CriticalConstant critical_constant(const Params& prm) {
    require_p_below_n(prm);
    CriticalConstant out;
    if (!interior_max_exists(prm)) return out;
    out.exists = true;
    out.r_star_closed =
        std::pow(prm.alpha * (prm.n - prm.p) / (prm.alpha - prm.q * (prm.alpha + prm.p)),
                 1.0 / prm.alpha);
    // Variant closed expression: Phi evaluated at the alternate stationary
    // argument r^alpha = (n-p)/(1 - qn/alpha - q + n-p), for gap reporting.
    const double qb = 1.0 - prm.q * prm.n / prm.alpha - prm.q;
    const double variant_ra = (prm.n - prm.p) / (qb + prm.n - prm.p);
    if (variant_ra > 0.0) {
        const double rv = std::pow(variant_ra, 1.0 / prm.alpha);
        out.c_star_variant =
            std::pow(rv, prm.n - prm.p) * density::unnormalized_profile(prm, rv)
            / density::normalizer(prm);
    }

    // Bracket the stationary point by the sign of (log Phi)'.
    double hi;
    if (const auto cut = density::support_cutoff(prm)) {
        hi = *cut * (1.0 - 1e-12);
    } else {
        hi = 1.0;
        while (log_phi_prime(prm, hi) > 0.0 && hi < 1e12) hi *= 2.0;
    }
    double lo = std::min(1.0, 0.5 * hi);
    while (log_phi_prime(prm, lo) < 0.0 && lo > 1e-12) lo *= 0.5;

    // Golden-section narrowing on log Phi.
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = log_phi(prm, x1), f2 = log_phi(prm, x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = log_phi(prm, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = log_phi(prm, x1);
        }
    }
    // Bisection on the derivative sign, then a short Newton polish; the
    // derivative has a simple zero so this reaches full precision where the
    // flat maximum of Phi itself would not.
    double da = lo, db = hi;
    if (log_phi_prime(prm, a) > 0.0) da = a;
    if (log_phi_prime(prm, b) < 0.0) db = b;
    for (int it = 0; it < 200 && db - da > 1e-17 * db; ++it) {
        const double mid = 0.5 * (da + db);
        (log_phi_prime(prm, mid) > 0.0 ? da : db) = mid;
    }
    double r = 0.5 * (da + db);
    for (int it = 0; it < 5; ++it) {
        const double g = log_phi_prime(prm, r);
        const double dr = 1e-7 * r;
        const double gp = (log_phi_prime(prm, r + dr) - log_phi_prime(prm, r - dr)) / (2.0 * dr);
        if (!(gp < 0.0)) break;
        const double next = r - g / gp;
        if (!(next > da && next < db)) break;
        r = next;
    }
    out.r_star = r;
    out.c_star = phi(prm, r) / density::normalizer(prm);
    out.r_gap = std::abs(out.r_star - out.r_star_closed) / out.r_star;
    out.c_gap = std::abs(out.c_star - out.c_star_variant) / out.c_star;
    return out;
}

Trichotomy constant_roots(const Params& prm, double c) {
    require_p_below_n(prm);
    if (!(c > 0.0)) throw precondition_error("constant_roots: c must be positive");
    const CriticalConstant cc = critical_constant(prm);
    if (!cc.exists)
        throw precondition_error(
            "constant_roots: Phi has no interior maximum for these parameters");
    Trichotomy out;
    out.critical_c = cc.c_star;
    out.phi_max_arg = cc.r_star;
    if (std::abs(c - cc.c_star) <= 1e-10 * cc.c_star) {
        out.kind = RootKind::OneRoot;
        out.r1 = out.r2 = cc.r_star;
        return out;
    }
    if (c > cc.c_star) {
        out.kind = RootKind::NoRoot;
        return out;
    }
    out.kind = RootKind::TwoRoots;
    const double target = std::log(c * density::normalizer(prm));

    auto bisect = [&](double below, double above) {
        // log Phi(below) < target < log Phi(above); the root keeps Phi
        // monotone between the two abscissae.
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (below + above);
            if (mid == below || mid == above) break;
            (log_phi(prm, mid) < target ? below : above) = mid;
        }
        double r = 0.5 * (below + above);
        for (int it = 0; it < 5; ++it) {
            const double g = log_phi(prm, r) - target;
            const double gp = log_phi_prime(prm, r);
            if (gp == 0.0) break;
            const double next = r - g / gp;
            if (!(next > 0.0)) break;
            if (const auto cut = density::support_cutoff(prm))
                if (next >= *cut) break;
            r = next;
        }
        return r;
    };

    double left = cc.r_star;
    while (log_phi(prm, left) > target) left *= 0.5;
    out.r1 = bisect(left, cc.r_star);

    double right;
    if (const auto cut = density::support_cutoff(prm)) {
        right = cc.r_star;
        double span = *cut - cc.r_star;
        while (log_phi(prm, right) > target) {
            span *= 0.5;
            right = *cut - span;
        }
    } else {
        right = 2.0 * cc.r_star;
        while (log_phi(prm, right) > target) right *= 2.0;
    }
    out.r2 = bisect(right, cc.r_star);
    if (out.r1 > out.r2) std::swap(out.r1, out.r2);
    return out;
}

LinearizedCoefficient linearized_coefficient(const Params& prm, double r) {
    require_p_below_n(prm);
    const double peak_check = phi(prm, r);  // validates r inside the support
    (void)peak_check;
    LinearizedCoefficient out;
    const double a = prm.alpha, q = prm.q;
    const double ra = std::pow(r, a);
    out.coefficient_closed = (prm.n - prm.p) + (a * q + prm.n * q - a) * ra / (a - q * ra);
    out.coefficient_variant =
        (prm.n - prm.p) + (a * q + prm.n * q - a) * std::pow(r, a + 1.0 - prm.p) / (a - q * ra);

    // Numeric route: residual of the isotropic equation along the constant
    // family, E(eps) = 1 - cZ / Phi(r + eps) with cZ = Phi(r); the
    // zeroth-order coefficient is r * E'(0).
    const double czr = phi(prm, r);
    auto res = [&](double eps) { return 1.0 - czr / phi(prm, r + eps); };
    const double e = 1e-5 * r;
    const double d =
        (-res(2.0 * e) + 8.0 * res(e) - 8.0 * res(-e) + res(-2.0 * e)) / (12.0 * e);
    out.coefficient = r * d;

    double dist = std::abs(out.coefficient);  // k = 0 eigenvalue
    for (int k = 1; k * (k + prm.n - 2) <= out.coefficient + 1.0; ++k)
        dist = std::min(dist, std::abs(out.coefficient - k * (k + prm.n - 2.0)));
    out.invertible = dist > 1e-6;
    return out;
}

}  // namespace gmk::iso

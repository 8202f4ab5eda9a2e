#include "gmk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "gmk/density.hpp"
#include "gmk/quadrature.hpp"
#include "gmk/special_functions.hpp"

namespace gmk::measures {
namespace {

using geom::Vec;

constexpr double kPi = 3.14159265358979323846;

void check_body(const Params& prm, const geom::Polytope& K) {
    prm.validate();
    if (K.dim != prm.n)
        throw precondition_error("measures: body dimension does not match the parameters");
    if (K.facets.empty()) throw precondition_error("measures: body has no facets");
    for (const auto& F : K.facets)
        if (!(F.support > 0.0))
            throw precondition_error("measures: facet support must be positive");
}

// ----- 2D facets --------------------------------------------------------------

struct Segment2 {
    Vec a, b;       // endpoints
    double h;       // support of the carrying line
    double s0, s1;  // tangential offsets of the endpoints from the normal foot
};

Segment2 facet_segment(const geom::Polytope& K, int i) {
    const auto& F = K.facets[i];
    const Vec tau{-F.normal[1], F.normal[0], 0.0};
    const Vec A = K.vertices[F.ring[0]];
    const Vec B = K.vertices[F.ring[1]];
    const double sa = geom::dot(A, tau), sb = geom::dot(B, tau);
    return {A, B, F.support, std::min(sa, sb), std::max(sa, sb)};
}

/// Integral of radial(h / cos(phi)) over the angle the facet subtends at the
/// origin.  A point of the facet at tangential offset s sits at radius
/// sqrt(h^2 + s^2) = h / cos(phi) with phi = atan(s / h); the patch is split
/// where that radius crosses the support cutoff so each panel stays smooth.
double arc_integral(double h, double s0, double s1, const std::function<double(double)>& radial,
                    const std::optional<double>& cutoff) {
    const double phi0 = std::atan(s0 / h), phi1 = std::atan(s1 / h);
    std::vector<double> knots{phi0, phi1};
    if (cutoff && h < *cutoff) {
        const double phic = std::acos(h / *cutoff);
        for (double c : {-phic, phic})
            if (c > phi0 + 1e-14 && c < phi1 - 1e-14) knots.push_back(c);
    }
    std::sort(knots.begin(), knots.end());
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        const double lo = knots[j], hi = knots[j + 1];
        if (hi - lo < 1e-15) continue;
        total += quad::integrate([&](double phi) { return radial(h / std::cos(phi)); }, lo, hi,
                                 1e-12, 1e-15);
    }
    return total;
}

/// Gauss-Legendre with order doubling on a panel smooth in its interior.
double gl_escalate(const std::function<double(double)>& f, double a, double b) {
    double prev = quad::gauss_legendre(f, a, b, 16);
    for (int order = 32; order <= 2048; order *= 2) {
        const double cur = quad::gauss_legendre(f, a, b, order);
        if (std::abs(cur - prev) <= 1e-11 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

/// Dyadically graded Gauss panels accumulating into an integrable blow-up or
/// kink at one endpoint (the facet touching the support cutoff sphere).
double gl_graded(const std::function<double(double)>& f, double a, double b, bool singular_at_b) {
    if (!singular_at_b)
        return gl_graded([&](double x) { return f(a + b - x); }, a, b, true);
    const double len = b - a;
    double total = 0.0, left = a;
    int k = 1;
    for (; k <= 50; ++k) {
        const double right = b - len * std::ldexp(1.0, -k);
        const double piece = quad::gauss_legendre(f, left, right, 24);
        total += piece;
        left = right;
        if (k >= 8 && std::abs(piece) <= std::max(1e-15, 1e-12 * std::abs(total))) break;
    }
    // Remaining sliver: nodes stay interior, so an unbounded endpoint is never
    // evaluated; its contribution is below the stopping threshold.
    total += quad::gauss_legendre(f, left, b, 24);
    return total;
}

/// Integral of the unnormalized density profile along a 2D facet.
double segment_surface_integral(const Params& prm, const geom::Polytope& K, int i) {
    const auto& F = K.facets[i];
    const Vec A = K.vertices[F.ring[0]];
    const Vec B = K.vertices[F.ring[1]];
    const Vec D = geom::sub(B, A);
    const double len = geom::norm(D);
    auto val = [&](double t) {
        const Vec y = geom::add(A, geom::scaled(D, t));
        return density::unnormalized_profile(prm, geom::norm(y));
    };

    struct Knot {
        double t;
        bool on_cutoff;
    };
    std::vector<Knot> knots{{0.0, false}, {1.0, false}};
    if (const auto cut = density::support_cutoff(prm)) {
        // |A + t D|^2 = cut^2 as a quadratic in t.
        const double qa = geom::dot(D, D);
        const double qb = 2.0 * geom::dot(A, D);
        const double qc = geom::dot(A, A) - *cut * *cut;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc > 0.0 && qa > 0.0) {
            const double sq = std::sqrt(disc);
            for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)})
                if (t > 1e-12 && t < 1.0 - 1e-12) knots.push_back({t, true});
        }
    }
    std::sort(knots.begin(), knots.end(), [](const Knot& x, const Knot& y) { return x.t < y.t; });

    const auto cut = density::support_cutoff(prm);
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        const Knot lo = knots[j], hi = knots[j + 1];
        if (hi.t - lo.t < 1e-14) continue;
        if (cut) {
            const Vec ym = geom::add(A, geom::scaled(D, 0.5 * (lo.t + hi.t)));
            if (geom::norm(ym) >= *cut) continue;  // panel outside the support
        }
        if (lo.on_cutoff && hi.on_cutoff) {
            const double mid = 0.5 * (lo.t + hi.t);
            total += gl_graded(val, lo.t, mid, false) + gl_graded(val, mid, hi.t, true);
        } else if (lo.on_cutoff) {
            total += gl_graded(val, lo.t, hi.t, false);
        } else if (hi.on_cutoff) {
            total += gl_graded(val, lo.t, hi.t, true);
        } else {
            total += gl_escalate(val, lo.t, hi.t);
        }
    }
    return len * total;
}

// ----- 3D facets --------------------------------------------------------------

struct Tri {
    Vec a, b, c;
};

/// Seven-point degree-5 rule on a triangle.
template <class F>
double tri7(const F& f, const Tri& t) {
    static constexpr double w0 = 0.225;
    static constexpr double a1 = 0.0597158717897698, b1 = 0.4701420641051151,
                            w1 = 0.1323941527885062;
    static constexpr double a2 = 0.7974269853530873, b2 = 0.1012865073234563,
                            w2 = 0.1259391805448271;
    auto bary = [&](double u, double v, double w) {
        return Vec{u * t.a[0] + v * t.b[0] + w * t.c[0], u * t.a[1] + v * t.b[1] + w * t.c[1],
                   u * t.a[2] + v * t.b[2] + w * t.c[2]};
    };
    const double area =
        0.5 * geom::norm(geom::cross(geom::sub(t.b, t.a), geom::sub(t.c, t.a)));
    double s = w0 * f(bary(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
    s += w1 * (f(bary(a1, b1, b1)) + f(bary(b1, a1, b1)) + f(bary(b1, b1, a1)));
    s += w2 * (f(bary(a2, b2, b2)) + f(bary(b2, a2, b2)) + f(bary(b2, b2, a2)));
    return area * s;
}

template <class F>
double tri_adapt(const F& f, const Tri& t, double whole, double tol, int depth) {
    auto mid = [](const Vec& x, const Vec& y) {
        return Vec{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])};
    };
    const Vec ab = mid(t.a, t.b), bc = mid(t.b, t.c), ca = mid(t.c, t.a);
    const Tri kids[4] = {{t.a, ab, ca}, {ab, t.b, bc}, {ca, bc, t.c}, {ab, bc, ca}};
    double vals[4];
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
        vals[j] = tri7(f, kids[j]);
        sum += vals[j];
    }
    if (depth <= 0 || std::abs(sum - whole) <= tol) return sum + (sum - whole) / 63.0;
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += tri_adapt(f, kids[j], vals[j], 0.25 * tol, depth - 1);
    return acc;
}

/// Integral of f over a 3D facet polygon: centroid fan plus adaptive
/// subdivision per triangle (refinement concentrates along the cutoff circle
/// when the profile kinks there).
template <class F>
double polygon_integral(const geom::Polytope& K, int i, const F& f) {
    const auto& ring = K.facets[i].ring;
    const int k = static_cast<int>(ring.size());
    Vec cent{0.0, 0.0, 0.0};
    for (int v : ring) cent = geom::add(cent, K.vertices[v]);
    cent = geom::scaled(cent, 1.0 / k);
    std::vector<Tri> tris;
    tris.reserve(k);
    for (int j = 0; j < k; ++j)
        tris.push_back({cent, K.vertices[ring[j]], K.vertices[ring[(j + 1) % k]]});
    std::vector<double> first(tris.size());
    double scale = 0.0;
    for (std::size_t j = 0; j < tris.size(); ++j) {
        first[j] = tri7(f, tris[j]);
        scale += std::abs(first[j]);
    }
    const double tol = 1e-11 * std::max(1.0, scale) / k;
    double acc = 0.0;
    for (std::size_t j = 0; j < tris.size(); ++j)
        acc += tri_adapt(f, tris[j], first[j], tol, 10);
    return acc;
}

/// Integral over the body of a radial function, via the facet pullback
/// sum_F h_F * integral_F radial(|y|) / |y|^n dA = integral over the sphere of
/// radial(rho_K(u)) du.  In 2D the patch parametrization by angle is exact.
double body_radial_integral(const Params& prm, const geom::Polytope& K,
                            const std::function<double(double)>& radial) {
    const auto cut = density::support_cutoff(prm);
    double acc = 0.0;
    if (K.dim == 2) {
        for (int i = 0; i < static_cast<int>(K.facets.size()); ++i) {
            const Segment2 s = facet_segment(K, i);
            acc += arc_integral(s.h, s.s0, s.s1, radial, cut);
        }
        return acc;
    }
    for (int i = 0; i < static_cast<int>(K.facets.size()); ++i) {
        auto f3 = [&](const Vec& y) {
            const double r = geom::norm(y);
            return radial(r) / (r * r * r);
        };
        acc += K.facets[i].support * polygon_integral(K, i, f3);
    }
    return acc;
}

geom::SphereGrid grid_of(const geom::Polytope& K) {
    geom::SphereGrid g;
    g.dim = K.dim;
    for (const auto& F : K.facets) g.dirs.push_back(F.normal);
    g.antipode.assign(g.dirs.size(), -1);
    for (std::size_t i = 0; i < g.dirs.size(); ++i)
        for (std::size_t j = i + 1; j < g.dirs.size(); ++j)
            if (geom::norm(geom::add(g.dirs[i], g.dirs[j])) <= 1e-12) {
                g.antipode[i] = static_cast<int>(j);
                g.antipode[j] = static_cast<int>(i);
            }
    return g;
}

}  // namespace

double gauss_volume(const Params& prm, const geom::Polytope& K) {
    check_body(prm, K);
    auto mass = [&](double rho) { return density::ball_mass(prm, rho); };
    return body_radial_integral(prm, K, mass) / sf::sphere_area(prm.n);
}

SurfaceMeasureAtoms weighted_surface_measure(const Params& prm, const geom::Polytope& K,
                                             double p) {
    check_body(prm, K);
    const double z = density::normalizer(prm);
    SurfaceMeasureAtoms out;
    out.params = prm;
    out.p = p;
    out.normals.reserve(K.facets.size());
    out.weights.reserve(K.facets.size());
    for (int i = 0; i < static_cast<int>(K.facets.size()); ++i) {
        double raw;
        if (K.dim == 2) {
            raw = segment_surface_integral(prm, K, i);
        } else {
            raw = polygon_integral(K, i, [&](const Vec& y) {
                return density::unnormalized_profile(prm, geom::norm(y));
            });
        }
        const double h = K.facets[i].support;
        out.normals.push_back(K.facets[i].normal);
        out.weights.push_back(std::exp((1.0 - p) * std::log(h)) * raw / z);
    }
    return out;
}

double total_measure(const SurfaceMeasureAtoms& atoms) {
    double s = 0.0;
    for (double w : atoms.weights) s += w;
    return s;
}

double gtilde(const Params& prm, const geom::Polytope& K) {
    const SurfaceMeasureAtoms s1 = weighted_surface_measure(prm, K, 1.0);
    double acc = 0.0;
    for (int i = 0; i < s1.size(); ++i) acc += K.facets[i].support * s1.weights[i];
    return acc / prm.n;
}

double divergence_defect(const Params& prm, const geom::Polytope& K) {
    check_body(prm, K);
    const double crit = prm.alpha / (prm.n + prm.alpha);
    if (const auto cut = density::support_cutoff(prm))
        if (prm.q >= crit && K.circumradius() >= *cut)
            throw precondition_error(
                "divergence_defect: body reaches the cutoff sphere where the alpha-moment "
                "diverges");
    auto moment = [&](double rho) { return density::radial_alpha_moment(prm, rho); };
    const double body = body_radial_integral(prm, K, moment);
    const double g = gauss_volume(prm, K);
    const double gt = gtilde(prm, K);
    const double coeff = 1.0 - prm.q * prm.n / prm.alpha - prm.q;
    return prm.n * gt - (prm.n * g - coeff / density::normalizer(prm) * body);
}

VariationalCheck variational_fd_check(const Params& prm, const geom::Polytope& K,
                                      const std::vector<double>& f, double p,
                                      const std::vector<double>& t_values) {
    check_body(prm, K);
    if (p == 0.0) throw precondition_error("variational_fd_check: p must be nonzero");
    if (f.size() != K.facets.size())
        throw precondition_error("variational_fd_check: one value of f per facet required");
    for (double v : f)
        if (!(v > 0.0)) throw precondition_error("variational_fd_check: f must be positive");

    const SurfaceMeasureAtoms atoms = weighted_surface_measure(prm, K, p);
    VariationalCheck rep;
    rep.t_values = t_values;
    for (int i = 0; i < atoms.size(); ++i)
        rep.pairing += std::pow(f[i], p) * atoms.weights[i];
    rep.pairing /= p;

    const double g0 = gauss_volume(prm, K);
    geom::SupportVector base{grid_of(K), {}};
    base.values.resize(K.facets.size());

    for (double t : t_values) {
        for (std::size_t i = 0; i < K.facets.size(); ++i) {
            const double zp = std::pow(K.facets[i].support, p) + t * std::pow(f[i], p);
            if (!(zp > 0.0))
                throw precondition_error(
                    "variational_fd_check: step too large, perturbed support not positive");
            base.values[i] = std::pow(zp, 1.0 / p);
        }
        const geom::Polytope kt = geom::wulff_shape(base);
        const double fd = (gauss_volume(prm, kt) - g0) / t;
        rep.fd_quotients.push_back(fd);
        rep.rel_deviation.push_back(std::abs(fd - rep.pairing)
                                    / std::max(std::abs(rep.pairing), 1e-300));
    }

    // log-log least-squares slope over the points above the noise floor
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < t_values.size(); ++k) {
        if (rep.rel_deviation[k] <= 1e-13) continue;
        const double x = std::log(t_values[k]), y = std::log(rep.rel_deviation[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2 && sxx - sx * sx / m > 0.0)
        rep.fitted_order = (sxy - sx * sy / m) / (sxx - sx * sx / m);
    return rep;
}

}  // namespace gmk::measures

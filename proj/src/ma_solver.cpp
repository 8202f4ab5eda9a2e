#include "gmk/ma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "gmk/density.hpp"
#include "gmk/geometry.hpp"
#include "gmk/isotropic.hpp"
#include "gmk/measures.hpp"
#include "gmk/rng.hpp"

namespace gmk::ma {
namespace {

constexpr double kPositivityFloor = 1e-8;
constexpr double kConvexitySlack = -1e-10;
constexpr int kMaxNewtonIters = 100;

void require_planar(const Params& prm) {
    prm.validate();
    if (prm.n != 2)
        throw precondition_error("the curvature-equation solver is planar (n = 2)");
}

void require_positive(const PeriodicField& f, const char* what) {
    f.validate();
    for (double v : f.values)
        if (!(v > 0.0)) throw precondition_error(std::string(what) + " must be positive");
}

/// Reciprocal profile W(s) = 1/U(s) and its s-derivative. For compactly
/// supported densities with negative reciprocal exponent the value diverges
/// at the support boundary; `ok` is false when s falls at or beyond it.
struct Reciprocal {
    double w = 0.0;
    double dw = 0.0;
    bool ok = true;
};

Reciprocal reciprocal_profile(const Params& prm, double s) {
    Reciprocal out;
    if (prm.q == 0.0) {
        const double sa = std::pow(s, prm.alpha);
        out.w = std::exp(sa / prm.alpha);
        out.dw = std::pow(s, prm.alpha - 1.0) * out.w;
        return out;
    }
    const double e = prm.n / prm.alpha + 1.0 - 1.0 / prm.q;  // = -beta
    const double b = 1.0 - (prm.q / prm.alpha) * std::pow(s, prm.alpha);
    if (b <= 0.0) {
        if (e < 0.0) {
            out.ok = false;  // profile vanishes, reciprocal diverges
            return out;
        }
        out.w = 0.0;
        out.dw = 0.0;
        return out;
    }
    out.w = std::pow(b, e);
    out.dw = -prm.q * e * std::pow(s, prm.alpha - 1.0) * std::pow(b, e - 1.0);
    return out;
}

struct Stencils {
    std::vector<double> d1;  // fourth-order first derivative
    std::vector<double> d2;  // fourth-order second derivative
};

Stencils periodic_derivatives(const PeriodicField& h) {
    const std::size_t m = h.size();
    const double dt = 2.0 * M_PI / static_cast<double>(m);
    Stencils out;
    out.d1.resize(m);
    out.d2.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double hm2 = h.values[(j + m - 2) % m];
        const double hm1 = h.values[(j + m - 1) % m];
        const double h0 = h.values[j];
        const double hp1 = h.values[(j + 1) % m];
        const double hp2 = h.values[(j + 2) % m];
        out.d1[j] = (-hp2 + 8.0 * hp1 - 8.0 * hm1 + hm2) / (12.0 * dt);
        out.d2[j] = (-hp2 + 16.0 * hp1 - 30.0 * h0 + 16.0 * hm1 - hm2) / (12.0 * dt * dt);
    }
    return out;
}

std::vector<double> residual_impl(const Params& prm, const PeriodicField& f,
                                  const PeriodicField& h) {
    const std::size_t m = h.size();
    const double z = density::normalizer(prm);
    const Stencils st = periodic_derivatives(h);
    std::vector<double> r(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double hj = h.values[j];
        const double s = std::sqrt(hj * hj + st.d1[j] * st.d1[j]);
        const Reciprocal rec = reciprocal_profile(prm, s);
        if (!rec.ok) {
            std::ostringstream msg;
            msg << "iterate leaves the density support at theta = " << h.theta(j)
                << " (gradient norm " << s << ")";
            throw out_of_support_error(msg.str());
        }
        r[j] = st.d2[j] + hj - z * f.values[j] * std::pow(hj, prm.p - 1.0) * rec.w;
    }
    return r;
}

Eigen::MatrixXd jacobian_impl(const Params& prm, const PeriodicField& f,
                              const PeriodicField& h) {
    const std::size_t m = h.size();
    const double dt = 2.0 * M_PI / static_cast<double>(m);
    const double z = density::normalizer(prm);
    const Stencils st = periodic_derivatives(h);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(m));
    const double c2 = 1.0 / (12.0 * dt * dt);
    const double c1 = 1.0 / (12.0 * dt);
    // Offsets -2..2 for the two periodic difference stencils.
    const double w2[5] = {-c2, 16.0 * c2, -30.0 * c2, 16.0 * c2, -c2};
    const double w1[5] = {c1, -8.0 * c1, 0.0, 8.0 * c1, -c1};
    for (std::size_t j = 0; j < m; ++j) {
        const double hj = h.values[j];
        const double hp = st.d1[j];
        const double s = std::sqrt(hj * hj + hp * hp);
        const Reciprocal rec = reciprocal_profile(prm, s);
        if (!rec.ok) throw out_of_support_error("Jacobian requested outside the density support");
        const double fz = z * f.values[j];
        const double pw = std::pow(hj, prm.p - 1.0);
        // d/dh_j of the nonlinear term, holding h' fixed:
        const double dn_dh = fz * ((prm.p - 1.0) * std::pow(hj, prm.p - 2.0) * rec.w +
                                   pw * rec.dw * (hj / s));
        // d/d(h'_j), chained through the first-derivative stencil:
        const double dn_dhp = fz * pw * rec.dw * (hp / s);
        for (int o = -2; o <= 2; ++o) {
            const std::size_t k = (j + m + static_cast<std::size_t>(o + 2) - 2) % m;
            jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
                w2[o + 2] - dn_dhp * w1[o + 2];
        }
        jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += 1.0 - dn_dh;
    }
    return jac;
}

bool discretely_convex(const PeriodicField& h) {
    const std::size_t m = h.size();
    const double dt = 2.0 * M_PI / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double v = h.values[(j + 1) % m] - 2.0 * h.values[j] +
                         h.values[(j + m - 1) % m] + dt * dt * h.values[j];
        if (!(v > kConvexitySlack)) return false;
    }
    return true;
}

bool admissible_step(const Params& prm, const PeriodicField& h) {
    for (double v : h.values)
        if (!(v > kPositivityFloor)) return false;
    if (!discretely_convex(h)) return false;
    if (const auto cut = density::support_cutoff(prm)) {
        const Stencils st = periodic_derivatives(h);
        for (std::size_t j = 0; j < h.size(); ++j) {
            const double s = std::hypot(h.values[j], st.d1[j]);
            if (!(s < *cut * (1.0 - 1e-12))) return false;
        }
    }
    return true;
}

double sup_norm(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

double sq_norm(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) out += x * x;
    return out;
}

struct NewtonOutcome {
    PeriodicField h;
    double residual_sup = 0.0;
    int iterations = 0;
};

NewtonOutcome newton_impl(const Params& prm, const PeriodicField& f,
                          const PeriodicField& h0, double tol) {
    const std::size_t m = h0.size();
    if (f.size() != m)
        throw precondition_error("data and initial field must share one grid");
    if (!admissible_step(prm, h0))
        throw precondition_error("initial field violates positivity, convexity, or support bounds");

    NewtonOutcome out;
    out.h = h0;
    std::vector<double> r = residual_impl(prm, f, out.h);
    double rs = sup_norm(r);
    double r2 = sq_norm(r);
    for (int iter = 0; iter < kMaxNewtonIters; ++iter) {
        if (rs <= tol) {
            out.residual_sup = rs;
            out.iterations = iter;
            return out;
        }
        const Eigen::MatrixXd jac = jacobian_impl(prm, f, out.h);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) rhs(static_cast<Eigen::Index>(j)) = -r[j];
        const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
        if (!delta.allFinite()) throw nonconvergence_error("singular Newton system");

        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1e-12) {
            PeriodicField cand = out.h;
            for (std::size_t j = 0; j < m; ++j)
                cand.values[j] += lambda * delta(static_cast<Eigen::Index>(j));
            if (admissible_step(prm, cand)) {
                const std::vector<double> rc = residual_impl(prm, f, cand);
                const double rc2 = sq_norm(rc);
                const double rcs = sup_norm(rc);
                if (rc2 <= (1.0 - 1e-4 * lambda) * r2 || rcs <= tol) {
                    out.h = std::move(cand);
                    r = rc;
                    r2 = rc2;
                    rs = rcs;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) throw nonconvergence_error("Newton line search stalled");
    }
    throw nonconvergence_error("Newton iteration cap reached");
}

double body_volume(const Params& prm, const PeriodicField& h) {
    geom::SupportVector sv;
    sv.grid = geom::circle_grid(static_cast<int>(h.size()));
    sv.values = h.values;
    const geom::Polytope body = geom::wulff_shape(sv);
    return measures::gauss_volume(prm, body);
}

MASolution finish_solution(const Params& prm, NewtonOutcome&& nw, Branch branch,
                           std::vector<std::string> warnings) {
    MASolution sol;
    sol.h = std::move(nw.h);
    sol.residual_sup = nw.residual_sup;
    sol.iterations = nw.iterations;
    sol.branch = branch;
    sol.warnings = std::move(warnings);
    sol.volume = body_volume(prm, sol.h);
    if (const auto cut = density::support_cutoff(prm)) {
        double hmax = 0.0;
        for (double v : sol.h.values) hmax = std::max(hmax, v);
        sol.bounds_ok = hmax < *cut;
    }
    return sol;
}

/// Unique root of r^{n-p} U(r) = target for p >= n, where the left side is
/// strictly decreasing on the support.
double decreasing_profile_root(const Params& prm, double target) {
    const double lt = std::log(target);
    const auto lphi = [&](double r) {
        return (prm.n - prm.p) * std::log(r) +
               std::log(density::unnormalized_profile(prm, r));
    };
    const auto cut = density::support_cutoff(prm);
    double hi = cut ? *cut * (1.0 - 1e-12) : 1.0;
    if (!cut) {
        int guard = 0;
        while (lphi(hi) > lt && ++guard < 400) hi *= 2.0;
    }
    if (lphi(hi) > lt)
        throw precondition_error("no constant solution below the support radius");
    double lo = std::min(1.0, hi) * 0.5;
    int guard = 0;
    while (lphi(lo) <= lt) {
        lo *= 0.5;
        if (++guard > 300)
            throw precondition_error("no constant solution: data too large for this regime");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (lphi(mid) > lt ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double geometric_mean(const PeriodicField& f) {
    double acc = 0.0;
    for (double v : f.values) acc += std::log(v);
    return std::exp(acc / static_cast<double>(f.size()));
}

/// Warm-started continuation along f_t = (1-t) c0 + t f from a constant seed.
NewtonOutcome continuation_impl(const Params& prm, const PeriodicField& f,
                                double c0, double seed_radius, int steps,
                                double tol) {
    if (steps < 1) throw precondition_error("continuation needs at least one step");
    const std::size_t m = f.size();
    PeriodicField h = PeriodicField::constant(seed_radius, m);
    const double base_dt = 1.0 / static_cast<double>(steps);
    double t = 0.0;
    double dt = base_dt;
    int total_iters = 0;
    NewtonOutcome last;
    last.h = h;
    while (t < 1.0) {
        const double t_next = std::min(1.0, t + dt);
        PeriodicField ft;
        ft.values.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            ft.values[j] = (1.0 - t_next) * c0 + t_next * f.values[j];
        try {
            NewtonOutcome nw = newton_impl(prm, ft, h, tol);
            total_iters += nw.iterations;
            h = nw.h;
            last = std::move(nw);
            t = t_next;
            dt = std::min(base_dt, dt * 2.0);
        } catch (const nonconvergence_error&) {
            dt *= 0.5;
            if (dt < 1e-4) {
                std::ostringstream msg;
                msg << "continuation stalled at t = " << t;
                throw nonconvergence_error(msg.str());
            }
        }
    }
    last.h = std::move(h);
    last.iterations = total_iters;
    return last;
}

}  // namespace

double PeriodicField::theta(std::size_t j) const {
    return 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(size());
}

void PeriodicField::validate() const {
    const std::size_t m = size();
    if (m < 8 || (m & (m - 1)) != 0)
        throw precondition_error("periodic fields need a power-of-two node count >= 8");
}

PeriodicField PeriodicField::constant(double value, std::size_t m) {
    PeriodicField out;
    out.values.assign(m, value);
    out.validate();
    return out;
}

PeriodicField PeriodicField::cosine(double c, double amp, int k, std::size_t m) {
    PeriodicField out;
    out.values.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        out.values[j] = c * (1.0 + amp * std::cos(k * (2.0 * M_PI * j / m)));
    out.validate();
    return out;
}

std::vector<double> residual(const Params& prm, const PeriodicField& f,
                             const PeriodicField& h) {
    require_planar(prm);
    require_positive(f, "data");
    require_positive(h, "support field");
    if (f.size() != h.size())
        throw precondition_error("data and field must share one grid");
    return residual_impl(prm, f, h);
}

std::vector<double> residual_jacobian(const Params& prm, const PeriodicField& f,
                                      const PeriodicField& h) {
    require_planar(prm);
    require_positive(f, "data");
    require_positive(h, "support field");
    if (f.size() != h.size())
        throw precondition_error("data and field must share one grid");
    const Eigen::MatrixXd jac = jacobian_impl(prm, f, h);
    const std::size_t m = h.size();
    std::vector<double> out(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out[i * m + j] = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

MASolution newton_solve(const Params& prm, const PeriodicField& f,
                        const PeriodicField& h0, double tol) {
    require_planar(prm);
    require_positive(f, "data");
    require_positive(h0, "initial field");
    return finish_solution(prm, newton_impl(prm, f, h0, tol), Branch::Unique, {});
}

MASolution continuity_solve(const Params& prm, const PeriodicField& f, int steps) {
    require_planar(prm);
    require_positive(f, "data");
    if (!(prm.p >= prm.n))
        throw precondition_error("continuation in the unique regime requires p >= n");
    if (!prm.q_subcritical())
        throw precondition_error("continuation requires q < alpha/(n+alpha)");

    std::vector<std::string> warnings;
    const double z = density::normalizer(prm);
    const double c0 = geometric_mean(f);
    if (std::abs(prm.p - prm.n) < 1e-12) {
        if (!(c0 * z < 1.0))
            throw precondition_error("p = n requires the data's geometric mean below 1/Z");
        const double fmax = *std::max_element(f.values.begin(), f.values.end());
        if (fmax * z >= 1.0)
            warnings.push_back("data exceeds 1/Z somewhere; the small-data bound fails "
                               "and continuation may stall");
    }
    const double r0 = decreasing_profile_root(prm, c0 * z);
    NewtonOutcome nw = continuation_impl(prm, f, c0, r0, steps, 1e-10);
    return finish_solution(prm, std::move(nw), Branch::Unique, std::move(warnings));
}

double uniqueness_probe(const Params& prm, const PeriodicField& f, int k,
                        std::uint64_t seed, ProbeStats* stats) {
    require_planar(prm);
    require_positive(f, "data");
    if (!prm.q_subcritical())
        throw precondition_error("the probe requires q < alpha/(n+alpha)");
    if (k < 2) throw precondition_error("the probe needs at least two starts");

    const std::size_t m = f.size();
    const double z = density::normalizer(prm);
    const double c0 = geometric_mean(f);
    std::vector<double> centers;
    if (prm.p >= prm.n) {
        centers.push_back(decreasing_profile_root(prm, c0 * z));
    } else {
        const iso::Trichotomy tri = iso::constant_roots(prm, c0);
        if (tri.kind == iso::RootKind::TwoRoots) {
            centers = {tri.r1, tri.r2};
        } else if (tri.kind == iso::RootKind::OneRoot) {
            centers = {tri.r1};
        } else {
            throw precondition_error("no constant seeds: data above the critical constant");
        }
    }
    const auto cut = density::support_cutoff(prm);

    Rng rng(seed);
    std::vector<PeriodicField> found;
    int attempted = 0;
    for (int i = 0; i < k; ++i) {
        const double center = centers[static_cast<std::size_t>(i) % centers.size()];
        const double scale = std::pow(10.0, rng.uniform(-0.35, 0.35));
        const double amp = 0.06 * rng.uniform();
        const int mode = 1 + static_cast<int>(rng.raw() % 4);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        PeriodicField h0;
        h0.values.resize(m);
        double hmax = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m);
            h0.values[j] = center * scale * (1.0 + amp * std::cos(mode * th + phase));
            hmax = std::max(hmax, h0.values[j]);
        }
        if (cut && hmax >= 0.9 * *cut) {
            const double shrink = 0.9 * *cut / hmax;
            for (double& v : h0.values) v *= shrink;
        }
        ++attempted;
        try {
            NewtonOutcome nw = newton_impl(prm, f, h0, 1e-10);
            found.push_back(std::move(nw.h));
        } catch (const nonconvergence_error&) {
        } catch (const precondition_error&) {
        }
    }
    if (stats) {
        stats->attempted = attempted;
        stats->converged = static_cast<int>(found.size());
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < found.size(); ++a)
        for (std::size_t b = a + 1; b < found.size(); ++b) {
            double d = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                d = std::max(d, std::abs(found[a].values[j] - found[b].values[j]));
            spread = std::max(spread, d);
        }
    return spread;
}

BranchPair two_branch_solve(const Params& prm, const PeriodicField& f,
                            std::optional<double> mass_threshold) {
    require_planar(prm);
    require_positive(f, "data");
    if (!(prm.p >= 1.0 && prm.p < prm.n))
        throw precondition_error("the two-branch regime needs 1 <= p < n");

    std::vector<std::string> warnings;
    if (prm.q < 0.0 && prm.alpha > 1.0)
        warnings.push_back("negative q with alpha > 1 lies outside the regime where "
                           "the two-branch structure is established");

    const double c0 = geometric_mean(f);
    const iso::Trichotomy tri = iso::constant_roots(prm, c0);
    if (tri.kind != iso::RootKind::TwoRoots)
        throw precondition_error("two-branch continuation needs two constant roots "
                                 "at the data's geometric mean");

    const std::size_t m = f.size();
    const double mass = 2.0 * M_PI / static_cast<double>(m) *
                        std::accumulate(f.values.begin(), f.values.end(), 0.0);
    if (mass_threshold && !(mass < *mass_threshold)) {
        std::ostringstream msg;
        msg << "data mass " << mass << " is not below the smallness threshold "
            << *mass_threshold;
        warnings.push_back(msg.str());
    }
    for (const double r : {tri.r1, tri.r2}) {
        const iso::LinearizedCoefficient lin = iso::linearized_coefficient(prm, r);
        if (!lin.invertible) {
            std::ostringstream msg;
            msg << "nearly singular linearization at the constant seed r = " << r;
            warnings.push_back(msg.str());
        }
    }

    BranchPair out;
    out.low = finish_solution(prm, continuation_impl(prm, f, c0, tri.r1, 20, 1e-10),
                              Branch::Low, warnings);
    out.high = finish_solution(prm, continuation_impl(prm, f, c0, tri.r2, 20, 1e-10),
                               Branch::High, warnings);

    double dist = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        dist = std::max(dist, std::abs(out.low.h.values[j] - out.high.h.values[j]));
    const auto add_warning = [&](const std::string& w) {
        out.low.warnings.push_back(w);
        out.high.warnings.push_back(w);
    };
    if (dist < 1e-8) add_warning("the two branches coincide");
    if (!(out.low.volume < 0.5))
        add_warning("low branch volume is not below 1/2");
    if (!(out.high.volume > 0.5))
        add_warning("high branch volume is not above 1/2");
    return out;
}

}  // namespace gmk::ma

#include "gmk/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmk/measures.hpp"
#include "gmk/rng.hpp"

namespace gmk::ineq {

namespace {

void require_even_positive(const geom::SupportVector& z, const char* who) {
    z.validate();
    if (!z.grid.antipodal_closed())
        throw precondition_error(std::string(who) + ": grid must be antipodally closed");
    for (int i = 0; i < z.grid.size(); ++i) {
        if (!(z.values[static_cast<std::size_t>(i)] > 0.0))
            throw precondition_error(std::string(who) + ": support values must be positive");
        int j = z.grid.antipode[static_cast<std::size_t>(i)];
        double a = z.values[static_cast<std::size_t>(i)];
        double b = z.values[static_cast<std::size_t>(j)];
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
            throw precondition_error(std::string(who) +
                                     ": o-symmetric body required (even support values)");
    }
}

void require_shared_grid(const geom::SupportVector& K, const geom::SupportVector& L,
                         const char* who) {
    if (K.grid.dim != L.grid.dim || K.grid.size() != L.grid.size())
        throw precondition_error(std::string(who) + ": bodies must live on one grid");
    for (int i = 0; i < K.grid.size(); ++i) {
        const auto& a = K.grid.dirs[static_cast<std::size_t>(i)];
        const auto& b = L.grid.dirs[static_cast<std::size_t>(i)];
        for (int c = 0; c < 3; ++c)
            if (a[c] != b[c])
                throw precondition_error(std::string(who) + ": bodies must live on one grid");
    }
}

void record(DefectReport& rep, double defect, std::uint64_t seed, const std::string& what) {
    rep.trials += 1;
    rep.min_defect = rep.trials == 1 ? defect : std::min(rep.min_defect, defect);
    if (defect < -rep.tolerance) rep.violations.push_back({seed, what, defect});
}

}  // namespace

DefectReport check_brunn_minkowski(const Params& prm, const geom::SupportVector& K,
                                   const geom::SupportVector& L,
                                   const std::vector<double>& lambdas) {
    prm.validate();
    if (!prm.q_subcritical())
        throw precondition_error("check_brunn_minkowski: requires q < alpha/(n+alpha)");
    require_even_positive(K, "check_brunn_minkowski");
    require_even_positive(L, "check_brunn_minkowski");
    require_shared_grid(K, L, "check_brunn_minkowski");
    if (prm.n != K.grid.dim)
        throw precondition_error("check_brunn_minkowski: params dimension differs from grid");

    const double inv_n = 1.0 / prm.n;
    const double gk = std::pow(measures::gauss_volume(prm, geom::wulff_shape(K)), inv_n);
    const double gl = std::pow(measures::gauss_volume(prm, geom::wulff_shape(L)), inv_n);

    DefectReport rep;
    for (double lambda : lambdas) {
        if (!(lambda >= 0.0 && lambda <= 1.0))
            throw precondition_error("check_brunn_minkowski: lambda must lie in [0, 1]");
        geom::SupportVector mid = geom::lp_combine(K, L, lambda, 1.0);
        double gm = std::pow(measures::gauss_volume(prm, geom::wulff_shape(mid)), inv_n);
        double defect = gm - (1.0 - lambda) * gk - lambda * gl;
        std::ostringstream what;
        what << "lambda=" << lambda << " combination lost volume radius " << defect;
        record(rep, defect, 0, what.str());
    }
    return rep;
}

DefectReport check_lp_isoperimetric(const Params& prm, const geom::Polytope& K) {
    prm.validate();
    if (!(prm.p >= 1.0))
        throw precondition_error("check_lp_isoperimetric: requires p >= 1");
    if (!prm.q_subcritical())
        throw precondition_error("check_lp_isoperimetric: requires q < alpha/(n+alpha)");

    const double vol = measures::gauss_volume(prm, K);
    const double s1 = measures::total_measure(measures::weighted_surface_measure(prm, K, 1.0));
    const double sp = measures::total_measure(measures::weighted_surface_measure(prm, K, prm.p));
    const double bound = std::pow(prm.n * vol, 1.0 - prm.p) * std::pow(s1, prm.p);
    const double defect = sp - bound;

    DefectReport rep;
    std::ostringstream what;
    what << "p=" << prm.p << " total measure " << sp << " fell below comparison bound " << bound;
    record(rep, defect, 0, what.str());
    return rep;
}

DefectReport check_gtilde(const Params& prm, const geom::Polytope& K) {
    prm.validate();
    if (!prm.q_subcritical())
        throw precondition_error("check_gtilde: requires q < alpha/(n+alpha)");

    const double vol = measures::gauss_volume(prm, K);
    const double boundary_form = measures::gtilde(prm, K);
    const double defect = vol - boundary_form;

    DefectReport rep;
    std::ostringstream what;
    what << "boundary functional " << boundary_form << " exceeded volume " << vol;
    record(rep, defect, 0, what.str());
    return rep;
}

double threshold_report(const Params& prm, double I_half) {
    prm.validate();
    if (!(prm.p >= 1.0))
        throw precondition_error("threshold_report: requires p >= 1");
    if (!(I_half > 0.0))
        throw precondition_error("threshold_report: isoperimetric value must be positive, got " +
                                 std::to_string(I_half));
    return std::pow(prm.n / 2.0, 1.0 - prm.p) * std::pow(I_half, prm.p);
}

double estimate_isoperimetric_half(const Params& prm, int trials, std::uint64_t seed) {
    prm.validate();
    if (trials < 1) throw precondition_error("estimate_isoperimetric_half: trials must be >= 1");

    double best = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        // Grade the family from a round body (trial 0) to strongly anisotropic
        // ones, so the minimum is probed near and far from the ball.
        double spread = trials > 1 ? 0.35 * trial / (trials - 1) : 0.0;
        geom::SupportVector z = random_symmetric_body(seed * 1000003ULL + trial, prm.n,
                                                      1.0 - spread, 1.0 + spread);

        auto volume_at = [&](double t) {
            geom::SupportVector s = z;
            for (double& v : s.values) v *= t;
            return measures::gauss_volume(prm, geom::wulff_shape(s));
        };

        double lo = 1e-3, hi = 1.0;
        int guard = 0;
        while (volume_at(hi) < 0.5 && guard++ < 60) hi *= 2.0;
        while (volume_at(lo) > 0.5 && guard++ < 120) lo *= 0.5;
        if (guard >= 120)
            throw nonconvergence_error("estimate_isoperimetric_half: cannot bracket volume 1/2");
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            t = 0.5 * (lo + hi);
            double v = volume_at(t);
            if (std::abs(v - 0.5) <= 1e-12) break;
            (v < 0.5 ? lo : hi) = t;
        }

        geom::SupportVector s = z;
        for (double& v : s.values) v *= t;
        geom::Polytope body = geom::wulff_shape(s);
        double perimeter =
            measures::total_measure(measures::weighted_surface_measure(prm, body, 1.0));
        best = std::min(best, perimeter);
    }
    return best;
}

geom::SupportVector random_symmetric_body(std::uint64_t seed, int n, double lo, double hi) {
    if (n != 2 && n != 3)
        throw precondition_error("random_symmetric_body: n must be 2 or 3, got " +
                                 std::to_string(n));
    if (!(lo > 0.0) || !(hi >= lo))
        throw precondition_error("random_symmetric_body: need 0 < lo <= hi");

    geom::SphereGrid grid = n == 2 ? geom::circle_grid(32) : geom::symmetric_fibonacci_grid(64);
    Rng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(grid.size()), 0.0);
    for (int i = 0; i < grid.size(); ++i) {
        int j = grid.antipode[static_cast<std::size_t>(i)];
        if (j < i) continue;  // value already drawn when the partner was visited
        double v = rng.uniform(lo, hi);
        values[static_cast<std::size_t>(i)] = v;
        values[static_cast<std::size_t>(j)] = v;
    }

    geom::SupportVector z = geom::canonicalize(geom::SupportVector{grid, values});
    // Canonical support numbers of an o-symmetric body are even up to
    // roundoff; enforce the symmetry exactly.
    for (int i = 0; i < z.grid.size(); ++i) {
        int j = z.grid.antipode[static_cast<std::size_t>(i)];
        if (j < i) continue;
        double v = 0.5 * (z.values[static_cast<std::size_t>(i)] +
                          z.values[static_cast<std::size_t>(j)]);
        z.values[static_cast<std::size_t>(i)] = v;
        z.values[static_cast<std::size_t>(j)] = v;
    }
    return z;
}

}  // namespace gmk::ineq

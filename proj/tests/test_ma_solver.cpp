#include "gmk/ma_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gmk/density.hpp"
#include "gmk/isotropic.hpp"
#include "gmk/params.hpp"

namespace {

using gmk::Params;
using gmk::density::ball_mass;
using gmk::density::normalizer;
using gmk::density::support_cutoff;
using gmk::density::unnormalized_profile;
using gmk::make_params;
namespace ma = gmk::ma;
namespace iso = gmk::iso;

double sup(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

/// Right-hand data that makes a given smooth h(theta) = 1 + a cos(k theta)
/// an exact solution of the curvature equation.
ma::PeriodicField cosine_body_data(const Params& prm, double a, int k, std::size_t m) {
    const double z = normalizer(prm);
    ma::PeriodicField f;
    f.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m);
        const double h = 1.0 + a * std::cos(k * th);
        const double hp = -a * k * std::sin(k * th);
        const double hpp = -a * k * k * std::cos(k * th);
        const double s = std::hypot(h, hp);
        f.values[j] =
            (hpp + h) * unnormalized_profile(prm, s) * std::pow(h, 1.0 - prm.p) / z;
    }
    return f;
}

/// Constant data whose exact solution is the constant field r.
double constant_data_for(const Params& prm, double r) {
    return std::pow(r, prm.n - prm.p) * unnormalized_profile(prm, r) / normalizer(prm);
}

TEST(Field, HelpersAndValidation) {
    const auto f = ma::PeriodicField::cosine(2.0, 0.5, 3, 16);
    ASSERT_EQ(f.size(), 16u);
    EXPECT_NEAR(f.theta(4), M_PI / 2.0, 1e-15);
    EXPECT_NEAR(f.values[0], 3.0, 1e-15);
    EXPECT_NEAR(f.values[8], 2.0 * (1.0 + 0.5 * std::cos(3.0 * M_PI)), 1e-12);

    ma::PeriodicField bad;
    bad.values.assign(100, 1.0);
    EXPECT_THROW(bad.validate(), gmk::precondition_error);
    bad.values.assign(4, 1.0);
    EXPECT_THROW(bad.validate(), gmk::precondition_error);
    EXPECT_NO_THROW(ma::PeriodicField::constant(1.0, 8).validate());
}

TEST(Residual, VanishesAtConstantSolutions) {
    // Both roots of the constant problem below the critical constant, plus a
    // p >= n constant, across density branches.
    const std::vector<Params> low_p = {make_params(2, 2.0, 0.0, 1.0),
                                       make_params(2, 1.6, 0.3, 1.2),
                                       make_params(2, 1.2, -0.8, 0.5)};
    for (const auto& prm : low_p) {
        const double cs = iso::critical_constant(prm).c_star;
        const auto tri = iso::constant_roots(prm, 0.4 * cs);
        ASSERT_EQ(tri.kind, iso::RootKind::TwoRoots);
        for (const double r : {tri.r1, tri.r2}) {
            const auto f = ma::PeriodicField::constant(constant_data_for(prm, r), 256);
            const auto h = ma::PeriodicField::constant(r, 256);
            EXPECT_LT(sup(ma::residual(prm, f, h)), 1e-11)
                << "alpha=" << prm.alpha << " q=" << prm.q << " r=" << r;
        }
    }
    const Params steep = make_params(2, 2.0, 0.2, 2.7);
    const auto f = ma::PeriodicField::constant(constant_data_for(steep, 0.9), 256);
    const auto h = ma::PeriodicField::constant(0.9, 256);
    EXPECT_LT(sup(ma::residual(steep, f, h)), 1e-11);
}

TEST(Residual, FourthOrderConvergenceOnManufacturedBody) {
    const std::vector<Params> cases = {make_params(2, 2.0, 0.0, 1.0),
                                       make_params(2, 1.7, 0.25, 1.4),
                                       make_params(2, 1.2, -0.8, 2.5)};
    for (const auto& prm : cases) {
        std::vector<double> errs;
        for (std::size_t m : {64u, 128u, 256u, 512u}) {
            const auto f = cosine_body_data(prm, 0.1, 2, m);
            ma::PeriodicField h;
            h.values.resize(m);
            for (std::size_t j = 0; j < m; ++j)
                h.values[j] = 1.0 + 0.1 * std::cos(2.0 * (2.0 * M_PI * j / m));
            errs.push_back(sup(ma::residual(prm, f, h)));
        }
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double ratio = errs[i] / errs[i + 1];
            EXPECT_GT(ratio, 12.0) << "alpha=" << prm.alpha << " level " << i;
            EXPECT_LT(ratio, 20.0) << "alpha=" << prm.alpha << " level " << i;
        }
    }
}

TEST(Residual, SupportBoundaryBehaviour) {
    // Subcritical q > 0: the reciprocal profile diverges at the cutoff.
    const Params sub = make_params(2, 2.0, 0.25, 1.0);
    const double cut = *support_cutoff(sub);
    const auto f = ma::PeriodicField::constant(0.05, 64);
    EXPECT_THROW(ma::residual(sub, f, ma::PeriodicField::constant(1.01 * cut, 64)),
                 ma::out_of_support_error);
    // The specific error is a refinement of nonconvergence.
    EXPECT_THROW(ma::residual(sub, f, ma::PeriodicField::constant(1.01 * cut, 64)),
                 gmk::nonconvergence_error);

    // Supercritical q: the profile vanishes with positive reciprocal exponent,
    // so beyond the cutoff the equation simply loses its right-hand side.
    const Params sup_q = make_params(2, 2.0, 0.7, 1.0);
    const double cut2 = *support_cutoff(sup_q);
    const auto h = ma::PeriodicField::constant(1.2 * cut2, 64);
    std::vector<double> r;
    ASSERT_NO_THROW(r = ma::residual(sup_q, f, h));
    for (double v : r) EXPECT_NEAR(v, 1.2 * cut2, 1e-12);
}

TEST(Jacobian, MatchesFiniteDifferences) {
    const Params prm = make_params(2, 1.7, 0.25, 1.4);
    const std::size_t m = 32;
    ma::PeriodicField h;
    h.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m);
        h.values[j] = 1.0 + 0.1 * std::cos(2.0 * th) + 0.04 * std::cos(3.0 * th + 0.5);
    }
    const auto f = ma::PeriodicField::cosine(0.1, 0.2, 1, m);
    const auto jac = ma::residual_jacobian(prm, f, h);
    for (std::size_t k : {0u, 5u, 13u, 31u}) {
        const double eps = 1e-6;
        auto hp = h, hm = h;
        hp.values[k] += eps;
        hm.values[k] -= eps;
        const auto rp = ma::residual(prm, f, hp);
        const auto rm = ma::residual(prm, f, hm);
        for (std::size_t j = 0; j < m; ++j) {
            const double fd = (rp[j] - rm[j]) / (2.0 * eps);
            EXPECT_NEAR(jac[j * m + k], fd, 1e-5 * std::max(1.0, std::abs(fd)))
                << "entry (" << j << "," << k << ")";
        }
    }
}

TEST(Jacobian, RowSumsGiveLinearizedCoefficientAtConstants) {
    const Params prm = make_params(2, 2.0, 0.0, 1.0);
    const double cs = iso::critical_constant(prm).c_star;
    const auto tri = iso::constant_roots(prm, 0.5 * cs);
    ASSERT_EQ(tri.kind, iso::RootKind::TwoRoots);
    const std::size_t m = 64;
    for (const double r : {tri.r1, tri.r2}) {
        const auto f = ma::PeriodicField::constant(constant_data_for(prm, r), m);
        const auto h = ma::PeriodicField::constant(r, m);
        const auto jac = ma::residual_jacobian(prm, f, h);
        const double a0 = iso::linearized_coefficient(prm, r).coefficient_closed;
        for (std::size_t j = 0; j < m; ++j) {
            double row = 0.0;
            for (std::size_t k = 0; k < m; ++k) row += jac[j * m + k];
            // A uniform shift of h changes the residual at rate a0 per unit.
            EXPECT_NEAR(row, a0, 1e-8);
            EXPECT_LT(jac[j * m + j], 0.0);  // diffusion-dominated diagonal
        }
    }
}

TEST(Newton, ConvergesToConstantFromPerturbedStart) {
    const Params prm = make_params(2, 2.0, 0.0, 3.0);
    const double r = 0.8;
    const std::size_t m = 256;
    const auto f = ma::PeriodicField::constant(constant_data_for(prm, r), m);
    ma::PeriodicField h0;
    h0.values.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        h0.values[j] = r * (1.0 + 0.01 * std::cos(2.0 * M_PI * j / m));
    const auto sol = ma::newton_solve(prm, f, h0);
    EXPECT_LE(sol.residual_sup, 1e-10);
    EXPECT_LT(sol.iterations, 30);
    EXPECT_TRUE(sol.bounds_ok);
    for (double v : sol.h.values) EXPECT_NEAR(v, r, 1e-9);
    EXPECT_NEAR(sol.volume, ball_mass(prm, r), 3e-4);
}

TEST(Newton, StaysInsideCompactSupport) {
    const Params prm = make_params(2, 2.0, 0.3, 3.0);
    const double cut = *support_cutoff(prm);
    const double r = 2.2;
    ASSERT_LT(r, cut);
    const std::size_t m = 256;
    const auto f = ma::PeriodicField::constant(constant_data_for(prm, r), m);
    const auto sol = ma::newton_solve(prm, f, ma::PeriodicField::constant(2.5, m));
    EXPECT_LE(sol.residual_sup, 1e-10);
    EXPECT_TRUE(sol.bounds_ok);
    double hmax = 0.0;
    for (double v : sol.h.values) hmax = std::max(hmax, v);
    EXPECT_LT(hmax, cut - 1e-9);
    for (double v : sol.h.values) EXPECT_NEAR(v, r, 1e-8);
}

TEST(Newton, RejectsInadmissibleStarts) {
    const Params prm = make_params(2, 2.0, 0.3, 3.0);
    const std::size_t m = 64;
    const auto f = ma::PeriodicField::constant(0.05, m);

    auto dent = ma::PeriodicField::constant(1.0, m);
    dent.values[10] = 0.2;  // deep nonconvex notch
    EXPECT_THROW(ma::newton_solve(prm, f, dent), gmk::precondition_error);

    // Start beyond the support radius fails the admissibility screen.
    const double cut = *support_cutoff(prm);
    EXPECT_THROW(ma::newton_solve(prm, f, ma::PeriodicField::constant(1.05 * cut, m)),
                 gmk::precondition_error);

    EXPECT_THROW(ma::newton_solve(prm, ma::PeriodicField::constant(0.05, 32),
                                  ma::PeriodicField::constant(1.0, m)),
                 gmk::precondition_error);
}

TEST(Continuity, SolvesAnisotropicDataAcrossBranches) {
    struct Case {
        Params prm;
        ma::PeriodicField f;
    };
    const std::vector<Case> cases = {
        {make_params(2, 2.0, 0.0, 3.0), ma::PeriodicField::cosine(0.08, 0.3, 4, 256)},
        {make_params(2, 1.7, 0.2, 2.5), ma::PeriodicField::cosine(0.05, 0.25, 3, 256)},
        {make_params(2, 1.2, -0.6, 3.0), ma::PeriodicField::cosine(0.3, 0.2, 2, 256)},
    };
    for (const auto& [prm, f] : cases) {
        const auto sol = ma::continuity_solve(prm, f);
        EXPECT_LE(sol.residual_sup, 1e-10) << "alpha=" << prm.alpha << " q=" << prm.q;
        EXPECT_TRUE(sol.bounds_ok);
        EXPECT_GT(sol.volume, 0.0);
        EXPECT_LT(sol.volume, 1.0);
        double lo = 1e300, hi = 0.0;
        for (double v : sol.h.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_GT(hi - lo, 1e-3);  // genuinely anisotropic body
        EXPECT_TRUE(sol.warnings.empty());
    }
}

TEST(Continuity, IsotropicDataReturnsTheConstantRoot) {
    const Params prm = make_params(2, 2.0, 0.2, 2.6);
    const double r = 1.1;
    const auto f = ma::PeriodicField::constant(constant_data_for(prm, r), 256);
    const auto sol = ma::continuity_solve(prm, f);
    for (double v : sol.h.values) EXPECT_NEAR(v, r, 1e-9);
}

TEST(Continuity, CriticalExponentDataBounds) {
    const Params prm = make_params(2, 2.0, 0.0, 2.0);  // p = n
    const double z = normalizer(prm);
    EXPECT_THROW(
        ma::continuity_solve(prm, ma::PeriodicField::constant(1.05 / z, 256)),
        gmk::precondition_error);

    // Comfortably small data: no warnings, clean convergence.
    const auto small = ma::PeriodicField::cosine(0.7 / z, 0.1, 2, 256);
    const auto sol = ma::continuity_solve(prm, small);
    EXPECT_LE(sol.residual_sup, 1e-10);
    EXPECT_TRUE(sol.warnings.empty());

    // Data crossing 1/Z on part of the circle: existence is no longer
    // guaranteed; either the solver converges and reports the violation, or
    // the continuation stalls.
    const auto marginal = ma::PeriodicField::cosine(0.8 / z, 0.3, 2, 256);
    try {
        const auto risky = ma::continuity_solve(prm, marginal);
        EXPECT_FALSE(risky.warnings.empty());
    } catch (const gmk::nonconvergence_error&) {
        SUCCEED();
    }

    // The regime gate itself.
    EXPECT_THROW(ma::continuity_solve(make_params(2, 2.0, 0.0, 1.5),
                                      ma::PeriodicField::constant(0.05, 256)),
                 gmk::precondition_error);
    EXPECT_THROW(ma::continuity_solve(make_params(2, 2.0, 0.6, 3.0),
                                      ma::PeriodicField::constant(0.05, 256)),
                 gmk::precondition_error);
}

TEST(Continuity, EquivariantUnderGridRotation) {
    const Params prm = make_params(2, 2.0, 0.2, 2.6);
    const std::size_t m = 256, shift = 37;
    const auto f = ma::PeriodicField::cosine(0.05, 0.3, 2, m);
    ma::PeriodicField fs;
    fs.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) fs.values[j] = f.values[(j + shift) % m];
    const auto a = ma::continuity_solve(prm, f);
    const auto b = ma::continuity_solve(prm, fs);
    for (std::size_t j = 0; j < m; ++j)
        EXPECT_NEAR(b.h.values[j], a.h.values[(j + shift) % m], 1e-8);
}

TEST(Probe, SmallSpreadInTheUniqueRegime) {
    const Params prm = make_params(2, 2.0, 0.0, 2.5);
    const auto f = ma::PeriodicField::cosine(0.06, 0.25, 3, 128);
    ma::ProbeStats stats;
    const double spread = ma::uniqueness_probe(prm, f, 8, 2024, &stats);
    EXPECT_EQ(stats.attempted, 8);
    EXPECT_GE(stats.converged, 2);
    EXPECT_LE(spread, 1e-6);

    const auto fc = ma::PeriodicField::constant(constant_data_for(prm, 1.0), 128);
    EXPECT_LE(ma::uniqueness_probe(prm, fc, 6), 1e-8);
}

TEST(Probe, DetectsTheTwoBranchesBelowTheCriticalExponent) {
    const Params prm = make_params(2, 2.0, 0.0, 1.5);
    const double cs = iso::critical_constant(prm).c_star;
    const auto f = ma::PeriodicField::constant(0.35 * cs, 128);
    ma::ProbeStats stats;
    const double spread = ma::uniqueness_probe(prm, f, 10, 7, &stats);
    EXPECT_GE(stats.converged, 2);
    EXPECT_GT(spread, 0.1);
}

TEST(TwoBranch, IsotropicDataYieldsBothConstantRoots) {
    const Params prm = make_params(2, 2.0, 0.0, 1.0);
    const double cs = iso::critical_constant(prm).c_star;
    const double c = 0.3 * cs;
    const auto tri = iso::constant_roots(prm, c);
    ASSERT_EQ(tri.kind, iso::RootKind::TwoRoots);
    const auto pair = ma::two_branch_solve(prm, ma::PeriodicField::constant(c, 256));
    EXPECT_EQ(pair.low.branch, ma::Branch::Low);
    EXPECT_EQ(pair.high.branch, ma::Branch::High);
    for (double v : pair.low.h.values) EXPECT_NEAR(v, tri.r1, 1e-8);
    for (double v : pair.high.h.values) EXPECT_NEAR(v, tri.r2, 1e-8);
    EXPECT_NEAR(pair.low.volume, ball_mass(prm, tri.r1), 3e-4);
    EXPECT_NEAR(pair.high.volume, ball_mass(prm, tri.r2), 3e-4);
    EXPECT_LT(pair.low.volume, 0.5);
    EXPECT_GT(pair.high.volume, 0.5);
    EXPECT_TRUE(pair.low.warnings.empty());
    EXPECT_TRUE(pair.high.warnings.empty());
}

TEST(TwoBranch, AnisotropicDataGivesDistinctSolutions) {
    const Params prm = make_params(2, 2.0, 0.0, 1.0);
    const double cs = iso::critical_constant(prm).c_star;
    const auto f = ma::PeriodicField::cosine(0.3 * cs, 0.1, 2, 256);
    const auto pair = ma::two_branch_solve(prm, f);
    EXPECT_LE(pair.low.residual_sup, 1e-10);
    EXPECT_LE(pair.high.residual_sup, 1e-10);
    double dist = 0.0;
    for (std::size_t j = 0; j < 256; ++j)
        dist = std::max(dist,
                        std::abs(pair.low.h.values[j] - pair.high.h.values[j]));
    EXPECT_GT(dist, 0.5);
    EXPECT_LT(pair.low.volume, 0.5);
    EXPECT_GT(pair.high.volume, 0.5);

    // Mass threshold reporting: a generous bound stays silent, a tiny one is
    // flagged on both branches.
    const auto quiet = ma::two_branch_solve(prm, f, 1e9);
    EXPECT_TRUE(quiet.low.warnings.empty());
    const auto flagged = ma::two_branch_solve(prm, f, 1e-6);
    EXPECT_FALSE(flagged.low.warnings.empty());
    EXPECT_FALSE(flagged.high.warnings.empty());
}

TEST(TwoBranch, RegimeGates) {
    const Params prm = make_params(2, 2.0, 0.0, 1.0);
    const double cs = iso::critical_constant(prm).c_star;
    EXPECT_THROW(ma::two_branch_solve(prm, ma::PeriodicField::constant(1.5 * cs, 128)),
                 gmk::precondition_error);
    EXPECT_THROW(ma::two_branch_solve(make_params(2, 2.0, 0.0, 2.5),
                                      ma::PeriodicField::constant(0.05, 128)),
                 gmk::precondition_error);
    EXPECT_THROW(ma::two_branch_solve(make_params(2, 2.0, 0.0, 0.8),
                                      ma::PeriodicField::constant(0.05, 128)),
                 gmk::precondition_error);
}

TEST(Scalar, ReciprocalDeviceIsMonotoneForLargeP) {
    // t -> t^{p-n} / U(t sqrt(1+c^2)) increases on the support for p >= n;
    // this is the scalar mechanism behind uniqueness in that regime.
    const std::vector<Params> cases = {make_params(2, 2.0, 0.3, 2.0),
                                       make_params(2, 1.5, 0.2, 3.0),
                                       make_params(2, 2.0, 0.0, 2.5),
                                       make_params(2, 1.2, -0.7, 2.0)};
    for (const auto& prm : cases) {
        for (const double c : {0.0, 0.8, 2.5}) {
            const double slope = std::sqrt(1.0 + c * c);
            const auto cut = support_cutoff(prm);
            const double tmax = cut ? *cut / slope * (1.0 - 1e-6) : 3.0;
            double prev = 0.0;
            for (int i = 1; i <= 200; ++i) {
                const double t = tmax * i / 200.0;
                const double v =
                    std::pow(t, prm.p - prm.n) / unnormalized_profile(prm, t * slope);
                if (i > 1) EXPECT_GE(v, prev * (1.0 - 1e-12));
                prev = v;
            }
        }
    }
}

TEST(GridRefinement, SolutionsAgreeUnderDoubling) {
    const Params prm = make_params(2, 1.7, 0.25, 2.4);
    const auto coarse =
        ma::continuity_solve(prm, ma::PeriodicField::cosine(0.05, 0.3, 3, 256));
    const auto fine =
        ma::continuity_solve(prm, ma::PeriodicField::cosine(0.05, 0.3, 3, 512));
    for (std::size_t j = 0; j < 256; ++j)
        EXPECT_NEAR(coarse.h.values[j], fine.h.values[2 * j], 1e-6);
}

}  // namespace

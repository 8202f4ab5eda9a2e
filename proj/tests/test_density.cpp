#include "gmk/density.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gmk/special_functions.hpp"
#include "oracles.hpp"

using gmk::Params;
using gmk::make_params;
using gmk::precondition_error;
namespace density = gmk::density;
namespace sf = gmk::sf;

namespace {

/// Parameter sweep covering every sign regime of q: heavy tail, exponential,
/// subcritical positive, and a supercritical q kept below alpha/(n + alpha/2)
/// so the density stays square integrable.
std::vector<Params> sweep(int n) {
    std::vector<Params> out;
    for (double alpha : {0.7, 1.0, 1.6, 2.0, 3.0}) {
        const double crit = alpha / (n + alpha);
        const double sup = 0.5 * (crit + alpha / (n + 0.5 * alpha));
        for (double q : {-1.2, -0.3, 0.0, 0.5 * crit, sup}) out.push_back(make_params(n, alpha, q));
    }
    return out;
}

double radial_integral_oracle(const Params& prm, double tol) {
    auto f = [&prm](double r) {
        return density::unnormalized_profile(prm, r) * std::pow(r, prm.n - 1);
    };
    if (const auto cut = density::support_cutoff(prm)) return oracle::integrate(f, 0.0, *cut, tol);
    return oracle::integrate_to_inf(f, 0.0, tol);
}

/// The constant displayed alongside the density definition; the library's
/// normalizer is its reciprocal (|q| is used so the q < 0 branch is real-valued).
double displayed_constant(const Params& prm) {
    const int n = prm.n;
    const double a = prm.alpha;
    const double top = sf::gamma_fn(n / 2.0 + 1.0);
    if (prm.q == 0.0) return top / (std::pow(M_PI, n / 2.0) * std::pow(a, n / a) * sf::gamma_fn(n / a + 1.0));
    const double aq = std::abs(prm.q);
    const double second = prm.q > 0.0 ? 1.0 / prm.q - n / a : 1.0 - 1.0 / prm.q;
    return (a / n) * std::pow(aq / a, n / a) * top
           / (std::pow(M_PI, n / 2.0) * sf::beta_fn(n / a, second));
}

}  // namespace

TEST(Normalizer, GaussianPlaneIsTwoPi) {
    EXPECT_NEAR(density::normalizer(make_params(2, 2.0, 0.0)), 2.0 * M_PI, 1e-12);
}

TEST(Normalizer, MatchesSimpsonOracle) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            // The supercritical branch has an integrable endpoint singularity,
            // where Simpson converges slowly; relax only there.
            const bool singular = prm.q > 0.0 && !prm.q_subcritical();
            const double tol = singular ? 2e-6 : 1e-8;
            const double ref = sf::sphere_area(n) * radial_integral_oracle(prm, singular ? 1e-9 : 1e-12);
            const double z = density::normalizer(prm);
            EXPECT_NEAR(z, ref, tol * ref) << "n=" << n << " alpha=" << prm.alpha << " q=" << prm.q;
        }
}

TEST(Normalizer, MatchesAdaptiveQuadratureRoute) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            const double z = density::normalizer(prm);
            const double zq = density::normalizer_by_quadrature(prm);
            EXPECT_NEAR(zq, z, 1e-8 * z) << "n=" << n << " alpha=" << prm.alpha << " q=" << prm.q;
        }
}

TEST(Normalizer, ReciprocalOfDisplayedConstant) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            const double product = density::normalizer(prm) * displayed_constant(prm);
            EXPECT_NEAR(product, 1.0, 1e-12) << "n=" << n << " alpha=" << prm.alpha << " q=" << prm.q;
        }
}

TEST(BallMass, MatchesSimpsonOracle) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            const double z = density::normalizer(prm);
            const double scale = sf::sphere_area(n) / z;
            const double rad = oracle::effective_radius(prm, 1e-6);
            for (double frac : {0.15, 0.5, 0.9}) {
                const double rho = frac * rad;
                const double ref = scale
                                   * oracle::integrate(
                                         [&prm](double r) {
                                             return density::unnormalized_profile(prm, r)
                                                    * std::pow(r, prm.n - 1);
                                         },
                                         0.0, rho, 1e-12);
                EXPECT_NEAR(density::ball_mass(prm, rho), ref, 1e-9)
                    << "n=" << n << " alpha=" << prm.alpha << " q=" << prm.q << " rho=" << rho;
            }
        }
}

TEST(BallMass, LimitsAndMonotonicity) {
    for (const auto& prm : sweep(2)) {
        EXPECT_DOUBLE_EQ(density::ball_mass(prm, 0.0), 0.0);
        double prev = 0.0;
        const double rad = oracle::effective_radius(prm, 1e-9);
        for (double rho = 0.0; rho <= rad; rho += rad / 64.0) {
            const double m = density::ball_mass(prm, rho);
            EXPECT_GE(m, prev - 1e-14);
            prev = m;
        }
        EXPECT_NEAR(density::ball_mass(prm, rad), 1.0, 2e-9);
        // The cutoff radius itself is rounded, so the mass there is 1 - O(eps).
        if (const auto cut = density::support_cutoff(prm)) {
            EXPECT_NEAR(density::ball_mass(prm, *cut), 1.0, 1e-9);
            EXPECT_DOUBLE_EQ(density::ball_mass(prm, *cut * (1.0 + 1e-12)), 1.0);
        }
    }
}

TEST(Density, ZeroOutsideSupport) {
    const auto prm = make_params(2, 2.0, 0.4);
    const double cut = *density::support_cutoff(prm);
    EXPECT_GT(density::density_at(prm, 0.9 * cut), 0.0);
    EXPECT_DOUBLE_EQ(density::density_at(prm, cut * 1.0001), 0.0);
    EXPECT_FALSE(density::support_cutoff(make_params(2, 2.0, 0.0)).has_value());
    EXPECT_FALSE(density::support_cutoff(make_params(2, 2.0, -1.0)).has_value());
}

TEST(Omega, MonotoneAndConvexInLogRadiusWhenSubcritical) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            if (!prm.q_subcritical()) continue;
            // phi(s) = omega(e^s) sampled inside the support.
            const auto cut = density::support_cutoff(prm);
            const double s_hi = cut ? std::log(*cut) - 0.05 : 2.0;
            const double s_lo = s_hi - 4.0, ds = (s_hi - s_lo) / 200.0;
            double prev = density::omega(prm, std::exp(s_lo));
            double prev_diff = 0.0;
            bool first = true;
            for (double s = s_lo + ds; s <= s_hi; s += ds) {
                const double cur = density::omega(prm, std::exp(s));
                const double diff = cur - prev;
                EXPECT_GE(diff, -1e-9) << "alpha=" << prm.alpha << " q=" << prm.q;
                if (!first) EXPECT_GE(diff - prev_diff, -1e-9) << "alpha=" << prm.alpha << " q=" << prm.q;
                prev = cur;
                prev_diff = diff;
                first = false;
            }
        }
}

TEST(Omega, ConvexityFlipsForSupercriticalPositiveQ) {
    const auto prm = make_params(2, 2.0, 0.6);  // q above alpha/(n+alpha) = 0.5
    ASSERT_FALSE(prm.q_subcritical());
    const double cut = *density::support_cutoff(prm);
    const double s_hi = std::log(cut) - 0.05, ds = 0.02;
    bool concave_somewhere = false;
    double prev = density::omega(prm, std::exp(s_hi - 3.0));
    double prev_diff = 0.0;
    bool first = true;
    for (double s = s_hi - 3.0 + ds; s <= s_hi; s += ds) {
        const double cur = density::omega(prm, std::exp(s));
        if (!first && cur - prev < prev_diff - 1e-12) concave_somewhere = true;
        prev_diff = cur - prev;
        prev = cur;
        first = false;
    }
    EXPECT_TRUE(concave_somewhere);
}

TEST(RadialAlphaMoment, MatchesSimpsonOracle) {
    for (int n : {2, 3})
        for (const auto& prm : sweep(n)) {
            const double beta = prm.q == 0.0 ? 0.0 : density::profile_exponent(prm);
            const double rad = oracle::effective_radius(prm, 1e-7);
            for (double frac : {0.3, 0.8}) {
                const double rho = frac * rad;
                auto f = [&prm, beta](double r) {
                    const double tail = prm.q == 0.0
                                            ? std::exp(-std::pow(r, prm.alpha) / prm.alpha)
                                            : std::pow(density::bracket(prm, r), beta - 1.0);
                    return tail * std::pow(r, prm.n + prm.alpha - 1.0);
                };
                const double ref = oracle::integrate(f, 0.0, rho, 1e-13);
                const double got = density::radial_alpha_moment(prm, rho);
                EXPECT_NEAR(got, ref, 1e-8 * std::max(1.0, ref))
                    << "n=" << n << " alpha=" << prm.alpha << " q=" << prm.q << " rho=" << rho;
            }
        }
}

TEST(RadialAlphaMoment, DivergesAtCutoffForSupercriticalQ) {
    const auto prm = make_params(2, 2.0, 0.6);
    const double cut = *density::support_cutoff(prm);
    EXPECT_THROW(density::radial_alpha_moment(prm, cut), precondition_error);
    EXPECT_GT(density::radial_alpha_moment(prm, 0.9 * cut), 0.0);
}

TEST(Classify, RegimeTable) {
    using density::LogProfile;
    using density::classify_log_profile;
    EXPECT_EQ(classify_log_profile(make_params(2, 2.0, 0.0)), LogProfile::LogConcave);
    EXPECT_EQ(classify_log_profile(make_params(2, 2.0, 0.3)), LogProfile::LogConcave);
    EXPECT_EQ(classify_log_profile(make_params(2, 1.0, 0.0)), LogProfile::LogConcave);
    EXPECT_EQ(classify_log_profile(make_params(2, 0.5, 0.0)), LogProfile::LogConvex);
    EXPECT_EQ(classify_log_profile(make_params(2, 0.5, -2.0)), LogProfile::LogConvex);
    EXPECT_EQ(classify_log_profile(make_params(2, 2.0, 0.7)), LogProfile::LogConvex);
    EXPECT_EQ(classify_log_profile(make_params(2, 0.5, 0.05)), LogProfile::PoincareRange);
    EXPECT_EQ(classify_log_profile(make_params(2, 2.0, -1.0)), LogProfile::Unclassified);
    EXPECT_EQ(classify_log_profile(make_params(3, 0.9, 0.25)), LogProfile::Unclassified);
}

TEST(Params, ValidationAndFlags) {
    EXPECT_THROW(make_params(4, 2.0, 0.0), precondition_error);
    EXPECT_THROW(make_params(2, -1.0, 0.0), precondition_error);
    EXPECT_THROW(make_params(2, 2.0, 1.0), precondition_error);
    EXPECT_TRUE(make_params(2, 2.0, 0.49).q_subcritical());
    EXPECT_FALSE(make_params(2, 2.0, 0.51).q_subcritical());
    EXPECT_TRUE(make_params(2, 2.0, 0.0, -1.0).p_negative_admissible());
    EXPECT_FALSE(make_params(2, 2.0, 0.0, 1.0).p_negative_admissible());
    // q < 0 narrows the admissible window to (alpha/q - alpha, 0).
    EXPECT_TRUE(make_params(2, 2.0, -1.0, -3.9).p_negative_admissible());
    EXPECT_FALSE(make_params(2, 2.0, -1.0, -4.1).p_negative_admissible());
    EXPECT_FALSE(make_params(2, 2.0, 0.51, -1.0).p_negative_admissible());
}

TEST(MonteCarlo, GaussianNormalizationWithinThreeSigma) {
    const auto prm = make_params(2, 2.0, 0.0);
    const double rad = oracle::effective_radius(prm, 1e-10);
    const auto mc = oracle::mc_cube_mass(prm, rad, 200000, 20260814u);
    const double tail = 1.0 - density::ball_mass(prm, rad);
    EXPECT_LE(std::abs(mc.estimate + tail - 1.0), 3.0 * mc.std_error + 1e-9);
}

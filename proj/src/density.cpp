#include "gmk/density.hpp"

#include <cmath>
#include <limits>

#include "gmk/quadrature.hpp"
#include "gmk/special_functions.hpp"

namespace gmk::density {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::optional<double> support_cutoff(const Params& prm) {
    if (prm.q > 0.0) return std::pow(prm.alpha / prm.q, 1.0 / prm.alpha);
    return std::nullopt;
}

double bracket(const Params& prm, double r) {
    const double v = 1.0 - (prm.q / prm.alpha) * std::pow(r, prm.alpha);
    return v > 0.0 ? v : 0.0;
}

double profile_exponent(const Params& prm) {
    return 1.0 / prm.q - prm.n / prm.alpha - 1.0;
}

double unnormalized_profile(const Params& prm, double r) {
    const double ra = std::pow(r, prm.alpha);
    if (prm.q == 0.0) return std::exp(-ra / prm.alpha);
    const double arg = -(prm.q / prm.alpha) * ra;
    if (arg <= -1.0) return 0.0;
    return std::exp(profile_exponent(prm) * std::log1p(arg));
}

double normalizer(const Params& prm) {
    prm.validate();
    const int n = prm.n;
    const double a = prm.alpha;
    const double sigma = sf::sphere_area(n);
    if (prm.q == 0.0)
        return sigma * std::exp((n / a - 1.0) * std::log(a) + sf::log_gamma(n / a));
    const double aq = std::abs(prm.q);
    const double second = prm.q > 0.0 ? 1.0 / prm.q - n / a : 1.0 - 1.0 / prm.q;
    return sigma / a * std::exp((n / a) * std::log(a / aq) + sf::log_beta(n / a, second));
}

double normalizer_by_quadrature(const Params& prm, double rel_tol) {
    prm.validate();
    const double sigma = sf::sphere_area(prm.n);
    auto f = [&prm](double r) {
        return unnormalized_profile(prm, r) * std::pow(r, prm.n - 1);
    };
    const auto cutoff = support_cutoff(prm);
    double radial = cutoff ? quad::integrate(f, 0.0, *cutoff, rel_tol)
                           : quad::integrate_to_inf(f, 0.0, rel_tol);
    return sigma * radial;
}

double density_at(const Params& prm, double r) {
    return unnormalized_profile(prm, r) / normalizer(prm);
}

double ball_mass(const Params& prm, double rho) {
    prm.validate();
    if (rho <= 0.0) return 0.0;
    const int n = prm.n;
    const double a = prm.alpha;
    if (prm.q == 0.0) return sf::reg_lower_gamma(n / a, std::pow(rho, a) / a);
    if (prm.q > 0.0) {
        const double u = (prm.q / a) * std::pow(rho, a);
        if (u >= 1.0) return 1.0;
        return sf::reg_inc_beta(n / a, 1.0 / prm.q - n / a, u);
    }
    const double t = (-prm.q / a) * std::pow(rho, a);
    return sf::reg_inc_beta(n / a, 1.0 - 1.0 / prm.q, t / (1.0 + t));
}

double omega(const Params& prm, double t) {
    if (prm.q == 0.0) return std::pow(t, prm.alpha) / prm.alpha;
    const double b = bracket(prm, t);
    if (b <= 0.0) return kInf;
    return -profile_exponent(prm) * std::log(b);
}

double radial_alpha_moment(const Params& prm, double rho) {
    prm.validate();
    if (rho <= 0.0) return 0.0;
    const int n = prm.n;
    const double a = prm.alpha;
    if (prm.q == 0.0) {
        const double shape = n / a + 1.0;
        return std::exp((n / a) * std::log(a) + sf::log_gamma(shape))
               * sf::reg_lower_gamma(shape, std::pow(rho, a) / a);
    }
    const double beta = profile_exponent(prm);
    const double aq = std::abs(prm.q);
    const double scale = std::exp((n / a + 1.0) * std::log(a / aq)) / a;
    if (prm.q < 0.0) {
        const double t = (aq / a) * std::pow(rho, a);
        const double s = t / (1.0 + t);
        const double b2 = 1.0 - 1.0 / prm.q;
        return scale * sf::beta_fn(n / a + 1.0, b2) * sf::reg_inc_beta(n / a + 1.0, b2, s);
    }
    if (beta > 0.0) {
        const double u = std::min(1.0, (prm.q / a) * std::pow(rho, a));
        return scale * sf::beta_fn(n / a + 1.0, beta) * sf::reg_inc_beta(n / a + 1.0, beta, u);
    }
    // q in [alpha/(n+alpha), alpha/n): the moment diverges at the cutoff sphere.
    const double cutoff = *support_cutoff(prm);
    if (rho >= cutoff)
        throw precondition_error("radial_alpha_moment: integral diverges at the cutoff for this q");
    auto f = [&prm, beta, n, a](double r) {
        return std::pow(bracket(prm, r), beta - 1.0) * std::pow(r, n + a - 1.0);
    };
    return quad::integrate(f, 0.0, rho, 1e-11);
}

const char* to_string(LogProfile c) {
    switch (c) {
        case LogProfile::LogConcave: return "LogConcave";
        case LogProfile::LogConvex: return "LogConvex";
        case LogProfile::PoincareRange: return "PoincareRange";
        default: return "Unclassified";
    }
}

LogProfile classify_log_profile(const Params& prm) {
    prm.validate();
    const double crit = prm.alpha / (prm.n + prm.alpha);
    if (prm.q >= 0.0 && prm.q < crit && prm.alpha >= 1.0) return LogProfile::LogConcave;
    if ((prm.q <= 0.0 && prm.alpha <= 1.0) || (prm.q >= crit && prm.alpha >= 1.0))
        return LogProfile::LogConvex;
    if (prm.q > 0.0 && prm.q < crit) return LogProfile::PoincareRange;
    return LogProfile::Unclassified;
}

}  // namespace gmk::density

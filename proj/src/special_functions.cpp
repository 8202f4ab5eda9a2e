#include "gmk/special_functions.hpp"

#include <cmath>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "gmk/params.hpp"

namespace gmk::sf {

namespace {

/// GSL's default error handler aborts the process; we translate status codes
/// into exceptions instead.  Returns true once, on first use.
bool disable_gsl_abort() {
    static const bool done = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    return done;
}

double check(int status, const gsl_sf_result& r, const char* who) {
    // Underflow means the true value rounds to zero at double precision.
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != GSL_SUCCESS)
        throw precondition_error(std::string(who) + ": " + gsl_strerror(status));
    return r.val;
}

}  // namespace

double log_gamma(double x) {
    disable_gsl_abort();
    if (!(x > 0.0))
        throw precondition_error("log_gamma: argument must be positive, got " + std::to_string(x));
    gsl_sf_result r;
    return check(gsl_sf_lngamma_e(x, &r), r, "log_gamma");
}

double gamma_fn(double x) { return std::exp(log_gamma(x)); }

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

double reg_inc_beta(double a, double b, double t) {
    disable_gsl_abort();
    if (!(a > 0.0) || !(b > 0.0))
        throw precondition_error("reg_inc_beta: parameters must be positive");
    if (t <= 0.0) {
        if (t < 0.0) throw precondition_error("reg_inc_beta: t must lie in [0,1]");
        return 0.0;
    }
    if (t >= 1.0) {
        if (t > 1.0) throw precondition_error("reg_inc_beta: t must lie in [0,1]");
        return 1.0;
    }
    gsl_sf_result r;
    return check(gsl_sf_beta_inc_e(a, b, t, &r), r, "reg_inc_beta");
}

double reg_lower_gamma(double a, double x) {
    disable_gsl_abort();
    if (!(a > 0.0))
        throw precondition_error("reg_lower_gamma: a must be positive");
    if (x < 0.0)
        throw precondition_error("reg_lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    gsl_sf_result r;
    return check(gsl_sf_gamma_inc_P_e(a, x, &r), r, "reg_lower_gamma");
}

double sphere_area(int n) {
    const double half_n = 0.5 * n;
    return 2.0 * std::pow(M_PI, half_n) / gamma_fn(half_n);
}

}  // namespace gmk::sf

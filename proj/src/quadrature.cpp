#include "gmk/quadrature.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace gmk::quad {

namespace {

double trampoline(double x, void* p) {
    return (*static_cast<const std::function<double(double)>*>(p))(x);
}

struct Workspace {
    gsl_integration_workspace* w;
    explicit Workspace(size_t n) : w(gsl_integration_workspace_alloc(n)) {}
    ~Workspace() { gsl_integration_workspace_free(w); }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
};

void require_ok(int status, const char* who) {
    // Roundoff-limited results are still the best available estimate.
    if (status == GSL_SUCCESS || status == GSL_EROUND) return;
    throw std::runtime_error(std::string(who) + ": " + gsl_strerror(status));
}

const gsl_integration_glfixed_table* gl_table(int order) {
    static std::map<int, std::unique_ptr<gsl_integration_glfixed_table,
                                         void (*)(gsl_integration_glfixed_table*)>> cache;
    auto it = cache.find(order);
    if (it == cache.end()) {
        auto* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(order));
        it = cache.emplace(order, decltype(cache)::mapped_type(t, gsl_integration_glfixed_table_free)).first;
    }
    return it->second.get();
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    gsl_set_error_handler_off();
    gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
    Workspace ws(4096);
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, 4096, ws.w, &result, &abserr);
    require_ok(status, "integrate");
    return result;
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol, double abs_tol) {
    gsl_set_error_handler_off();
    gsl_function gf{&trampoline, const_cast<std::function<double(double)>*>(&f)};
    Workspace ws(4096);
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qagiu(&gf, a, abs_tol, rel_tol, 4096, ws.w, &result, &abserr);
    require_ok(status, "integrate_to_inf");
    return result;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order) {
    const auto* table = gl_table(order);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
        double x = 0.0, w = 0.0;
        gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &x, &w,
                                      const_cast<gsl_integration_glfixed_table*>(table));
        sum += w * f(x);
    }
    return sum;
}

}  // namespace gmk::quad

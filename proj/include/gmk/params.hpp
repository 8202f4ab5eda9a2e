#pragma once

#include <stdexcept>
#include <string>

namespace gmk {

/// Raised when inputs violate a documented admissibility condition.
class precondition_error : public std::domain_error {
public:
    explicit precondition_error(const std::string& what) : std::domain_error(what) {}
};

/// Raised when an iterative routine exhausts its budget without meeting tolerance.
class nonconvergence_error : public std::runtime_error {
public:
    explicit nonconvergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter block for the generalized Gaussian family and its L_p problems.
/// Admissible domain: n in {2,3}, alpha > 0, q < alpha/n.  p is carried along
/// for the Minkowski-problem routines and may be any nonzero real there.
struct Params {
    int n = 2;
    double alpha = 2.0;
    double q = 0.0;
    double p = 1.0;

    /// Throws precondition_error unless (n, alpha, q) lies in the admissible domain.
    void validate() const {
        if (n != 2 && n != 3)
            throw precondition_error("Params: n must be 2 or 3, got " + std::to_string(n));
        if (!(alpha > 0.0))
            throw precondition_error("Params: alpha must be positive, got " + std::to_string(alpha));
        if (!(q < alpha / n))
            throw precondition_error("Params: q must satisfy q < alpha/n, got q=" + std::to_string(q)
                                     + " with alpha/n=" + std::to_string(alpha / n));
    }

    /// True when q < alpha/(n+alpha), the range where the density profile is
    /// log-concave enough for the comparison arguments (second moments finite,
    /// divergence identity coefficient nonnegative).
    bool q_subcritical() const { return q < alpha / (n + alpha); }

    /// Admissibility window for negative exponents p in the Minkowski problem:
    /// q < 0 requires alpha/q - alpha < p < 0; 0 <= q < alpha/(n+alpha) allows any p < 0.
    bool p_negative_admissible() const {
        if (q < 0.0) return alpha / q - alpha < p && p < 0.0;
        return q < alpha / (n + alpha) && p < 0.0;
    }

    Params with_p(double new_p) const {
        Params out = *this;
        out.p = new_p;
        return out;
    }
};

inline Params make_params(int n, double alpha, double q, double p = 1.0) {
    Params prm{n, alpha, q, p};
    prm.validate();
    return prm;
}

}  // namespace gmk

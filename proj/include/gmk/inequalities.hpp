#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmk/geometry.hpp"
#include "gmk/params.hpp"

namespace gmk::ineq {

struct Violation {
    std::uint64_t seed = 0;
    std::string description;
    double defect = 0.0;
};

struct DefectReport {
    int trials = 0;
    double min_defect = 0.0;
    std::vector<Violation> violations;
    double tolerance = 1e-6;  // quadrature allowance
};

/// dimensional Brunn-Minkowski check: for o-symmetric bodies and subcritical
/// q, G((1-l)K + lL)^{1/n} - (1-l)G(K)^{1/n} - lG(L)^{1/n} must be
/// nonnegative up to quadrature error, for every supplied l.
DefectReport check_brunn_minkowski(const Params& prm, const geom::SupportVector& K,
                                   const geom::SupportVector& L,
                                   const std::vector<double>& lambdas);

/// L_p isoperimetric comparison |S_p(K)| >= (n G(K))^{1-p} |S_1(K)|^p for
/// p >= 1; equality at p = 1.
DefectReport check_lp_isoperimetric(const Params& prm, const geom::Polytope& K);

/// G(K) >= gtilde(K) for subcritical q; the gap equals the weighted radial
/// alpha-moment term of the divergence identity.
DefectReport check_gtilde(const Params& prm, const geom::Polytope& K);

/// Mass smallness threshold (n/2)^{1-p} * I_half^p entering the existence
/// hypotheses for 1 <= p < n and the two-branch preconditions.
double threshold_report(const Params& prm, double I_half);

/// Monte Carlo estimate of the isoperimetric value at volume 1/2: each body
/// of a seeded family is rescaled until G = 1/2 and the smallest weighted
/// boundary measure observed is returned. A family estimate, not a proof.
double estimate_isoperimetric_half(const Params& prm, int trials,
                                   std::uint64_t seed = 17);

/// Seeded o-symmetric body: even support values drawn uniformly from
/// [lo, hi] on an antipodally closed grid, canonicalized.
geom::SupportVector random_symmetric_body(std::uint64_t seed, int n, double lo = 0.7,
                                          double hi = 1.4);

}  // namespace gmk::ineq

#pragma once

#include <vector>

#include "gmk/geometry.hpp"
#include "gmk/params.hpp"

namespace gmk::measures {

/// Discrete weighted surface-area measure of a polytope: one atom per facet,
/// sitting at the facet normal, with weight h_i^{1-p} * integral of the
/// density over the facet.
struct SurfaceMeasureAtoms {
    Params params;
    double p = 1.0;
    std::vector<geom::Vec> normals;
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
};

/// Gaussian-type volume G(K): integral of the density over K.  Evaluated
/// facet by facet: the spherical patch a facet subtends is pulled back onto
/// the facet plane, where the radial mass in each direction is available in
/// closed form, so the only quadrature left is over the patch itself.
/// For q > 0 the patch is split where the facet crosses the support cutoff.
double gauss_volume(const Params& prm, const geom::Polytope& K);

/// One atom per facet; p = 1 gives the plain weighted surface-area measure.
SurfaceMeasureAtoms weighted_surface_measure(const Params& prm, const geom::Polytope& K,
                                             double p);

/// Sum of atom weights.
double total_measure(const SurfaceMeasureAtoms& atoms);

/// (1/n) sum_i h_i * w_i with w_i the p = 1 facet weights; the boundary side
/// of the divergence identity below.
double gtilde(const Params& prm, const geom::Polytope& K);

/// Residual of the divergence identity
///   n * gtilde(K) = n * G(K) - (1 - qn/alpha - q)/Z * I_K,
/// where I_K integrates bracket^(beta-1) |x|^alpha over K (profile itself at
/// q = 0).  Both sides are evaluated by independent quadratures; the result
/// should vanish to quadrature accuracy.  For q in [alpha/(n+alpha), alpha/n)
/// the body integral diverges once K crosses the cutoff sphere and the call
/// refuses such bodies.
double divergence_defect(const Params& prm, const geom::Polytope& K);

struct VariationalCheck {
    std::vector<double> t_values;
    std::vector<double> fd_quotients;    // [G(K_t) - G(K)] / t
    std::vector<double> rel_deviation;   // vs the measure pairing, relative
    double pairing = 0.0;                // (1/p) sum_i f_i^p * atom weight_i
    double fitted_order = 0.0;           // log-log slope of deviation vs t
};

/// Finite-difference check of the first variation of G along the family
/// [(h^p + t f^p)^(1/p)]: the difference quotient should approach the
/// pairing (1/p) sum f_i^p dS_p as t -> 0, at first order.
/// f lives on the facet normals of K (one positive value per facet).
VariationalCheck variational_fd_check(const Params& prm, const geom::Polytope& K,
                                      const std::vector<double>& f, double p,
                                      const std::vector<double>& t_values = {1e-2, 1e-3, 1e-4,
                                                                             1e-5});

}  // namespace gmk::measures

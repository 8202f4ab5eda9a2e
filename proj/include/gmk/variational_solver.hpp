#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmk/geometry.hpp"
#include "gmk/params.hpp"

namespace gmk::vs {

/// Finite atomic measure on the sphere: one (direction, weight) pair per atom.
struct DiscreteMeasure {
    int dim = 2;
    std::vector<geom::Vec> directions;  // unit vectors
    std::vector<double> weights;        // positive
    bool even = false;                  // closed under v -> -v with equal weights

    int size() const { return static_cast<int>(weights.size()); }
    double total() const;
    /// Checks sizes, unit directions, positive weights, and (when flagged)
    /// antipodal closure with matching weights.
    void validate() const;
    /// Index of the atom at -directions[i], or -1.
    int antipode_of(int i) const;
};

enum class ConcentrationMode { Hemisphere, GreatSubsphere };

struct ConcentrationReport {
    bool ok = true;                    // true = NOT concentrated
    std::optional<geom::Vec> witness;  // pole/normal direction when concentrated
    /// Hemisphere mode: min_u sum_i mu_i (u.v_i)_+ relative to |mu|.
    /// GreatSubsphere mode: max_i |u.v_i| at the flattest direction u.
    double value = 0.0;
};

/// Hemisphere mode scans a fine direction grid for the smallest one-sided
/// first moment and polishes it locally; GreatSubsphere mode inspects the
/// smallest singular direction of the atom direction matrix.
ConcentrationReport check_not_concentrated(const DiscreteMeasure& mu,
                                           ConcentrationMode mode);

struct NormalizedSolution {
    geom::Polytope body;
    /// Support numbers of the body on the atom directions (canonicalized).
    std::vector<double> support;
    double multiplier = 0.0;  // lambda with S_p measure = lambda * mu
    double target_volume = 0.0;
    double achieved_volume = 0.0;
    /// max_i | S_i/|S| - mu_i/|mu| | over atoms at return.
    double first_order_residual = 0.0;
    /// Norm of the objective gradient projected on the constraint tangent
    /// space, relative to the full gradient norm.
    double tangent_residual = 0.0;
    double objective = 0.0;          // phi(z) = -(1/p) sum mu_i z_i^p
    double initial_objective = 0.0;  // phi at the feasible ball start
    int iterations = 0;
    bool all_facets_active = true;
    std::vector<std::string> warnings;
};

/// Normalized Minkowski problem for p > 0: maximize phi(z) subject to a
/// prescribed volume G([z]) = c, so that at optimality the weighted surface
/// measure of the body is proportional to mu. Asymmetric measures require
/// c in [1/2, 1); even measures admit any c in (0, 1).
NormalizedSolution solve_normalized(const Params& prm, const DiscreteMeasure& mu,
                                    double c, double tol = 1e-5);

/// Even-cone variant for negative p: support numbers are tied across
/// antipodal pairs and the measure must avoid every great subsphere.
NormalizedSolution solve_normalized_even(const Params& prm, const DiscreteMeasure& mu,
                                         double c, double tol = 1e-5);

/// lambda = |S_p(K)| / |mu|, with an atomwise consistency check: each ratio
/// S_i / mu_i must lie within tol * lambda of lambda.
double recover_multiplier(const Params& prm, const NormalizedSolution& sol,
                          const DiscreteMeasure& mu, double tol = 1e-4);

}  // namespace gmk::vs

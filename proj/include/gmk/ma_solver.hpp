#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmk/params.hpp"

namespace gmk::ma {

/// Thrown when an iterate leaves the support of a compactly supported density
/// in a regime where the curvature equation has no finite right-hand side.
class out_of_support_error : public nonconvergence_error {
  public:
    using nonconvergence_error::nonconvergence_error;
};

/// Uniform periodic sample of a function of the polar angle on [0, 2pi).
/// Node j sits at theta_j = 2*pi*j/m; m must be a power of two (>= 8) so
/// grids can be halved and doubled exactly during refinement studies.
struct PeriodicField {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double theta(std::size_t j) const;
    void validate() const;

    static PeriodicField constant(double value, std::size_t m = 512);
    /// c * (1 + amp * cos(k * theta)) sampled on m nodes.
    static PeriodicField cosine(double c, double amp, int k, std::size_t m = 512);
};

enum class Branch { Unique, Low, High };

struct MASolution {
    PeriodicField h;
    double residual_sup = 0.0;
    int iterations = 0;
    /// Gaussian-type volume of the convex body recovered from h.
    double volume = 0.0;
    Branch branch = Branch::Unique;
    /// True when compact support constraints (if any) hold strictly.
    bool bounds_ok = true;
    std::vector<std::string> warnings;
};

struct ProbeStats {
    int attempted = 0;
    int converged = 0;
};

struct BranchPair {
    MASolution low;
    MASolution high;
};

/// Nodal residual of the planar curvature equation
///   h''(theta) + h(theta) - Z f h^{p-1} / g(sqrt(h^2 + h'^2)) = 0
/// with fourth-order periodic difference stencils. Throws out_of_support_error
/// if some node has sqrt(h^2+h'^2) beyond the support of a density whose
/// profile vanishes with negative reciprocal exponent there.
std::vector<double> residual(const Params& prm, const PeriodicField& f,
                             const PeriodicField& h);

/// Dense row-major m*m Jacobian of residual() with respect to the nodal
/// values of h (pentadiagonal periodic structure).
std::vector<double> residual_jacobian(const Params& prm, const PeriodicField& f,
                                      const PeriodicField& h);

/// Damped Newton iteration from the given initial field. Steps must keep the
/// field positive, discretely convex, and (for compactly supported densities)
/// strictly inside the support. Throws nonconvergence_error when the line
/// search stalls or the iteration cap is hit.
MASolution newton_solve(const Params& prm, const PeriodicField& f,
                        const PeriodicField& h0, double tol = 1e-10);

/// Continuation from the constant problem: f_t = (1-t) c0 + t f with c0 the
/// geometric mean of f, warm-starting Newton along t in [0,1]. Requires
/// p >= n = 2 (regime with a unique solution) and subcritical q.
MASolution continuity_solve(const Params& prm, const PeriodicField& f,
                            int steps = 20);

/// Runs newton_solve from k spread-out initial fields and returns the largest
/// pairwise sup-distance between the solutions found (0 if fewer than two
/// attempts converge). Large spreads flag genuine multiplicity.
double uniqueness_probe(const Params& prm, const PeriodicField& f, int k,
                        std::uint64_t seed = 2024, ProbeStats* stats = nullptr);

/// For 1 <= p < n = 2 and data admitting two constant-problem roots, continue
/// each root to f and return both branches (low volume first).
BranchPair two_branch_solve(const Params& prm, const PeriodicField& f,
                            std::optional<double> mass_threshold = std::nullopt);

}  // namespace gmk::ma

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gmk/params.hpp"

namespace gmk::geom {

/// Point or direction in R^3; for dim = 2 the third component stays 0.
using Vec = std::array<double, 3>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec scaled(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double norm(const Vec& a);
Vec normalized(const Vec& a);

/// Fixed evaluation grid on the sphere S^{dim-1}.
struct SphereGrid {
    int dim = 2;
    std::vector<Vec> dirs;
    /// antipode[i] = j with dirs[j] = -dirs[i], or -1 when the grid is not
    /// closed under the antipodal map.
    std::vector<int> antipode;

    bool antipodal_closed() const;
    int size() const { return static_cast<int>(dirs.size()); }
};

/// m uniformly spaced angles on the circle; antipodally closed for even m.
SphereGrid circle_grid(int m);

/// Fibonacci point set on S^2 (quasi-uniform, not antipodally closed).
SphereGrid fibonacci_grid(int m);

/// Antipodally closed S^2 grid: m/2 Fibonacci points on the upper hemisphere
/// plus their antipodes; m must be even.
SphereGrid symmetric_fibonacci_grid(int m);

/// Candidate support numbers h_i > 0 over a sphere grid.
struct SupportVector {
    SphereGrid grid;
    std::vector<double> values;

    void validate() const;  // positivity and size match
};

struct Facet {
    Vec normal;             // unit outward
    double support = 0.0;   // distance of the supporting hyperplane from the origin
    std::vector<int> ring;  // vertex indices: segment endpoints (dim 2) or CCW loop (dim 3)
    double area = 0.0;      // boundary measure of the facet
    int source = -1;        // generating grid index, -1 when not grid-built
};

/// Bounded convex polytope with the origin interior.  Immutable once built.
struct Polytope {
    int dim = 2;
    std::vector<Facet> facets;
    std::vector<Vec> vertices;

    double circumradius() const;
    double inradius() const;  // min facet support = largest centered ball inside
};

/// Halfspace intersection [z] = cap_i {x : x . v_i <= z_i}, built through the
/// polar hull of the points v_i/z_i.  Inactive constraints yield no facet;
/// facet.source records the generating grid index.
/// Throws precondition_error when the grid leaves the body unbounded.
Polytope wulff_shape(const SupportVector& z);

/// Support numbers of wulff_shape(z) sampled back on z's grid.
/// Idempotent, componentwise <= z.
SupportVector canonicalize(const SupportVector& z);

double support_function(const Polytope& K, const Vec& u);

/// max{t : t u in K}; u need not be unit but must be nonzero.
double radial_function(const Polytope& K, const Vec& u);

/// Polar body K* = {x : x.y <= 1 for all y in K}; requires origin interior.
Polytope polar_body(const Polytope& K);

/// values = ((1-lambda) h_K^p + lambda h_L^p)^{1/p} on the shared grid, canonicalized.
SupportVector lp_combine(const SupportVector& K, const SupportVector& L, double lambda, double p);

/// Support-function sup distance sampled over a fine grid joined with both
/// bodies' facet normals and vertex directions.
double hausdorff_distance(const Polytope& K, const Polytope& L);

/// Euclidean volume (n=2 area / n=3 volume) via (1/n) sum h_i area_i.
double euclidean_volume(const Polytope& K);

struct RadialPerturbationReport {
    std::vector<double> t_values;
    std::vector<double> max_deviation;  // sup over probes of |FD derivative - predicted|
    double fitted_order = 0.0;          // log-log slope of max_deviation vs t
    double lipschitz_m = 0.0;           // max |rho_t - rho| / t observed
};

/// Compares the one-sided radial derivative of t -> [(h^p + t f^p)^{1/p}]
/// against f(a_K(u))^p / (p h(a_K(u))^p) * rho_K(u) over random rays,
/// skipping rays that pass near facet boundaries.
RadialPerturbationReport radial_perturbation_check(const Polytope& K,
                                                   const std::vector<double>& f, double p,
                                                   const std::vector<double>& t_list,
                                                   uint64_t seed = 7u);

}  // namespace gmk::geom

#pragma once

#include <stdexcept>
#include <string>

#include "gmk/geometry.hpp"
#include "gmk/inequalities.hpp"
#include "gmk/ma_solver.hpp"
#include "gmk/measures.hpp"
#include "gmk/params.hpp"
#include "gmk/variational_solver.hpp"

namespace gmk::ser {

/// Raised when a file or text payload cannot be parsed into the requested
/// structure (distinct from precondition_error: the data is malformed, not
/// merely outside a theorem's hypotheses).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest round-trip decimal representation of a double (deterministic).
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ---- convex bodies -------------------------------------------------------
/// {"facets":[{"normal":[...],"support":s},...],"vertices":[[...],...]}
std::string polytope_json(const geom::Polytope& K);
/// Rebuilds the body as the intersection of the listed halfspaces; vertices
/// in the payload are ignored and recomputed.  Dimension is inferred from the
/// normal component count (2 or 3).
geom::Polytope polytope_from_json_text(const std::string& text);

// ---- surface-area measures -----------------------------------------------
std::string atoms_json(const measures::SurfaceMeasureAtoms& atoms);
/// Comment header with params, then one "n1,...,weight" row per atom.
std::string atoms_csv(const measures::SurfaceMeasureAtoms& atoms);

// ---- normalized Minkowski problems ----------------------------------------
struct Problem {
    Params params;
    vs::DiscreteMeasure measure;
    double c = 0.5;
};
/// {"params":{"n":..,"alpha":..,"q":..,"p":..},
///  "measure":{"atoms":[{"dir":[..],"w":..},...],"even":bool},"c":..}
Problem problem_from_json_text(const std::string& text);
std::string problem_json(const Problem& problem);
std::string solution_json(const Params& prm, const vs::NormalizedSolution& sol);

// ---- planar Monge-Ampere data ----------------------------------------------
/// CSV rows "theta,value" on the uniform periodic grid (header and '#'
/// comment lines allowed); thetas must match 2*pi*j/m.
ma::PeriodicField field_from_csv_text(const std::string& text);
/// {"type":"cosine","c":..,"amp":..,"mode":..} on a grid of the given size.
ma::PeriodicField field_from_json_text(const std::string& text, int grid);
std::string field_csv(const ma::PeriodicField& f);
/// Plot table: "theta,h,dh,residual" with the same stencils as the solver.
std::string ma_solution_csv(const Params& prm, const ma::PeriodicField& f,
                            const ma::MASolution& sol);
std::string ma_report_json(const Params& prm, const ma::MASolution& sol);

// ---- isotropic constant solutions ------------------------------------------
std::string trichotomy_json(const Params& prm, double c);
/// "r,phi" samples of the radial profile functional on (0, r_max].
std::string phi_curve_csv(const Params& prm, double r_max, int samples);

// ---- inequality suites ------------------------------------------------------
std::string defect_report_json(const ineq::DefectReport& rep);
std::string defect_report_csv(const ineq::DefectReport& rep);

}  // namespace gmk::ser

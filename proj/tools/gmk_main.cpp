// Command-line front end: volumes, surface measures, Minkowski solvers,
// isotropic constant-solution reports, and inequality verification suites.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmk/density.hpp"
#include "gmk/geometry.hpp"
#include "gmk/inequalities.hpp"
#include "gmk/isotropic.hpp"
#include "gmk/ma_solver.hpp"
#include "gmk/measures.hpp"
#include "gmk/params.hpp"
#include "gmk/serialization.hpp"
#include "gmk/variational_solver.hpp"

namespace {

using nlohmann::json;
namespace geom = gmk::geom;
namespace ser = gmk::ser;

gmk::Params parse_params(const std::string& text) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ser::input_error("--params expects n,alpha,q,p; cannot parse '" + tok + "'");
        vals.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (vals.size() != 4) throw ser::input_error("--params expects exactly four values n,alpha,q,p");
    if (vals[0] != 2.0 && vals[0] != 3.0)
        throw ser::input_error("--params: n must be 2 or 3");
    return gmk::Params{static_cast<int>(vals[0]), vals[1], vals[2], vals[3]};
}

geom::SphereGrid uniform_grid(int n, int m) {
    if (n == 2) return geom::circle_grid(m);
    return geom::symmetric_fibonacci_grid(m + (m % 2));
}

geom::SupportVector sample_support(const geom::Polytope& K, const geom::SphereGrid& grid) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid.size()));
    for (const auto& u : grid.dirs) values.push_back(geom::support_function(K, u));
    return geom::SupportVector{grid, values};
}

std::string sibling_path(const std::string& path, const std::string& new_ext) {
    std::size_t slash = path.find_last_of('/');
    std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + new_ext;
    return path.substr(0, dot) + new_ext;
}

std::string branch_path(const std::string& path, const std::string& tag) {
    std::size_t slash = path.find_last_of('/');
    std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

void emit(const std::string& payload, const std::string& out_path) {
    std::cout << payload;
    if (!out_path.empty()) ser::write_text_file(out_path, payload);
}

int cmd_volume(const std::string& body_path, const gmk::Params& prm, int grid,
               const std::string& out_path) {
    geom::Polytope body = ser::polytope_from_json_text(ser::read_text_file(body_path));
    if (body.dim != prm.n)
        throw ser::input_error("body dimension " + std::to_string(body.dim) +
                               " does not match --params n=" + std::to_string(prm.n));
    prm.validate();

    double exact = gmk::measures::gauss_volume(prm, body);
    double coarse = gmk::measures::gauss_volume(
        prm, geom::wulff_shape(sample_support(body, uniform_grid(prm.n, grid))));
    double fine = gmk::measures::gauss_volume(
        prm, geom::wulff_shape(sample_support(body, uniform_grid(prm.n, 2 * grid))));

    json out{{"schema_version", 1},
             {"params", json{{"n", prm.n}, {"alpha", prm.alpha}, {"q", prm.q}, {"p", prm.p}}},
             {"grid", grid},
             {"G", exact},
             {"G_grid", fine},
             {"G_grid_coarse", coarse},
             {"error_estimate", std::abs(fine - coarse)}};
    emit(out.dump(2) + "\n", out_path);
    return 0;
}

int cmd_surface_measure(const std::string& body_path, const gmk::Params& prm,
                        const std::string& out_path) {
    geom::Polytope body = ser::polytope_from_json_text(ser::read_text_file(body_path));
    if (body.dim != prm.n)
        throw ser::input_error("body dimension does not match --params n");
    prm.validate();
    gmk::measures::SurfaceMeasureAtoms atoms =
        gmk::measures::weighted_surface_measure(prm, body, prm.p);
    bool as_json = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json";
    emit(as_json ? ser::atoms_json(atoms) : ser::atoms_csv(atoms), out_path);
    return 0;
}

int cmd_solve_normalized(const std::string& problem_path, std::optional<gmk::Params> override_prm,
                         double tol, const std::string& out_path) {
    ser::Problem prob = ser::problem_from_json_text(ser::read_text_file(problem_path));
    gmk::Params prm = override_prm.value_or(prob.params);
    gmk::vs::NormalizedSolution sol =
        prm.p < 0.0 ? gmk::vs::solve_normalized_even(prm, prob.measure, prob.c, tol)
                    : gmk::vs::solve_normalized(prm, prob.measure, prob.c, tol);
    emit(ser::solution_json(prm, sol), out_path);
    return 0;
}

int cmd_solve_ma2d(const std::string& data_path, const std::string& family_path,
                   const gmk::Params& prm, int grid, std::optional<double> mass_threshold,
                   const std::string& out_path) {
    if (data_path.empty() == family_path.empty())
        throw ser::input_error("provide exactly one of --data (CSV) or --family (JSON)");
    gmk::ma::PeriodicField f =
        !data_path.empty()
            ? ser::field_from_csv_text(ser::read_text_file(data_path))
            : ser::field_from_json_text(ser::read_text_file(family_path), grid);

    if (prm.p >= 2.0) {
        gmk::ma::MASolution sol = gmk::ma::continuity_solve(prm, f);
        std::string report = ser::ma_report_json(prm, sol);
        std::cout << report;
        if (!out_path.empty()) {
            ser::write_text_file(out_path, ser::ma_solution_csv(prm, f, sol));
            ser::write_text_file(sibling_path(out_path, ".json"), report);
        }
        return 0;
    }

    gmk::ma::BranchPair pair = gmk::ma::two_branch_solve(prm, f, mass_threshold);
    json report{{"schema_version", 1},
                {"low", json::parse(ser::ma_report_json(prm, pair.low))},
                {"high", json::parse(ser::ma_report_json(prm, pair.high))}};
    std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        ser::write_text_file(branch_path(out_path, "_low"), ser::ma_solution_csv(prm, f, pair.low));
        ser::write_text_file(branch_path(out_path, "_high"),
                             ser::ma_solution_csv(prm, f, pair.high));
        ser::write_text_file(sibling_path(out_path, ".json"), text);
    }
    return 0;
}

int cmd_isotropic(const gmk::Params& prm, double c, int samples, const std::string& out_path) {
    std::string report = ser::trichotomy_json(prm, c);

    double r_max;
    if (auto cutoff = gmk::density::support_cutoff(prm)) {
        r_max = 0.999 * *cutoff;
    } else {
        gmk::iso::CriticalConstant crit = gmk::iso::critical_constant(prm);
        r_max = crit.exists ? 3.0 * crit.r_star : 5.0;
    }
    std::string curve = ser::phi_curve_csv(prm, r_max, samples);

    std::cout << report;
    if (!out_path.empty()) {
        ser::write_text_file(out_path, report);
        ser::write_text_file(sibling_path(out_path, ".csv"), curve);
    }
    return 0;
}

int cmd_check(const std::string& suite, const gmk::Params& prm, int trials, std::uint64_t seed,
              const std::string& out_path) {
    if (suite == "threshold") {
        double est = gmk::ineq::estimate_isoperimetric_half(prm, trials, seed);
        json thresholds;
        for (double p : {1.0, 1.5, 2.0, 3.0})
            thresholds[ser::format_double(p)] =
                gmk::ineq::threshold_report(prm.with_p(p), est);
        json out{{"schema_version", 1},
                 {"params", json{{"n", prm.n}, {"alpha", prm.alpha}, {"q", prm.q}, {"p", prm.p}}},
                 {"trials", trials},
                 {"seed", seed},
                 {"I_half_estimate", est},
                 {"thresholds", thresholds}};
        emit(out.dump(2) + "\n", out_path);
        return 0;
    }

    gmk::ineq::DefectReport total;
    auto merge = [&total](const gmk::ineq::DefectReport& rep, std::uint64_t trial_seed) {
        if (total.trials == 0 || rep.min_defect < total.min_defect)
            total.min_defect = rep.min_defect;
        total.trials += rep.trials;
        for (auto v : rep.violations) {
            v.seed = trial_seed;
            total.violations.push_back(v);
        }
    };

    const std::vector<double> lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    for (int t = 0; t < trials; ++t) {
        std::uint64_t trial_seed = seed + 2ULL * static_cast<std::uint64_t>(t);
        if (suite == "bm") {
            geom::SupportVector k = gmk::ineq::random_symmetric_body(trial_seed, prm.n);
            geom::SupportVector l = gmk::ineq::random_symmetric_body(trial_seed + 1, prm.n);
            merge(gmk::ineq::check_brunn_minkowski(prm, k, l, lambdas), trial_seed);
        } else if (suite == "lp-iso") {
            geom::Polytope body =
                geom::wulff_shape(gmk::ineq::random_symmetric_body(trial_seed, prm.n));
            merge(gmk::ineq::check_lp_isoperimetric(prm, body), trial_seed);
        } else if (suite == "gtilde") {
            geom::Polytope body =
                geom::wulff_shape(gmk::ineq::random_symmetric_body(trial_seed, prm.n));
            merge(gmk::ineq::check_gtilde(prm, body), trial_seed);
        } else {
            throw ser::input_error("unknown suite '" + suite +
                                   "' (expected bm, lp-iso, gtilde or threshold)");
        }
    }

    bool as_csv = out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv";
    emit(as_csv ? ser::defect_report_csv(total) : ser::defect_report_json(total), out_path);
    return total.violations.empty() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized Gaussian volumes, L_p surface measures and Minkowski solvers"};
    app.require_subcommand(1);

    std::string params_spec = "2,2,0,1";
    std::string body_path, problem_path, data_path, family_path, out_path, suite;
    int grid = 0;
    int samples = 400;
    int trials = 100;
    std::uint64_t seed = 2024;
    double tol = 1e-5;
    double c_value = 0.5;
    double mass_threshold_value = 0.0;
    bool params_given = false, threshold_given = false;

    auto add_common = [&](CLI::App* cmd, bool with_grid) {
        cmd->add_option("--params", params_spec, "problem parameters n,alpha,q,p")
            ->each([&](const std::string&) { params_given = true; });
        if (with_grid) cmd->add_option("--grid", grid, "evaluation grid size");
        cmd->add_option("--out", out_path, "output file path");
    };

    CLI::App* volume = app.add_subcommand("volume", "Gaussian-type volume of a body");
    volume->add_option("--body", body_path, "polytope JSON file")->required();
    add_common(volume, true);

    CLI::App* surf = app.add_subcommand("surface-measure", "weighted surface-area measure atoms");
    surf->add_option("--body", body_path, "polytope JSON file")->required();
    add_common(surf, false);

    CLI::App* solve = app.add_subcommand("solve-normalized", "normalized Minkowski problem");
    solve->add_option("--problem", problem_path, "problem JSON file")->required();
    solve->add_option("--tol", tol, "first-order residual tolerance");
    add_common(solve, false);

    CLI::App* ma2d = app.add_subcommand("solve-ma2d", "planar curvature equation solver");
    ma2d->add_option("--data", data_path, "data CSV file (theta,value)");
    ma2d->add_option("--family", family_path, "analytic data family JSON config");
    ma2d->add_option("--mass-threshold", mass_threshold_value, "two-branch mass threshold")
        ->each([&](const std::string&) { threshold_given = true; });
    add_common(ma2d, true);

    CLI::App* iso = app.add_subcommand("isotropic", "constant-solution trichotomy report");
    iso->add_option("--c", c_value, "constant right-hand side")->required();
    iso->add_option("--samples", samples, "profile curve sample count");
    add_common(iso, false);

    CLI::App* check = app.add_subcommand("check", "randomized inequality suites");
    check->add_option("--suite", suite, "bm | lp-iso | gtilde | threshold")->required();
    check->add_option("--trials", trials, "number of random trials");
    check->add_option("--seed", seed, "base seed");
    add_common(check, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        gmk::Params prm = parse_params(params_spec);
        if (grid <= 0) grid = prm.n == 2 ? 512 : 64;
        std::optional<double> mass_threshold;
        if (threshold_given) mass_threshold = mass_threshold_value;

        if (app.got_subcommand(volume)) return cmd_volume(body_path, prm, grid, out_path);
        if (app.got_subcommand(surf)) return cmd_surface_measure(body_path, prm, out_path);
        if (app.got_subcommand(solve))
            return cmd_solve_normalized(
                problem_path, params_given ? std::optional<gmk::Params>(prm) : std::nullopt, tol,
                out_path);
        if (app.got_subcommand(ma2d))
            return cmd_solve_ma2d(data_path, family_path, prm, grid, mass_threshold, out_path);
        if (app.got_subcommand(iso)) return cmd_isotropic(prm, c_value, samples, out_path);
        if (app.got_subcommand(check)) return cmd_check(suite, prm, trials, seed, out_path);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const gmk::ser::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const gmk::precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 3;
    } catch (const gmk::nonconvergence_error& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

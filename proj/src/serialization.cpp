#include "gmk/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gmk/isotropic.hpp"

namespace gmk::ser {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json params_json(const Params& prm) {
    return json{{"n", prm.n}, {"alpha", prm.alpha}, {"q", prm.q}, {"p", prm.p}};
}

json vec_json(const geom::Vec& v, int dim) {
    json out = json::array();
    for (int c = 0; c < dim; ++c) out.push_back(v[c]);
    return out;
}

geom::Vec vec_from_json(const json& arr, int* dim_out) {
    if (!arr.is_array() || (arr.size() != 2 && arr.size() != 3))
        throw input_error("vector payload must have 2 or 3 components");
    geom::Vec v{0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < arr.size(); ++c) v[c] = arr[c].get<double>();
    if (dim_out) *dim_out = static_cast<int>(arr.size());
    return v;
}

double parse_number(const std::string& tok, const char* what) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v))
        throw input_error(std::string("cannot parse ") + what + " from '" + tok + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

/// Grid over explicit directions with antipode pairing discovered by scan.
geom::SphereGrid grid_from_dirs(const std::vector<geom::Vec>& dirs, int dim) {
    geom::SphereGrid grid;
    grid.dim = dim;
    grid.dirs = dirs;
    int m = static_cast<int>(dirs.size());
    grid.antipode.assign(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double dist = 0.0;
            for (int c = 0; c < 3; ++c)
                dist = std::max(dist, std::abs(dirs[static_cast<std::size_t>(i)][c] +
                                               dirs[static_cast<std::size_t>(j)][c]));
            if (dist <= 1e-10) {
                grid.antipode[static_cast<std::size_t>(i)] = j;
                break;
            }
        }
    }
    return grid;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write file: " + path);
    out << content;
}

std::string polytope_json(const geom::Polytope& K) {
    json facets = json::array();
    for (const auto& f : K.facets)
        facets.push_back(json{{"normal", vec_json(f.normal, K.dim)}, {"support", f.support}});
    json vertices = json::array();
    for (const auto& v : K.vertices) vertices.push_back(vec_json(v, K.dim));
    json out{{"facets", facets}, {"vertices", vertices}};
    return out.dump(2) + "\n";
}

geom::Polytope polytope_from_json_text(const std::string& text) {
    try {
        json payload = json::parse(text);
        if (!payload.contains("facets") || !payload["facets"].is_array() ||
            payload["facets"].empty())
            throw input_error("body payload needs a nonempty 'facets' array");
        std::vector<geom::Vec> dirs;
        std::vector<double> values;
        int dim = 0;
        for (const auto& f : payload["facets"]) {
            int d = 0;
            geom::Vec nrm = vec_from_json(f.at("normal"), &d);
            if (dim == 0) dim = d;
            if (d != dim) throw input_error("mixed normal dimensions in body payload");
            double len = geom::norm(nrm);
            if (!(len > 0.0)) throw input_error("zero facet normal in body payload");
            double support = f.at("support").get<double>();
            if (!(support > 0.0))
                throw input_error("facet support numbers must be positive (origin interior)");
            dirs.push_back(geom::scaled(nrm, 1.0 / len));
            values.push_back(support / len);
        }
        geom::SupportVector sv{grid_from_dirs(dirs, dim), values};
        return geom::wulff_shape(sv);
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed body JSON: ") + e.what());
    }
}

std::string atoms_json(const measures::SurfaceMeasureAtoms& atoms) {
    json list = json::array();
    for (std::size_t i = 0; i < atoms.weights.size(); ++i)
        list.push_back(json{{"normal", vec_json(atoms.normals[i], atoms.params.n)},
                            {"weight", atoms.weights[i]}});
    json out{{"schema_version", kSchemaVersion},
             {"params", params_json(atoms.params)},
             {"p", atoms.p},
             {"total", measures::total_measure(atoms)},
             {"atoms", list}};
    return out.dump(2) + "\n";
}

std::string atoms_csv(const measures::SurfaceMeasureAtoms& atoms) {
    std::ostringstream out;
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "# params=" << atoms.params.n << "," << format_double(atoms.params.alpha) << ","
        << format_double(atoms.params.q) << "," << format_double(atoms.params.p) << "\n";
    out << "# p=" << format_double(atoms.p) << "\n";
    out << (atoms.params.n == 2 ? "n1,n2,weight" : "n1,n2,n3,weight") << "\n";
    for (std::size_t i = 0; i < atoms.weights.size(); ++i) {
        for (int c = 0; c < atoms.params.n; ++c) out << format_double(atoms.normals[i][c]) << ",";
        out << format_double(atoms.weights[i]) << "\n";
    }
    return out.str();
}

Problem problem_from_json_text(const std::string& text) {
    try {
        json payload = json::parse(text);
        Problem prob;
        const json& pj = payload.at("params");
        prob.params.n = pj.at("n").get<int>();
        prob.params.alpha = pj.at("alpha").get<double>();
        prob.params.q = pj.at("q").get<double>();
        prob.params.p = pj.at("p").get<double>();

        const json& mj = payload.at("measure");
        prob.measure.dim = prob.params.n;
        prob.measure.even = mj.value("even", false);
        if (!mj.contains("atoms") || !mj["atoms"].is_array() || mj["atoms"].empty())
            throw input_error("measure payload needs a nonempty 'atoms' array");
        for (const auto& a : mj["atoms"]) {
            int d = 0;
            geom::Vec dir = vec_from_json(a.at("dir"), &d);
            if (d != prob.params.n)
                throw input_error("measure atom dimension differs from params n");
            double len = geom::norm(dir);
            if (!(len > 0.0)) throw input_error("zero atom direction");
            prob.measure.directions.push_back(geom::scaled(dir, 1.0 / len));
            prob.measure.weights.push_back(a.at("w").get<double>());
        }
        prob.c = payload.at("c").get<double>();
        return prob;
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed problem JSON: ") + e.what());
    }
}

std::string problem_json(const Problem& prob) {
    json atoms = json::array();
    for (std::size_t i = 0; i < prob.measure.weights.size(); ++i)
        atoms.push_back(json{{"dir", vec_json(prob.measure.directions[i], prob.measure.dim)},
                             {"w", prob.measure.weights[i]}});
    json out{{"params", params_json(prob.params)},
             {"measure", json{{"atoms", atoms}, {"even", prob.measure.even}}},
             {"c", prob.c}};
    return out.dump(2) + "\n";
}

std::string solution_json(const Params& prm, const vs::NormalizedSolution& sol) {
    json support = json::array();
    for (double v : sol.support) support.push_back(v);
    json warnings = json::array();
    for (const auto& w : sol.warnings) warnings.push_back(w);
    json out{{"schema_version", kSchemaVersion},
             {"params", params_json(prm)},
             {"target_volume", sol.target_volume},
             {"achieved_volume", sol.achieved_volume},
             {"multiplier", sol.multiplier},
             {"first_order_residual", sol.first_order_residual},
             {"tangent_residual", sol.tangent_residual},
             {"objective", sol.objective},
             {"initial_objective", sol.initial_objective},
             {"iterations", sol.iterations},
             {"all_facets_active", sol.all_facets_active},
             {"warnings", warnings},
             {"support", support},
             {"body", json::parse(polytope_json(sol.body))}};
    return out.dump(2) + "\n";
}

ma::PeriodicField field_from_csv_text(const std::string& text) {
    std::vector<double> thetas, values;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_csv_line(line);
        if (toks.size() < 2) throw input_error("data rows need 'theta,value': " + line);
        // Allow one header row of column names.
        char* end = nullptr;
        std::strtod(toks[0].c_str(), &end);
        if (end == toks[0].c_str()) {
            if (thetas.empty()) continue;
            throw input_error("cannot parse row: " + line);
        }
        thetas.push_back(parse_number(toks[0], "theta"));
        values.push_back(parse_number(toks[1], "value"));
    }
    if (thetas.empty()) throw input_error("no data rows found");

    ma::PeriodicField f;
    f.values = values;
    try {
        f.validate();
    } catch (const precondition_error& e) {
        throw input_error(std::string("bad grid: ") + e.what());
    }
    for (std::size_t j = 0; j < thetas.size(); ++j)
        if (std::abs(thetas[j] - f.theta(static_cast<int>(j))) > 1e-9)
            throw input_error("theta column must be the uniform periodic grid 2*pi*j/m");
    return f;
}

ma::PeriodicField field_from_json_text(const std::string& text, int grid) {
    try {
        json payload = json::parse(text);
        std::string type = payload.at("type").get<std::string>();
        if (type == "constant")
            return ma::PeriodicField::constant(payload.at("c").get<double>(), grid);
        if (type == "cosine")
            return ma::PeriodicField::cosine(payload.at("c").get<double>(),
                                             payload.at("amp").get<double>(),
                                             payload.at("mode").get<int>(), grid);
        throw input_error("unknown data family type: " + type);
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed data-family JSON: ") + e.what());
    }
}

std::string field_csv(const ma::PeriodicField& f) {
    std::ostringstream out;
    out << "theta,value\n";
    for (std::size_t j = 0; j < f.values.size(); ++j)
        out << format_double(f.theta(static_cast<int>(j))) << ","
            << format_double(f.values[j]) << "\n";
    return out.str();
}

std::string ma_solution_csv(const Params& prm, const ma::PeriodicField& f,
                            const ma::MASolution& sol) {
    const std::vector<double>& h = sol.h.values;
    const int m = static_cast<int>(h.size());
    std::vector<double> res = ma::residual(prm, f, sol.h);
    const double dt = 2.0 * std::acos(-1.0) / m;

    std::ostringstream out;
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "# params=" << prm.n << "," << format_double(prm.alpha) << ","
        << format_double(prm.q) << "," << format_double(prm.p) << "\n";
    out << "theta,h,dh,residual\n";
    for (int j = 0; j < m; ++j) {
        auto at = [&](int k) { return h[static_cast<std::size_t>(((k % m) + m) % m)]; };
        double dh = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * dt);
        out << format_double(sol.h.theta(j)) << "," << format_double(h[static_cast<std::size_t>(j)])
            << "," << format_double(dh) << "," << format_double(res[static_cast<std::size_t>(j)])
            << "\n";
    }
    return out.str();
}

std::string ma_report_json(const Params& prm, const ma::MASolution& sol) {
    const char* branch = sol.branch == ma::Branch::Unique
                             ? "unique"
                             : (sol.branch == ma::Branch::Low ? "low" : "high");
    json warnings = json::array();
    for (const auto& w : sol.warnings) warnings.push_back(w);
    json out{{"schema_version", kSchemaVersion},
             {"params", params_json(prm)},
             {"grid", static_cast<int>(sol.h.values.size())},
             {"residual_sup", sol.residual_sup},
             {"iterations", sol.iterations},
             {"volume", sol.volume},
             {"branch", branch},
             {"bounds_ok", sol.bounds_ok},
             {"warnings", warnings}};
    return out.dump(2) + "\n";
}

std::string trichotomy_json(const Params& prm, double c) {
    iso::Trichotomy tri = iso::constant_roots(prm, c);
    iso::CriticalConstant crit = iso::critical_constant(prm);
    const char* kind = tri.kind == iso::RootKind::TwoRoots
                           ? "two_roots"
                           : (tri.kind == iso::RootKind::OneRoot ? "one_root" : "no_root");
    json out{{"schema_version", kSchemaVersion},
             {"params", params_json(prm)},
             {"c", c},
             {"kind", kind},
             {"r1", tri.r1},
             {"r2", tri.r2},
             {"critical_c", tri.critical_c},
             {"phi_max_arg", tri.phi_max_arg},
             {"critical_constant",
              json{{"exists", crit.exists},
                   {"c_star", crit.c_star},
                   {"r_star", crit.r_star},
                   {"r_star_closed", crit.r_star_closed},
                   {"c_star_variant", crit.c_star_variant},
                   {"r_gap", crit.r_gap},
                   {"c_gap", crit.c_gap}}}};
    return out.dump(2) + "\n";
}

std::string phi_curve_csv(const Params& prm, double r_max, int samples) {
    if (!(r_max > 0.0) || samples < 2)
        throw precondition_error("phi_curve_csv: need r_max > 0 and samples >= 2");
    std::ostringstream out;
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "# params=" << prm.n << "," << format_double(prm.alpha) << ","
        << format_double(prm.q) << "," << format_double(prm.p) << "\n";
    out << "r,phi\n";
    for (int i = 1; i <= samples; ++i) {
        double r = r_max * i / samples;
        out << format_double(r) << "," << format_double(iso::phi(prm, r)) << "\n";
    }
    return out.str();
}

std::string defect_report_json(const ineq::DefectReport& rep) {
    json violations = json::array();
    for (const auto& v : rep.violations)
        violations.push_back(
            json{{"seed", v.seed}, {"description", v.description}, {"defect", v.defect}});
    json out{{"schema_version", kSchemaVersion},
             {"trials", rep.trials},
             {"min_defect", rep.min_defect},
             {"tolerance", rep.tolerance},
             {"violations", violations}};
    return out.dump(2) + "\n";
}

std::string defect_report_csv(const ineq::DefectReport& rep) {
    std::ostringstream out;
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "# trials=" << rep.trials << " min_defect=" << format_double(rep.min_defect)
        << " tolerance=" << format_double(rep.tolerance) << "\n";
    out << "seed,defect,description\n";
    for (const auto& v : rep.violations)
        out << v.seed << "," << format_double(v.defect) << "," << v.description << "\n";
    return out.str();
}

}  // namespace gmk::ser

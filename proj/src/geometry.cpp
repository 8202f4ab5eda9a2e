#include "gmk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "gmk/quickhull.hpp"
#include "gmk/rng.hpp"

namespace gmk::geom {

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec normalized(const Vec& a) {
    const double len = norm(a);
    if (len <= 0.0) throw precondition_error("normalized: zero vector");
    return scaled(a, 1.0 / len);
}

bool SphereGrid::antipodal_closed() const {
    return !antipode.empty()
           && std::none_of(antipode.begin(), antipode.end(), [](int j) { return j < 0; });
}

namespace {

void fill_antipodes(SphereGrid& g, double tol = 1e-9) {
    g.antipode.assign(g.dirs.size(), -1);
    for (size_t i = 0; i < g.dirs.size(); ++i) {
        if (g.antipode[i] >= 0) continue;
        for (size_t j = i + 1; j < g.dirs.size(); ++j) {
            if (norm(add(g.dirs[i], g.dirs[j])) < tol) {
                g.antipode[i] = static_cast<int>(j);
                g.antipode[j] = static_cast<int>(i);
                break;
            }
        }
    }
}

}  // namespace

SphereGrid circle_grid(int m) {
    if (m < 3) throw precondition_error("circle_grid: need at least 3 directions");
    SphereGrid g;
    g.dim = 2;
    g.dirs.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * M_PI * j / m;
        g.dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
    g.antipode.assign(m, -1);
    if (m % 2 == 0)
        for (int j = 0; j < m; ++j) g.antipode[j] = (j + m / 2) % m;
    return g;
}

SphereGrid fibonacci_grid(int m) {
    if (m < 4) throw precondition_error("fibonacci_grid: need at least 4 directions");
    SphereGrid g;
    g.dim = 3;
    g.dirs.reserve(m);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < m; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * M_PI * k / golden;
        g.dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    g.antipode.assign(m, -1);
    return g;
}

SphereGrid symmetric_fibonacci_grid(int m) {
    if (m < 6 || m % 2 != 0)
        throw precondition_error("symmetric_fibonacci_grid: m must be even and >= 6");
    SphereGrid g;
    g.dim = 3;
    const int half = m / 2;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < half; ++k) {
        const double z = (2.0 * k + 1.0) / m;  // upper open hemisphere
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * M_PI * k / golden;
        g.dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    for (int k = 0; k < half; ++k) g.dirs.push_back(scaled(g.dirs[k], -1.0));
    g.antipode.assign(m, -1);
    for (int k = 0; k < half; ++k) {
        g.antipode[k] = k + half;
        g.antipode[k + half] = k;
    }
    return g;
}

void SupportVector::validate() const {
    if (values.size() != grid.dirs.size())
        throw std::invalid_argument("SupportVector: grid/value size mismatch");
    if (grid.dirs.empty()) throw std::invalid_argument("SupportVector: empty grid");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw precondition_error("SupportVector: values must be strictly positive");
}

double Polytope::circumradius() const {
    double r = 0.0;
    for (const auto& v : vertices) r = std::max(r, norm(v));
    return r;
}

double Polytope::inradius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) r = std::min(r, f.support);
    return r;
}

namespace {

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Merge points closer than tol; returns remap old index -> new index.
std::vector<int> dedupe_points(std::vector<Vec>& pts, double tol) {
    std::vector<Vec> kept;
    std::vector<int> remap(pts.size(), -1);
    for (size_t i = 0; i < pts.size(); ++i) {
        int hit = -1;
        for (size_t j = 0; j < kept.size(); ++j)
            if (norm(sub(pts[i], kept[j])) < tol) {
                hit = static_cast<int>(j);
                break;
            }
        if (hit < 0) {
            kept.push_back(pts[i]);
            hit = static_cast<int>(kept.size()) - 1;
        }
        remap[i] = hit;
    }
    pts = std::move(kept);
    return remap;
}

Polytope wulff_shape_2d(const SupportVector& z) {
    const int m = z.grid.size();
    std::vector<Vec> pts(m);
    double scale = 0.0;
    for (int i = 0; i < m; ++i) {
        pts[i] = scaled(z.grid.dirs[i], 1.0 / z.values[i]);
        scale = std::max(scale, norm(pts[i]));
    }
    const double eps_area = 1e-13 * scale * scale;

    // Monotone chain over the polar points; extreme points = active constraints.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&pts](int a, int b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        if (pts[a][1] != pts[b][1]) return pts[a][1] < pts[b][1];
        return a < b;
    });
    auto build = [&](std::vector<int>& chain, bool lower) {
        for (int idx : order) {
            while (chain.size() >= 2) {
                const Vec& a = pts[chain[chain.size() - 2]];
                const Vec& b = pts[chain[chain.size() - 1]];
                const double c = cross2(sub(b, a), sub(pts[idx], a));
                if ((lower && c > eps_area) || (!lower && c < -eps_area)) break;
                chain.pop_back();
            }
            chain.push_back(idx);
        }
    };
    std::vector<int> lower_chain, upper_chain;
    build(lower_chain, true);
    build(upper_chain, false);
    std::vector<int> hull(lower_chain.begin(), lower_chain.end() - 1);
    hull.insert(hull.end(), upper_chain.rbegin(), upper_chain.rend() - 1);
    if (hull.size() < 3) throw precondition_error("wulff_shape: degenerate polar hull");

    // Origin strictly inside the polar hull <=> the body is bounded.
    const int k = static_cast<int>(hull.size());
    for (int j = 0; j < k; ++j)
        if (cross2(pts[hull[j]], pts[hull[(j + 1) % k]]) <= eps_area)
            throw precondition_error("wulff_shape: grid concentrated on a hemisphere (unbounded body)");

    Polytope body;
    body.dim = 2;
    std::vector<Vec> verts(k);
    for (int j = 0; j < k; ++j) {
        const int a = hull[j], b = hull[(j + 1) % k];
        const Vec& va = z.grid.dirs[a];
        const Vec& vb = z.grid.dirs[b];
        const double det = cross2(va, vb);
        if (std::abs(det) < 1e-14)
            throw precondition_error("wulff_shape: nearly parallel active constraints");
        verts[j] = {(z.values[a] * vb[1] - z.values[b] * va[1]) / det,
                    (z.values[b] * va[0] - z.values[a] * vb[0]) / det, 0.0};
    }
    double bscale = 0.0;
    for (const auto& v : verts) bscale = std::max(bscale, norm(v));
    // Vertices arrive in CCW order, so duplicates can only be consecutive.
    const double vtol = 1e-12 * std::max(1.0, bscale);
    std::vector<int> remap(k, 0);
    std::vector<Vec> kept;
    for (int j = 0; j < k; ++j) {
        if (!kept.empty() && norm(sub(verts[j], kept.back())) < vtol) {
            remap[j] = static_cast<int>(kept.size()) - 1;
            continue;
        }
        kept.push_back(verts[j]);
        remap[j] = static_cast<int>(kept.size()) - 1;
    }
    if (kept.size() >= 2 && norm(sub(kept.back(), kept.front())) < vtol) {
        const int last = static_cast<int>(kept.size()) - 1;
        for (int j = 0; j < k; ++j)
            if (remap[j] == last) remap[j] = 0;
        kept.pop_back();
    }
    body.vertices = std::move(kept);
    const double area_tol = 1e-12 * std::max(1.0, bscale);
    for (int j = 0; j < k; ++j) {
        Facet f;
        f.source = hull[j];
        f.normal = z.grid.dirs[hull[j]];
        f.support = z.values[hull[j]];
        const int w0 = remap[(j + k - 1) % k], w1 = remap[j];
        f.ring = {w0, w1};
        f.area = norm(sub(body.vertices[w1], body.vertices[w0]));
        if (f.area >= area_tol) body.facets.push_back(std::move(f));
    }
    if (body.facets.size() < 3) throw precondition_error("wulff_shape: degenerate body");
    return body;
}

Polytope wulff_shape_3d(const SupportVector& z) {
    const int m = z.grid.size();
    std::vector<Vec> pts(m);
    double pscale = 0.0;
    for (int i = 0; i < m; ++i) {
        pts[i] = scaled(z.grid.dirs[i], 1.0 / z.values[i]);
        pscale = std::max(pscale, norm(pts[i]));
    }
    const auto tris = quickhull3(pts);

    // Dual vertex of each hull face; positive plane offset <=> bounded body.
    std::vector<Vec> duals(tris.size());
    std::vector<double> body_scale_acc;
    for (size_t t = 0; t < tris.size(); ++t) {
        const Vec& a = pts[tris[t][0]];
        Vec nrm = cross(sub(pts[tris[t][1]], a), sub(pts[tris[t][2]], a));
        const double len = norm(nrm);
        if (len <= 0.0) throw precondition_error("wulff_shape: degenerate polar hull face");
        nrm = scaled(nrm, 1.0 / len);
        const double off = dot(nrm, a);
        if (off <= 1e-12 * pscale)
            throw precondition_error("wulff_shape: grid concentrated on a hemisphere (unbounded body)");
        duals[t] = scaled(nrm, 1.0 / off);
    }
    double bscale = 0.0;
    for (const auto& w : duals) bscale = std::max(bscale, norm(w));
    auto remap = dedupe_points(duals, 1e-9 * std::max(1.0, bscale));

    std::vector<std::vector<int>> incident(m);
    for (size_t t = 0; t < tris.size(); ++t)
        for (int corner : tris[t]) {
            auto& lst = incident[corner];
            const int vid = remap[t];
            if (std::find(lst.begin(), lst.end(), vid) == lst.end()) lst.push_back(vid);
        }

    Polytope body;
    body.dim = 3;
    body.vertices = duals;
    const double area_tol = 1e-12 * std::max(1.0, bscale * bscale);
    for (int i = 0; i < m; ++i) {
        if (incident[i].size() < 3) continue;
        const Vec& nrm = z.grid.dirs[i];
        // In-plane frame with e1 x e2 = normal, so increasing angle is CCW
        // seen from outside.
        const int least = std::abs(nrm[0]) <= std::abs(nrm[1])
                              ? (std::abs(nrm[0]) <= std::abs(nrm[2]) ? 0 : 2)
                              : (std::abs(nrm[1]) <= std::abs(nrm[2]) ? 1 : 2);
        Vec axis{0.0, 0.0, 0.0};
        axis[least] = 1.0;
        const Vec e1 = normalized(cross(nrm, axis));
        const Vec e2 = cross(nrm, e1);
        Vec center{0.0, 0.0, 0.0};
        for (int vid : incident[i]) center = add(center, body.vertices[vid]);
        center = scaled(center, 1.0 / incident[i].size());
        std::vector<std::pair<double, int>> ordered;
        ordered.reserve(incident[i].size());
        for (int vid : incident[i]) {
            const Vec d = sub(body.vertices[vid], center);
            ordered.emplace_back(std::atan2(dot(d, e2), dot(d, e1)), vid);
        }
        std::sort(ordered.begin(), ordered.end());
        double area2 = 0.0;
        const int kk = static_cast<int>(ordered.size());
        for (int j = 0; j < kk; ++j) {
            const Vec& a = body.vertices[ordered[j].second];
            const Vec& b = body.vertices[ordered[(j + 1) % kk].second];
            area2 += dot(e1, a) * dot(e2, b) - dot(e1, b) * dot(e2, a);
        }
        Facet f;
        f.source = i;
        f.normal = nrm;
        f.support = z.values[i];
        f.area = 0.5 * std::abs(area2);
        if (f.area < area_tol) continue;
        f.ring.reserve(kk);
        for (const auto& [ang, vid] : ordered) f.ring.push_back(vid);
        body.facets.push_back(std::move(f));
    }
    if (body.facets.size() < 4) throw precondition_error("wulff_shape: degenerate body");

    // Compact away vertices that ended up on no kept facet.
    std::vector<int> used(body.vertices.size(), -1);
    std::vector<Vec> kept;
    for (auto& f : body.facets)
        for (int& vid : f.ring) {
            if (used[vid] < 0) {
                used[vid] = static_cast<int>(kept.size());
                kept.push_back(body.vertices[vid]);
            }
            vid = used[vid];
        }
    body.vertices = std::move(kept);
    return body;
}

}  // namespace

Polytope wulff_shape(const SupportVector& z) {
    z.validate();
    return z.grid.dim == 2 ? wulff_shape_2d(z) : wulff_shape_3d(z);
}

SupportVector canonicalize(const SupportVector& z) {
    const Polytope body = wulff_shape(z);
    SupportVector out;
    out.grid = z.grid;
    out.values.reserve(z.values.size());
    for (const auto& dir : z.grid.dirs) out.values.push_back(support_function(body, dir));
    return out;
}

double support_function(const Polytope& K, const Vec& u) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : K.vertices) best = std::max(best, dot(u, v));
    return best;
}

double radial_function(const Polytope& K, const Vec& u) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : K.facets) {
        const double den = dot(u, f.normal);
        if (den > 1e-14) best = std::min(best, f.support / den);
    }
    if (!std::isfinite(best)) throw precondition_error("radial_function: direction escapes the body");
    return best;
}

Polytope polar_body(const Polytope& K) {
    SupportVector constraints;
    constraints.grid.dim = K.dim;
    for (const auto& v : K.vertices) {
        const double len = norm(v);
        if (len <= 0.0) throw precondition_error("polar_body: vertex at the origin");
        constraints.grid.dirs.push_back(scaled(v, 1.0 / len));
        constraints.values.push_back(1.0 / len);
    }
    constraints.grid.antipode.assign(constraints.grid.dirs.size(), -1);
    return wulff_shape(constraints);
}

SupportVector lp_combine(const SupportVector& K, const SupportVector& L, double lambda, double p) {
    K.validate();
    L.validate();
    if (p == 0.0) throw precondition_error("lp_combine: p must be nonzero");
    if (K.grid.dim != L.grid.dim || K.grid.size() != L.grid.size())
        throw std::invalid_argument("lp_combine: grid mismatch");
    for (int i = 0; i < K.grid.size(); ++i)
        if (norm(sub(K.grid.dirs[i], L.grid.dirs[i])) > 1e-12)
            throw std::invalid_argument("lp_combine: grid mismatch");
    SupportVector out;
    out.grid = K.grid;
    out.values.reserve(K.values.size());
    for (size_t i = 0; i < K.values.size(); ++i)
        out.values.push_back(std::pow((1.0 - lambda) * std::pow(K.values[i], p)
                                          + lambda * std::pow(L.values[i], p),
                                      1.0 / p));
    return canonicalize(out);
}

double hausdorff_distance(const Polytope& K, const Polytope& L) {
    if (K.dim != L.dim) throw std::invalid_argument("hausdorff_distance: dimension mismatch");
    // Support sup metric over the shared grid: the union of both facet-normal sets.
    auto probe = [&](const Vec& u) { return std::abs(support_function(K, u) - support_function(L, u)); };
    double best = 0.0;
    for (const auto* body : {&K, &L})
        for (const auto& f : body->facets) best = std::max(best, probe(f.normal));
    return best;
}

double euclidean_volume(const Polytope& K) {
    double sum = 0.0;
    for (const auto& f : K.facets) sum += f.support * f.area;
    return sum / K.dim;
}

RadialPerturbationReport radial_perturbation_check(const Polytope& K, const std::vector<double>& f,
                                                   double p, const std::vector<double>& t_list,
                                                   uint64_t seed) {
    if (f.size() != K.facets.size())
        throw std::invalid_argument("radial_perturbation_check: f must align with facets");
    SupportVector base;
    base.grid.dim = K.dim;
    for (const auto& fa : K.facets) {
        base.grid.dirs.push_back(fa.normal);
        base.values.push_back(fa.support);
    }
    base.grid.antipode.assign(base.grid.dirs.size(), -1);

    // Rays that pass close to a facet boundary (where the first-order formula
    // only holds almost everywhere) are skipped.  Returns the facet's index in
    // the base grid, i.e. K's facet position.
    auto hit_facet = [](const Polytope& body, const Vec& u, bool by_source, double* rho) {
        double best = std::numeric_limits<double>::infinity(), second = best;
        int arg = -1;
        for (size_t j = 0; j < body.facets.size(); ++j) {
            const double den = dot(u, body.facets[j].normal);
            if (den <= 1e-14) continue;
            const double t = body.facets[j].support / den;
            if (t < best) {
                second = best;
                best = t;
                arg = static_cast<int>(j);
            } else if (t < second) {
                second = t;
            }
        }
        *rho = best;
        if (arg < 0 || second / best - 1.0 < 1e-3) return -1;
        return by_source ? body.facets[arg].source : arg;
    };

    Rng rng(seed);
    std::vector<Vec> probes;
    while (probes.size() < 256) probes.push_back(rng.direction(K.dim));

    RadialPerturbationReport rep;
    rep.t_values = t_list;
    rep.max_deviation.assign(t_list.size(), 0.0);
    for (size_t ti = 0; ti < t_list.size(); ++ti) {
        const double t = t_list[ti];
        SupportVector zt = base;
        for (size_t i = 0; i < zt.values.size(); ++i) {
            const double hp = std::pow(base.values[i], p) + t * std::pow(f[i], p);
            if (!(hp > 0.0))
                throw precondition_error("radial_perturbation_check: perturbation leaves the cone");
            zt.values[i] = std::pow(hp, 1.0 / p);
        }
        const Polytope Kt = wulff_shape(zt);
        for (const auto& u : probes) {
            double rho0 = 0.0, rho1 = 0.0;
            const int src0 = hit_facet(K, u, false, &rho0);
            const int src1 = hit_facet(Kt, u, true, &rho1);
            if (src0 < 0 || src0 != src1) continue;
            const size_t j = static_cast<size_t>(src0);
            const double expected =
                std::pow(f[j], p) / (p * std::pow(K.facets[j].support, p)) * rho0;
            const double fd = (rho1 - rho0) / t;
            rep.max_deviation[ti] = std::max(rep.max_deviation[ti], std::abs(fd - expected));
            rep.lipschitz_m = std::max(rep.lipschitz_m, std::abs(rho1 - rho0) / t);
        }
    }

    // Log-log slope of deviation vs t over the usable range.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (size_t i = 0; i < t_list.size(); ++i) {
        if (rep.max_deviation[i] <= 1e-14) continue;
        const double x = std::log(t_list[i]), y = std::log(rep.max_deviation[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) rep.fitted_order = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return rep;
}

}  // namespace gmk::geom

#include "gmk/quickhull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>

namespace gmk::geom {

namespace {

struct Face {
    std::array<int, 3> v;
    Vec normal;     // unit outward
    double offset;  // normal . x on the face plane
    bool alive = true;
};

Face make_face(int a, int b, int c, const std::vector<Vec>& pts, const Vec& interior) {
    Face f;
    f.v = {a, b, c};
    Vec n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
    const double len = norm(n);
    if (len > 0.0) n = scaled(n, 1.0 / len);
    if (dot(n, sub(pts[a], interior)) < 0.0) {
        std::swap(f.v[1], f.v[2]);
        n = scaled(n, -1.0);
    }
    f.normal = n;
    f.offset = dot(n, pts[f.v[0]]);
    return f;
}

uint64_t edge_key(int a, int b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

std::vector<std::array<int, 3>> quickhull3(const std::vector<Vec>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw precondition_error("quickhull3: need at least 4 points");

    double scale = 0.0;
    for (const auto& p : pts)
        for (double c : p) scale = std::max(scale, std::abs(c));
    const double eps = 1e-10 * std::max(1.0, scale);

    // Initial simplex: farthest axis-extreme pair, then max-distance point to
    // the line, then to the plane.  Strict comparisons keep ties at lower index.
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 1; i < n; ++i)
        for (int ax = 0; ax < 3; ++ax) {
            if (pts[i][ax] < pts[lo[ax]][ax]) lo[ax] = i;
            if (pts[i][ax] > pts[hi[ax]][ax]) hi[ax] = i;
        }
    int ia = lo[0], ib = hi[0];
    double best = -1.0;
    for (int ax = 0; ax < 3; ++ax) {
        const double d = norm(sub(pts[hi[ax]], pts[lo[ax]]));
        if (d > best) {
            best = d;
            ia = lo[ax];
            ib = hi[ax];
        }
    }
    if (best <= eps) throw precondition_error("quickhull3: all points coincide");
    const Vec ab = sub(pts[ib], pts[ia]);
    int ic = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        const double d = norm(cross(ab, sub(pts[i], pts[ia]))) / norm(ab);
        if (d > best) {
            best = d;
            ic = i;
        }
    }
    if (ic < 0) throw precondition_error("quickhull3: points are collinear");
    Vec pn = normalized(cross(ab, sub(pts[ic], pts[ia])));
    int id = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(dot(pn, sub(pts[i], pts[ia])));
        if (d > best) {
            best = d;
            id = i;
        }
    }
    if (id < 0) throw precondition_error("quickhull3: points are coplanar");

    const Vec interior = scaled(add(add(pts[ia], pts[ib]), add(pts[ic], pts[id])), 0.25);
    std::vector<Face> faces;
    faces.push_back(make_face(ia, ib, ic, pts, interior));
    faces.push_back(make_face(ia, ib, id, pts, interior));
    faces.push_back(make_face(ia, ic, id, pts, interior));
    faces.push_back(make_face(ib, ic, id, pts, interior));

    // Incremental insertion with a full visibility scan per point; the horizon
    // is the set of directed edges whose reverse is not among visible faces.
    for (int i = 0; i < n; ++i) {
        if (i == ia || i == ib || i == ic || i == id) continue;
        std::vector<int> visible;
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
            if (!faces[fi].alive) continue;
            if (dot(faces[fi].normal, pts[i]) - faces[fi].offset > eps) visible.push_back(fi);
        }
        if (visible.empty()) continue;
        std::unordered_set<uint64_t> edges;
        for (int fi : visible) {
            const auto& v = faces[fi].v;
            edges.insert(edge_key(v[0], v[1]));
            edges.insert(edge_key(v[1], v[2]));
            edges.insert(edge_key(v[2], v[0]));
        }
        for (int fi : visible) faces[fi].alive = false;
        std::vector<uint64_t> horizon;
        for (uint64_t key : edges) {
            const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
            if (!edges.count(edge_key(b, a))) horizon.push_back(key);  // reverse hidden
        }
        std::sort(horizon.begin(), horizon.end());
        for (uint64_t key : horizon)
            faces.push_back(
                make_face(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu), i, pts, interior));
    }

    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back(f.v);
    return out;
}

}  // namespace gmk::geom

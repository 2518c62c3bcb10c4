#include "mobility/convex_hull.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

namespace mobility {

double ConvexHull3::facet_area(std::size_t k) const {
    const HullFacet& f = facets[k];
    Vec3 ab = vertices[f.v[1]] - vertices[f.v[0]];
    Vec3 ac = vertices[f.v[2]] - vertices[f.v[0]];
    return 0.5 * ab.cross(ac).norm();
}

double ConvexHull3::plane_distance(std::size_t k, const Vec3& p) const {
    return facets[k].normal.dot(p) - facets[k].offset;
}

bool ConvexHull3::contains(const Vec3& p) const {
    for (std::size_t k = 0; k < facets.size(); ++k) {
        if (plane_distance(k, p) > kHullEpsilon) return false;
    }
    return true;
}

double ConvexHull3::cone_volume(const Vec3& reference) const {
    double v = 0.0;
    for (std::size_t k = 0; k < facets.size(); ++k) {
        double d = std::fabs(facets[k].offset - facets[k].normal.dot(reference));
        v += facet_area(k) * d;
    }
    return v / 3.0;
}

double ConvexHull3::divergence_volume() const {
    double six_v = 0.0;
    for (const HullFacet& f : facets) {
        const Vec3& a = vertices[f.v[0]];
        const Vec3& b = vertices[f.v[1]];
        const Vec3& c = vertices[f.v[2]];
        six_v += a.dot(b.cross(c));
    }
    return std::fabs(six_v) / 6.0;
}

Vec3 ConvexHull3::vertex_centroid() const {
    Vec3 c = Vec3::Zero();
    for (const Vec3& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

namespace {

constexpr std::size_t kNoFacet = static_cast<std::size_t>(-1);

struct BuildFacet {
    std::array<int, 3> v;
    std::array<std::size_t, 3> nb = {kNoFacet, kNoFacet, kNoFacet};  // across edge (v[e], v[e+1])
    Vec3 normal;  // unit, outward
    double offset = 0.0;
    bool alive = true;
    int epoch = -1;            // last insertion that saw this facet as visible
    std::vector<int> outside;  // unprocessed points strictly above this facet
    int far_idx = -1;          // farthest of them
    double far_d = 0.0;
};

// Plane through a->b->c keeping that vertex order (adjacency bookkeeping
// depends on it); only the normal flips if it faces the interior point.
BuildFacet make_facet(const std::vector<Vec3>& pts, int a, int b, int c, const Vec3& interior) {
    BuildFacet f;
    f.v = {a, b, c};
    Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    n.normalize();
    if (n.dot(interior - pts[a]) > 0.0) n = -n;
    f.normal = n;
    f.offset = n.dot(pts[a]);
    return f;
}

}  // namespace

HullResult convex_hull(const std::vector<Vec3>& points) {
    if (points.empty()) throw ValidationError("empty input");
    for (const Vec3& p : points) {
        if (!p.allFinite()) throw ValidationError("non-finite point");
    }

    const std::size_t n = points.size();
    HullResult result;

    // Affine-rank probe: pick four points spanning 3-space, or report the
    // rank we got stuck at.
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (points[i].x() < points[i0].x()) i0 = i;
    }
    std::size_t i1 = i0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (points[i] - points[i0]).norm();
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    if (best <= kHullEpsilon) {
        result.rank = 0;
        return result;
    }
    Vec3 axis = (points[i1] - points[i0]).normalized();
    std::size_t i2 = i0;
    best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 off = points[i] - points[i0];
        double d = (off - axis.dot(off) * axis).norm();
        if (d > best) {
            best = d;
            i2 = i;
        }
    }
    if (best <= kHullEpsilon) {
        result.rank = 1;
        return result;
    }
    Vec3 plane_n = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
    std::size_t i3 = i0;
    best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fabs(plane_n.dot(points[i] - points[i0]));
        if (d > best) {
            best = d;
            i3 = i;
        }
    }
    if (best <= kHullEpsilon) {
        result.rank = 2;
        return result;
    }

    Vec3 interior =
        0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);

    std::vector<BuildFacet> facets;
    // Seed tetrahedron, wound counter-clockwise seen from outside so cone
    // facets built on horizon edges inherit a consistent orientation.
    auto tetra_face = [&](int a, int b, int c, int opp) {
        Vec3 nrm = (points[b] - points[a]).cross(points[c] - points[a]);
        if (nrm.dot(points[opp] - points[a]) > 0.0) std::swap(b, c);
        return make_facet(points, a, b, c, interior);
    };
    facets.push_back(tetra_face((int)i0, (int)i1, (int)i2, (int)i3));
    facets.push_back(tetra_face((int)i0, (int)i1, (int)i3, (int)i2));
    facets.push_back(tetra_face((int)i0, (int)i2, (int)i3, (int)i1));
    facets.push_back(tetra_face((int)i1, (int)i2, (int)i3, (int)i0));
    for (std::size_t f = 0; f < 4; ++f) {
        for (int e = 0; e < 3; ++e) {
            const int a = facets[f].v[e];
            const int b = facets[f].v[(e + 1) % 3];
            for (std::size_t g = 0; g < 4; ++g) {
                if (g == f) continue;
                const auto& w = facets[g].v;
                const bool has_a = w[0] == a || w[1] == a || w[2] == a;
                const bool has_b = w[0] == b || w[1] == b || w[2] == b;
                if (has_a && has_b) {
                    facets[f].nb[e] = g;
                    break;
                }
            }
        }
    }

    // Each pending point lives in the outside set of the first facet it is
    // strictly above; points above nothing are interior for good. When a
    // facet dies its set is repartitioned against the replacement facets
    // only: a pooled point below all of them is inside the grown hull (it
    // was above a facet visible from the apex, so any surviving facet it
    // were above would contradict the old hull containing that facet).
    auto assign = [&](int idx, std::size_t first_new) {
        for (std::size_t k = first_new; k < facets.size(); ++k) {
            BuildFacet& f = facets[k];
            if (!f.alive) continue;
            const double d = f.normal.dot(points[idx]) - f.offset;
            if (d > kHullEpsilon) {
                f.outside.push_back(idx);
                if (d > f.far_d) {
                    f.far_d = d;
                    f.far_idx = idx;
                }
                return;
            }
        }
    };
    {
        std::vector<char> seed_used(n, 0);
        seed_used[i0] = seed_used[i1] = seed_used[i2] = seed_used[i3] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (!seed_used[i]) assign(static_cast<int>(i), 0);
        }
    }

    struct HorizonEdge {
        int a, b;             // directed edge of a dying facet
        std::size_t outside;  // surviving facet across it
    };
    std::vector<std::size_t> work = {0, 1, 2, 3};
    std::vector<std::size_t> visible, bfs;
    std::vector<HorizonEdge> horizon;
    int epoch = 0;
    while (!work.empty()) {
        const std::size_t fi = work.back();
        work.pop_back();
        if (!facets[fi].alive || facets[fi].outside.empty()) continue;
        const int apex = facets[fi].far_idx;
        const Vec3& p = points[apex];
        ++epoch;

        // Visible region: flood from the apex's own facet across adjacent
        // facets the apex is strictly outside of. Its boundary half-edges
        // form closed loops whatever the numerics say, which keeps the facet
        // graph a manifold even on degenerate clouds.
        visible.clear();
        bfs.clear();
        horizon.clear();
        facets[fi].epoch = epoch;
        bfs.push_back(fi);
        while (!bfs.empty()) {
            const std::size_t k = bfs.back();
            bfs.pop_back();
            visible.push_back(k);
            for (int e = 0; e < 3; ++e) {
                const std::size_t m = facets[k].nb[e];
                if (m == kNoFacet || facets[m].epoch == epoch) continue;
                if (facets[m].normal.dot(p) - facets[m].offset > kHullEpsilon) {
                    facets[m].epoch = epoch;
                    bfs.push_back(m);
                } else {
                    horizon.push_back({facets[k].v[e], facets[k].v[(e + 1) % 3], m});
                }
            }
        }
        // A facet on the boundary loop may have been flooded after the edge
        // was recorded; drop entries whose outer side died.
        std::erase_if(horizon, [&](const HorizonEdge& h) { return facets[h.outside].epoch == epoch; });

        std::vector<int> pool;
        for (std::size_t k : visible) {
            facets[k].alive = false;
            pool.insert(pool.end(), facets[k].outside.begin(), facets[k].outside.end());
            facets[k].outside = {};
        }

        // One cone facet per horizon edge; the loop structure pairs every
        // apex-edge with its reverse, so stitching cannot fail.
        const std::size_t first_new = facets.size();
        std::map<int, std::vector<std::size_t>> starts_at, ends_at;
        for (const HorizonEdge& h : horizon) {
            facets.push_back(make_facet(points, h.a, h.b, apex, interior));
            const std::size_t ni = facets.size() - 1;
            facets[ni].nb[0] = h.outside;
            BuildFacet& out = facets[h.outside];
            for (int e = 0; e < 3; ++e) {
                const int oa = out.v[e], ob = out.v[(e + 1) % 3];
                if ((oa == h.a && ob == h.b) || (oa == h.b && ob == h.a)) out.nb[e] = ni;
            }
            starts_at[h.a].push_back(ni);
            ends_at[h.b].push_back(ni);
            work.push_back(ni);
        }
        for (auto& [vtx, outs] : ends_at) {
            auto& ins = starts_at[vtx];
            // Boundary loops give every vertex equal in/out degree; the min
            // is pure defence against numerically corrupted geometry.
            const std::size_t pairs = std::min(outs.size(), ins.size());
            for (std::size_t j = 0; j < pairs; ++j) {
                facets[outs[j]].nb[1] = ins[j];  // edge (b, apex) meets (apex, ...) of the next
                facets[ins[j]].nb[2] = outs[j];
            }
        }

        for (int idx : pool) {
            if (idx != apex) assign(idx, first_new);
        }
    }

    // Compact: keep referenced vertices only, remap indices.
    std::vector<int> remap(n, -1);
    ConvexHull3 hull;
    hull.interior = interior;
    for (const BuildFacet& f : facets) {
        if (!f.alive) continue;
        HullFacet out;
        for (int e = 0; e < 3; ++e) {
            int idx = f.v[e];
            if (remap[idx] < 0) {
                remap[idx] = static_cast<int>(hull.vertices.size());
                hull.vertices.push_back(points[idx]);
            }
            out.v[e] = remap[idx];
        }
        out.normal = f.normal;
        out.offset = f.offset;
        hull.facets.push_back(out);
    }

    result.hull = std::move(hull);
    return result;
}

}  // namespace mobility

#pragma once

#include "mobility/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace mobility {

/// Plane-test tolerance for hull construction, containment, and affine-rank
/// detection, in meters.
inline constexpr double kHullEpsilon = 1e-9;

struct HullFacet {
    std::array<int, 3> v;  // vertex indices, CCW seen from outside
    Vec3 normal;           // outward unit normal
    double offset = 0.0;   // plane: normal . x = offset
};

/// Triangulated convex hull. `vertices` holds exactly the extreme points
/// (every one referenced by some facet); facet normals point away from
/// `interior`, a strictly interior point.
struct ConvexHull3 {
    std::vector<Vec3> vertices;
    std::vector<HullFacet> facets;
    Vec3 interior = Vec3::Zero();

    double facet_area(std::size_t k) const;
    /// Signed distance of p from facet k's plane; > 0 is outside.
    double plane_distance(std::size_t k, const Vec3& p) const;
    /// True when p is inside or on the hull within kHullEpsilon.
    bool contains(const Vec3& p) const;

    /// (1/3) sum over facets of area times the perpendicular distance from
    /// the reference point to the facet plane. Exact for any reference point
    /// inside the hull; the vertex centroid is the conventional choice.
    double cone_volume(const Vec3& reference) const;

    /// |1/6 sum of a . (b x c)| over facets, straight from the divergence
    /// theorem with the raw coordinate origin. Independent cross-check of
    /// cone_volume.
    double divergence_volume() const;

    Vec3 vertex_centroid() const;
};

/// Result of hull construction: either a full-dimensional hull or the affine
/// rank (0 = all points coincide, 1 = collinear, 2 = coplanar) that made one
/// impossible under kHullEpsilon.
struct HullResult {
    std::optional<ConvexHull3> hull;
    int rank = 3;

    bool degenerate() const { return !hull.has_value(); }
};

/// Incremental construction. Throws "empty input" when points is empty;
/// non-finite coordinates are rejected.
HullResult convex_hull(const std::vector<Vec3>& points);

}  // namespace mobility

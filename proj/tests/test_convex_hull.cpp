#include <doctest.h>

#include "mobility/convex_hull.hpp"

#include <cmath>
#include <random>

using namespace mobility;

namespace {

std::vector<Vec3> unit_cube() {
    std::vector<Vec3> pts;
    for (int x = 0; x <= 1; ++x) {
        for (int y = 0; y <= 1; ++y) {
            for (int z = 0; z <= 1; ++z) pts.emplace_back(x, y, z);
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("unit cube hull: 8 vertices, 12 facets, volume 1") {
    HullResult r = convex_hull(unit_cube());
    REQUIRE_FALSE(r.degenerate());
    const ConvexHull3& hull = *r.hull;
    CHECK(hull.vertices.size() == 8);
    CHECK(hull.facets.size() == 12);
    CHECK(hull.cone_volume(hull.vertex_centroid()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hull.divergence_volume() == doctest::Approx(1.0).epsilon(1e-12));

    // Outward normals: the interior point is strictly behind every facet.
    for (std::size_t k = 0; k < hull.facets.size(); ++k) {
        CHECK(hull.plane_distance(k, hull.interior) < 0.0);
    }
    for (const Vec3& p : unit_cube()) CHECK(hull.contains(p));
    CHECK_FALSE(hull.contains(Vec3(1.5, 0.5, 0.5)));
    CHECK_FALSE(hull.contains(Vec3(0.5, 0.5, -0.1)));
}

TEST_CASE("cube with face centers, edge midpoints, and interior points") {
    std::vector<Vec3> pts = unit_cube();
    pts.emplace_back(0.5, 0.5, 0.0);  // face center
    pts.emplace_back(0.5, 0.5, 1.0);
    pts.emplace_back(0.5, 0.0, 0.0);  // edge midpoint
    pts.emplace_back(0.5, 0.5, 0.5);  // body center
    pts.emplace_back(0.25, 0.75, 0.5);
    HullResult r = convex_hull(pts);
    REQUIRE_FALSE(r.degenerate());
    CHECK(r.hull->vertices.size() == 8);  // only the corners are extreme
    CHECK(r.hull->cone_volume(r.hull->vertex_centroid()) == doctest::Approx(1.0).epsilon(1e-9));
    for (const Vec3& p : pts) CHECK(r.hull->contains(p));
}

TEST_CASE("tetrahedron volume is 1/6") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    HullResult r = convex_hull(pts);
    REQUIRE_FALSE(r.degenerate());
    CHECK(r.hull->vertices.size() == 4);
    CHECK(r.hull->facets.size() == 4);
    CHECK(r.hull->cone_volume(r.hull->vertex_centroid()) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(r.hull->divergence_volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("degenerate point sets report their affine rank") {
    SUBCASE("single point and duplicates: rank 0") {
        CHECK(convex_hull({Vec3(0.2, 0.3, 0.4)}).rank == 0);
        std::vector<Vec3> dup(10, Vec3(1, 2, 3));
        HullResult r = convex_hull(dup);
        CHECK(r.degenerate());
        CHECK(r.rank == 0);
    }
    SUBCASE("100 collinear points: rank 1") {
        std::vector<Vec3> pts;
        for (int i = 0; i < 100; ++i) pts.push_back(Vec3(1, 2, -1) + 0.01 * i * Vec3(1, 1, 3));
        HullResult r = convex_hull(pts);
        CHECK(r.degenerate());
        CHECK(r.rank == 1);
    }
    SUBCASE("planar grid: rank 2") {
        std::vector<Vec3> pts;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) pts.emplace_back(0.1 * i, 0.1 * j, 0.7);
        }
        HullResult r = convex_hull(pts);
        CHECK(r.degenerate());
        CHECK(r.rank == 2);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_WITH_AS(convex_hull({}), "empty input", ValidationError);
    std::vector<Vec3> bad = {{0, 0, 0}, {1, 0, 0},
                             {0, std::numeric_limits<double>::quiet_NaN(), 0}};
    CHECK_THROWS_AS(convex_hull(bad), ValidationError);
}

TEST_CASE("hull of random ball points passes the facet sign oracle") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 500; ++i) {
        Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        pts.push_back(0.3 * std::cbrt(unit(rng)) * dir);
    }
    HullResult r = convex_hull(pts);
    REQUIRE_FALSE(r.degenerate());
    const ConvexHull3& hull = *r.hull;

    // Brute force: every input point on or behind every facet plane.
    for (const Vec3& p : pts) {
        for (std::size_t k = 0; k < hull.facets.size(); ++k) {
            CHECK(hull.plane_distance(k, p) <= kHullEpsilon);
        }
    }
    // Both volume formulas agree.
    CHECK(hull.cone_volume(hull.vertex_centroid()) ==
          doctest::Approx(hull.divergence_volume()).epsilon(1e-9));
}

TEST_CASE("box hull volume matches Monte-Carlo containment") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 0.4), uy(0.0, 0.3), uz(0.0, 0.2);
    std::vector<Vec3> pts;
    for (int i = 0; i < 1000; ++i) pts.emplace_back(ux(rng), uy(rng), uz(rng));
    HullResult r = convex_hull(pts);
    REQUIRE_FALSE(r.degenerate());
    const ConvexHull3& hull = *r.hull;
    double volume = hull.cone_volume(hull.vertex_centroid());

    std::mt19937_64 mc(23);
    const int n_mc = 1000000;
    int inside = 0;
    for (int i = 0; i < n_mc; ++i) {
        if (hull.contains(Vec3(ux(mc), uy(mc), uz(mc)))) ++inside;
    }
    double mc_volume = 0.4 * 0.3 * 0.2 * inside / n_mc;
    CHECK(std::fabs(volume - mc_volume) / mc_volume < 0.02);
    // The hull of interior samples cannot exceed the box itself.
    CHECK(volume < 0.4 * 0.3 * 0.2);
}

TEST_CASE("adding points never shrinks the hull") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 0.2);
    std::vector<Vec3> pts;
    for (int i = 0; i < 20; ++i) pts.emplace_back(gauss(rng), gauss(rng), gauss(rng));

    double prev = 0.0;
    for (int batch = 0; batch < 8; ++batch) {
        for (int i = 0; i < 25; ++i) pts.emplace_back(gauss(rng), gauss(rng), gauss(rng));
        HullResult r = convex_hull(pts);
        REQUIRE_FALSE(r.degenerate());
        double v = r.hull->cone_volume(r.hull->vertex_centroid());
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

#include <doctest.h>

#include <array>
#include <cmath>

#include "hardyscope/domain.hpp"
#include "hardyscope/errors.hpp"
#include "oracles.hpp"

using namespace hardyscope;

namespace {

void check_hit_on_segment(const DomainSpec& dom, const RayHit& hit) {
    CHECK(hit.infinite() == !hit.segment_id.has_value());
    if (hit.infinite()) return;
    REQUIRE(hit.hit_point.has_value());
    const auto& seg = dom.segments().at(static_cast<std::size_t>(*hit.segment_id));
    CHECK(seg.chart_distance(*hit.hit_point) < 1e-9);
}

Vec2 random_interior(const DomainSpec& dom, oracle::SplitMix64& rng) {
    const Box b = dom.bounding_box();
    for (;;) {
        const Vec2 p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
        if (contains(dom, p)) return p;
    }
}

}  // namespace

TEST_CASE("membership is open") {
    const auto disk = shapes::unit_disk();
    CHECK(contains(disk, {0.0, 0.0}));
    CHECK_FALSE(contains(disk, {2.0, 0.0}));
    CHECK_FALSE(contains(disk, {1.0, 0.0}));
    const auto sq = shapes::unit_square();
    CHECK_FALSE(contains(sq, {0.0, 0.5}));
    CHECK_FALSE(contains(sq, {1.0, 1.0}));
    CHECK(contains(sq, {1e-9, 0.5}));
}

TEST_CASE("boundary distance") {
    CHECK(boundary_distance(shapes::unit_disk(), {0.3, 0.0}) == doctest::Approx(0.7));
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    CHECK(boundary_distance(shapes::geodesic_ball(hyp, {0.0, 0.0}, 1.0), {0.0, 0.0}) == doctest::Approx(1.0));
    const auto tri = shapes::ideal_triangle(hyp);
    const double deg = oracle::pi / 180.0;
    CHECK(boundary_distance(tri, {0.0, 0.0}) ==
          doctest::Approx(oracle::distance_origin_to_ideal_geodesic(90 * deg, 210 * deg)).epsilon(1e-9));
    CHECK_THROWS_AS(boundary_distance(shapes::unit_disk(), {1.5, 0.0}), PreconditionError);
}

TEST_CASE("ideal-triangle distance off the centre matches the hyperbolic formula") {
    // For a geodesic circle (c, r) orthogonal to the unit circle,
    // sinh d(q) = | |q - c|^2 - r^2 | / (r (1 - |q|^2)).
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const auto tri = shapes::ideal_triangle(hyp);
    const double deg = oracle::pi / 180.0;
    const std::array<std::pair<double, double>, 3> sides{{{90 * deg, 210 * deg}, {210 * deg, 330 * deg},
                                                          {330 * deg, 450 * deg}}};
    for (Vec2 q : {Vec2{0.1, 0.2}, Vec2{-0.3, -0.1}, Vec2{0.0, 0.6}}) {
        double best = 1e300;
        for (auto [a, b] : sides) {
            const auto c = oracle::ideal_geodesic_circle(a, b);
            const double pw = (q.x - c.cx) * (q.x - c.cx) + (q.y - c.cy) * (q.y - c.cy) - c.r * c.r;
            best = std::min(best, std::asinh(std::abs(pw) / (c.r * (1.0 - q.norm2()))));
        }
        CHECK(boundary_distance(tri, q) == doctest::Approx(best).epsilon(1e-8));
    }
}

TEST_CASE("hitting radius examples") {
    const auto disk = shapes::unit_disk();
    for (double th : {0.0, 0.7, 2.0, 5.5}) CHECK(hitting_radius(disk, {0.0, 0.0}, th, 40.0).hit_time == doctest::Approx(1.0));
    const RayHit h = hitting_radius(disk, {0.5, 0.0}, 0.0, 40.0);
    CHECK(h.hit_time == doctest::Approx(0.5));
    check_hit_on_segment(disk, h);

    const auto hp = shapes::half_plane();
    const RayHit par = hitting_radius(hp, {1.0, 0.0}, oracle::pi / 2, 40.0);
    CHECK(par.infinite());
    CHECK_FALSE(par.segment_id.has_value());
    const RayHit oblique = hitting_radius(hp, {1.0, 0.0}, 2.0 * oracle::pi / 3.0, 40.0);
    CHECK(oblique.hit_time == doctest::Approx(1.0 / std::cos(oracle::pi / 3.0)));
    check_hit_on_segment(hp, oblique);
    CHECK_THROWS_AS(hitting_radius(disk, {1.2, 0.0}, 0.0, 40.0), PreconditionError);
}

TEST_CASE("geodesic polygons") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const auto tri = shapes::ideal_triangle(hyp);
    REQUIRE(tri.segments().size() == 3);
    for (const auto& s : tri.segments()) {
        CHECK(s.kind == SegmentKind::arc);
        // Orthogonal to the unit circle: |c|^2 = 1 + r^2.
        CHECK(s.center.norm2() == doctest::Approx(1.0 + s.radius * s.radius));
    }
    int ideal = 0;
    for (const auto& v : tri.vertices()) ideal += v.ideal;
    CHECK(ideal == 3);
    CHECK(tri.has_ideal_vertices());

    const auto sq = shapes::unit_square();
    CHECK(sq.segments().size() == 4);
    for (const auto& s : sq.segments()) CHECK(s.kind == SegmentKind::straight);

    const PolygonVertex mixed[3] = {PolygonVertex::at_infinity(0.0), PolygonVertex::at_infinity(oracle::pi),
                                    PolygonVertex::finite({0.0, -0.5})};
    const auto p3 = build_geodesic_polygon(hyp, mixed);
    CHECK(p3.segments().size() == 3);
    CHECK(p3.vertices()[0].ideal);
    CHECK(p3.vertices()[1].ideal);
    CHECK_FALSE(p3.vertices()[2].ideal);
    CHECK(contains(p3, {0.0, -0.25}));
    CHECK(contains(p3, {0.5, -0.05}));
    CHECK_FALSE(contains(p3, {0.0, 0.25}));
    CHECK_FALSE(contains(p3, {0.0, -0.6}));
    const double d = boundary_distance(p3, {0.0, -0.25});
    CHECK(d > 0.0);
    CHECK(d <= hyp.distance({0.0, -0.25}, {0.0, -0.5}) + 1e-12);
}

TEST_CASE("polygon construction errors") {
    const PolygonVertex flat_ideal[3] = {PolygonVertex::at_infinity(0.0), PolygonVertex::finite({0.0, 0.0}),
                                         PolygonVertex::finite({0.0, 0.5})};
    CHECK_THROWS_AS(build_geodesic_polygon(ManifoldModel::euclidean(), flat_ideal), ConstructionError);
    const PolygonVertex bowtie[4] = {PolygonVertex::finite({0, 0}), PolygonVertex::finite({1, 1}),
                                     PolygonVertex::finite({1, 0}), PolygonVertex::finite({0, 1})};
    CHECK_THROWS_AS(build_geodesic_polygon(ManifoldModel::euclidean(), bowtie), ConstructionError);
    const PolygonVertex two[2] = {PolygonVertex::finite({0, 0}), PolygonVertex::finite({1, 1})};
    CHECK_THROWS_AS(build_geodesic_polygon(ManifoldModel::euclidean(), two), ConstructionError);
}

TEST_CASE("two-sided radius is symmetric and bounded below by d") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const DomainSpec doms[] = {shapes::unit_disk(), shapes::unit_square(), shapes::ideal_triangle(hyp),
                               shapes::geodesic_ball(hyp, {0.2, 0.1}, 1.0)};
    oracle::SplitMix64 rng(17);
    for (const auto& dom : doms) {
        const double tmax = default_t_max(dom);
        for (int i = 0; i < 25; ++i) {
            const Vec2 p = random_interior(dom, rng);
            const double d = boundary_distance(dom, p);
            const double th = rng.uniform(0.0, 2.0 * oracle::pi);
            const RayHit a = hitting_radius(dom, p, th, tmax);
            const RayHit b = hitting_radius(dom, p, th + oracle::pi, tmax);
            CHECK(a.hit_time == doctest::Approx(b.hit_time).epsilon(1e-12));
            if (!a.infinite()) CHECK(a.hit_time >= d - 1e-6);
            check_hit_on_segment(dom, a);
        }
    }
}

TEST_CASE("hitting radius is monotone under inclusion") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    struct Pair {
        DomainSpec inner, outer;
    };
    const Pair pairs[] = {{shapes::disk({0.0, 0.0}, 0.5), shapes::unit_disk()},
                          {shapes::rectangle(0.2, 0.2, 0.8, 0.8), shapes::unit_square()},
                          {shapes::geodesic_ball(hyp, {0.0, 0.0}, 0.5), shapes::geodesic_ball(hyp, {0.0, 0.0}, 1.0)},
                          {shapes::geodesic_ball(hyp, {0.0, 0.0}, 0.3), shapes::ideal_triangle(hyp)}};
    oracle::SplitMix64 rng(3);
    for (const auto& [inner, outer] : pairs) {
        for (int i = 0; i < 20; ++i) {
            const Vec2 p = random_interior(inner, rng);
            const double th = rng.uniform(0.0, 2.0 * oracle::pi);
            const double ri = hitting_radius(inner, p, th, 40.0).hit_time;
            const double ro = hitting_radius(outer, p, th, 40.0).hit_time;
            CHECK(ri <= ro + 1e-12);
        }
    }
}

TEST_CASE("restricting to a boundary subset can only lengthen rays") {
    const PolygonVertex v[4] = {PolygonVertex::finite({0, 0}), PolygonVertex::finite({1, 0}),
                                PolygonVertex::finite({1, 1}), PolygonVertex::finite({0, 1})};
    const bool gamma[4] = {true, false, false, false};
    const auto sq = build_geodesic_polygon(ManifoldModel::euclidean(), v, gamma);
    CHECK(sq.has_gamma_subset());
    oracle::SplitMix64 rng(8);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p = random_interior(sq, rng);
        const double th = rng.uniform(0.0, 2.0 * oracle::pi);
        const RayHit full = hitting_radius(sq, p, th, 40.0);
        const RayHit g = hitting_radius(sq, p, th, 40.0, true);
        CHECK(g.hit_time >= full.hit_time);
        if (!g.infinite()) CHECK(*g.segment_id == 0);
    }
    // Straight down from the centre meets Γ at distance 0.5.
    CHECK(hitting_radius(sq, {0.5, 0.5}, -oracle::pi / 2, 40.0, true).hit_time == doctest::Approx(0.5));
    // Straight right meets the non-Γ side first; the opposite direction as well.
    CHECK(hitting_radius(sq, {0.5, 0.5}, 0.0, 40.0, true).infinite());
}

TEST_CASE("closed-form casting agrees with marching") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const DomainSpec doms[] = {shapes::ideal_triangle(hyp), shapes::unit_square(), shapes::unit_disk()};
    oracle::SplitMix64 rng(99);
    for (const auto& dom : doms) {
        for (int i = 0; i < 30; ++i) {
            const Vec2 p = random_interior(dom, rng);
            const double th = rng.uniform(0.0, 2.0 * oracle::pi);
            const RayCaster exact(dom, p, {CastMethod::analytic, {}});
            const RayCaster march(dom, p, {CastMethod::march, {}});
            const RayHit a = exact.cast(th, 40.0);
            const RayHit b = march.cast(th, 40.0);
            CHECK(a.infinite() == b.infinite());
            if (!a.infinite() && !b.infinite()) {
                CHECK(b.hit_time == doctest::Approx(a.hit_time).epsilon(1e-7));
                CHECK(a.segment_id == b.segment_id);
            }
        }
    }
}

TEST_CASE("a cusp ray reaches the ideal boundary") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const auto tri = shapes::ideal_triangle(hyp);
    // Straight up from the centre runs into the ideal vertex at 90 degrees.
    const RayHit up = RayCaster(tri, {0.0, 0.0}).cast(oracle::pi / 2, 1e6);
    CHECK(up.infinite());
    const RayHit up_march = RayCaster(tri, {0.0, 0.0}, {CastMethod::march, {}}).cast(oracle::pi / 2, 1e6);
    CHECK(up_march.infinite());
    // The two-sided radius is finite thanks to the opposite side.
    CHECK(hitting_radius(tri, {0.0, 0.0}, oracle::pi / 2, 1e6).hit_time ==
          doctest::Approx(oracle::distance_origin_to_ideal_geodesic(210 * oracle::pi / 180, 330 * oracle::pi / 180)));
}

TEST_CASE("parametric boundaries use the marching caster") {
    const auto ellipse = DomainSpec(ManifoldModel::euclidean(),
                                    {BoundarySegment::make_parametric("2*cos(t)", "sin(t)", 0.0, 2.0 * oracle::pi)},
                                    {}, std::nullopt, "ellipse");
    CHECK(contains(ellipse, {1.5, 0.0}));
    CHECK(contains(ellipse, {0.0, 0.99}));
    CHECK_FALSE(contains(ellipse, {0.0, 1.01}));
    CHECK(boundary_distance(ellipse, {0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-8));
    const RayHit h = hitting_radius(ellipse, {0.0, 0.0}, 0.0, 40.0);
    CHECK(h.hit_time == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(hitting_radius(ellipse, {0.0, 0.0}, oracle::pi / 2, 40.0).hit_time == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("custom models cast by marching and still meet closed-form sides") {
    const auto m = ManifoldModel::custom_conformal("2/(1-x^2-y^2)", Chart::disk(1.0));
    const auto tri = shapes::ideal_triangle(m);
    const auto ref = shapes::ideal_triangle(ManifoldModel::poincare_disk(1.0));
    oracle::SplitMix64 rng(12);
    for (int i = 0; i < 10; ++i) {
        const Vec2 p = random_interior(ref, rng);
        const double th = rng.uniform(0.0, 2.0 * oracle::pi);
        const double a = hitting_radius(tri, p, th, 40.0).hit_time;
        const double b = hitting_radius(ref, p, th, 40.0).hit_time;
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
}

TEST_CASE("unbounded domains need a view box") {
    CHECK_THROWS_AS(DomainSpec(ManifoldModel::euclidean(), {BoundarySegment::make_line({0, 0}, {0, -1})}, {}),
                    ConstructionError);
    CHECK(shapes::half_plane().unbounded());
    // Twenty bounding-box diagonals, floored at 40.
    CHECK(default_t_max(shapes::unit_disk()) == doctest::Approx(40.0 * std::sqrt(2.0)));
    CHECK(default_t_max(shapes::disk({0, 0}, 0.5)) == doctest::Approx(40.0));
    CHECK(default_t_max(shapes::half_plane()) == doctest::Approx(40.0));
}

#include <doctest.h>

#include <cmath>

#include "hardyscope/errors.hpp"
#include "hardyscope/manifold.hpp"
#include "oracles.hpp"

using namespace hardyscope;

TEST_CASE("conformal factor") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    CHECK(conformal_factor(hyp, {0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(conformal_factor(hyp, {0.5, 0.0}) == doctest::Approx(8.0 / 3.0));
    CHECK(conformal_factor(ManifoldModel::euclidean(), {12.0, -3.0}) == 1.0);
    CHECK_THROWS_AS(conformal_factor(hyp, {1.0, 0.0}), DomainError);
    const auto b4 = ManifoldModel::poincare_disk(4.0);
    CHECK(conformal_factor(b4, {0.3, 0.1}) == doctest::Approx(oracle::poincare_lambda(0.3, 0.1, 4.0)));
    CHECK_THROWS_AS(ManifoldModel::poincare_disk(0.0), PreconditionError);
}

TEST_CASE("custom factor matches the expression and its log-gradient") {
    const auto m = ManifoldModel::custom_conformal("2/(1-x^2-y^2)", Chart::disk(1.0));
    CHECK(m.lambda({0.5, 0.0}) == doctest::Approx(8.0 / 3.0));
    const Vec2 g = m.grad_log_lambda({0.3, -0.2});
    const double s = 1.0 - 0.09 - 0.04;
    CHECK(g.x == doctest::Approx(2.0 * 0.3 / s).epsilon(1e-7));
    CHECK(g.y == doctest::Approx(2.0 * -0.2 / s).epsilon(1e-7));
}

TEST_CASE("curvature") {
    CHECK(std::abs(curvature(ManifoldModel::euclidean(), {0.4, 1.0})) < 1e-8);
    CHECK(curvature(ManifoldModel::poincare_disk(1.0), {0.3, 0.4}) ==
          doctest::Approx(oracle::poincare_curvature(0.3, 0.4, 1.0)).epsilon(1e-6));
    CHECK(curvature(ManifoldModel::poincare_disk(4.0), {0.0, 0.0}) ==
          doctest::Approx(oracle::poincare_curvature(0.0, 0.0, 4.0)).epsilon(1e-6));
    CHECK_THROWS_AS(curvature(ManifoldModel::poincare_disk(1.0), {1.0 - 1e-5, 0.0}), StencilError);
}

TEST_CASE("curvature is constant on the poincare disk") {
    oracle::SplitMix64 rng(42);
    for (double b : {1.0, 2.5}) {
        const auto m = ManifoldModel::poincare_disk(b);
        for (int i = 0; i < 100; ++i) {
            const double r = 0.9 * std::sqrt(rng.uniform());
            const double t = rng.uniform(0.0, 2.0 * oracle::pi);
            CHECK(curvature(m, Vec2::polar(r, t)) == doctest::Approx(-b).epsilon(1e-5));
        }
    }
}

TEST_CASE("variable-curvature model stays within [-4, -1]") {
    const auto m = ManifoldModel::custom_conformal("2*2^(-(1+x)/2)/(1-x^2-y^2)", Chart::disk(1.0));
    oracle::SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p = Vec2::polar(0.95 * std::sqrt(rng.uniform()), rng.uniform(0.0, 2.0 * oracle::pi));
        const double k = curvature(m, p);
        // The linear exponent is harmonic, so K = -2^(1 + x) exactly.
        CHECK(k == doctest::Approx(-std::pow(2.0, 1.0 + p.x)).epsilon(1e-5));
        CHECK(k <= -1.0);
        CHECK(k >= -4.0);
    }
}

TEST_CASE("unit directions") {
    const Vec2 e = unit_direction(ManifoldModel::euclidean(), {3.0, 4.0}, 0.0);
    CHECK(e.x == doctest::Approx(1.0));
    CHECK(e.y == doctest::Approx(0.0));
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const Vec2 v0 = unit_direction(hyp, {0.0, 0.0}, 0.0);
    CHECK(v0.x == doctest::Approx(0.5));
    CHECK(std::abs(v0.y) < 1e-15);
    const Vec2 v1 = unit_direction(hyp, {0.5, 0.0}, oracle::pi / 2);
    CHECK(std::abs(v1.x) < 1e-15);
    CHECK(v1.y == doctest::Approx(0.375));
    CHECK(metric_norm(hyp, {0.5, 0.0}, v1) == doctest::Approx(1.0));
}

TEST_CASE("flat geodesics are straight") {
    const auto path = trace_geodesic(ManifoldModel::euclidean(), {0.0, 0.0}, {1.0, 0.0}, 2.0, 0.1);
    REQUIRE_FALSE(path.samples.empty());
    const auto& last = path.samples.back();
    CHECK(last.t == doctest::Approx(2.0));
    CHECK(last.point.x == doctest::Approx(2.0));
    CHECK(std::abs(last.point.y) < 1e-12);
    CHECK_FALSE(path.terminated_early);
}

TEST_CASE("radial poincare geodesic reaches tanh(t/2)") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const auto path = trace_geodesic(hyp, {0.0, 0.0}, {0.5, 0.0}, 1.0, 0.05);
    const auto& last = path.samples.back();
    CHECK(last.t == doctest::Approx(1.0));
    CHECK(std::abs(last.point.x - oracle::poincare_radial_position(1.0)) < 1e-6);
    double prev_t = -1.0;
    for (const auto& s : path.samples) {
        CHECK(std::abs(s.point.y) < 1e-9);
        CHECK(s.t > prev_t);
        prev_t = s.t;
        CHECK(std::abs(metric_norm(hyp, s.point, s.velocity) - 1.0) < 1e-8);
    }
}

TEST_CASE("geodesics through the origin follow diameters") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    for (double theta : {0.3, 1.1, 2.9, 4.4}) {
        const Vec2 v = unit_direction(hyp, {0.0, 0.0}, theta);
        const Vec2 dir = Vec2::polar(1.0, theta);
        const auto path = trace_geodesic(hyp, {0.0, 0.0}, v, 4.0, 0.1);
        for (const auto& s : path.samples) CHECK(std::abs(cross(dir, s.point)) < 1e-9);
    }
}

TEST_CASE("unit speed and reversibility on a variable metric") {
    const auto m = ManifoldModel::custom_conformal("2*2^(-(1+x)/2)/(1-x^2-y^2)", Chart::disk(1.0));
    oracle::SplitMix64 rng(9);
    for (int i = 0; i < 10; ++i) {
        const Vec2 p = Vec2::polar(0.5 * rng.uniform(), rng.uniform(0.0, 2.0 * oracle::pi));
        const Vec2 v = unit_direction(m, p, rng.uniform(0.0, 2.0 * oracle::pi));
        const double t = 1.0;
        const auto fwd = trace_geodesic(m, p, v, t, 0.05);
        REQUIRE_FALSE(fwd.terminated_early);
        for (const auto& s : fwd.samples) CHECK(std::abs(metric_norm(m, s.point, s.velocity) - 1.0) < 1e-8);
        const auto& end = fwd.samples.back();
        const auto back = trace_geodesic(m, end.point, -end.velocity, t, 0.05);
        CHECK(distance(back.samples.back().point, p) < 1e-6 * t);
    }
}

TEST_CASE("a non-unit initial vector is rejected") {
    CHECK_THROWS_AS(trace_geodesic(ManifoldModel::poincare_disk(1.0), {0.0, 0.0}, {1.0, 0.0}, 1.0, 0.1),
                    PreconditionError);
}

TEST_CASE("a geodesic leaving the chart terminates early") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const auto path = trace_geodesic(hyp, {0.0, 0.0}, {0.5, 0.0}, 100.0, 1.0);
    CHECK(path.terminated_early);
    CHECK(path.samples.back().point.x < 1.0);
}

TEST_CASE("closed-form distances") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    CHECK(hyp.distance({0.0, 0.0}, {0.5, 0.0}) == doctest::Approx(oracle::poincare_radius_to_distance(0.5)));
    CHECK(ManifoldModel::euclidean().distance({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
    const auto b4 = ManifoldModel::poincare_disk(4.0);
    CHECK(b4.distance({0.0, 0.0}, {0.5, 0.0}) == doctest::Approx(0.5 * oracle::poincare_radius_to_distance(0.5)));
}

TEST_CASE("the geodesic frame agrees with integration") {
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    const Vec2 base{0.3, -0.2};
    const GeodesicFrame frame(hyp, base);
    const double theta = 0.7;
    const auto path = trace_geodesic(hyp, base, unit_direction(hyp, base, theta), 1.5, 0.05);
    CHECK(distance(frame.point_at(theta, 1.5), path.samples.back().point) < 1e-8);
}

#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "hardyscope/expr.hpp"
#include "hardyscope/gencircle.hpp"
#include "hardyscope/geometry.hpp"

namespace hardyscope {

enum class ModelKind { euclidean, poincare_disk, custom_conformal };

std::string to_string(ModelKind kind);

// Open subset of the plane on which a conformal factor is defined.
struct Chart {
    enum class Kind { plane, disk, box };
    Kind kind = Kind::plane;
    double radius = 0.0;  // disk centered at the origin
    Box box{};

    static Chart plane() { return {}; }
    static Chart disk(double r) { return {Kind::disk, r, {}}; }
    static Chart rectangle(Box b) { return {Kind::box, 0.0, b}; }

    bool contains(Vec2 p) const;
    // Euclidean distance from p to the chart boundary (infinite for the plane).
    double boundary_distance(Vec2 p) const;
    // Length scale used for relative finite-difference steps.
    double scale() const;
};

// A 2-D conformal Riemannian model g = lambda^2 * euclidean.
// Immutable after construction; share freely between threads.
class ManifoldModel {
public:
    static ManifoldModel euclidean();
    // Curvature identically -b.
    static ManifoldModel poincare_disk(double b = 1.0);
    // lambda given as an expression in (x, y).
    static ManifoldModel custom_conformal(const std::string& lambda_expression, Chart chart);

    ModelKind kind() const { return kind_; }
    double curvature_magnitude() const { return b_; }
    const Chart& chart() const { return chart_; }
    const std::string& lambda_source() const { return lambda_source_; }

    bool in_chart(Vec2 p) const { return chart_.contains(p); }

    // Unchecked evaluations; callers guarantee chart membership.
    double lambda(Vec2 p) const;
    Vec2 grad_log_lambda(Vec2 p) const;

    // Euclidean and Poincaré models have exact geodesics and distances.
    bool has_closed_form_geodesics() const { return kind_ != ModelKind::custom_conformal; }
    double distance(Vec2 p, Vec2 q) const;

    // Curvature is bounded below by a known constant (used for diagnostics).
    bool curvature_bounded_below() const { return kind_ != ModelKind::custom_conformal; }

private:
    ManifoldModel() = default;

    ModelKind kind_ = ModelKind::euclidean;
    double b_ = 0.0;
    Chart chart_{};
    std::string lambda_source_ = "1";
    std::shared_ptr<const Expression> lambda_expr_;
};

double conformal_factor(const ManifoldModel& model, Vec2 p);

// Gaussian curvature K = -lambda^-2 * laplacian(log lambda), by central
// differences with step h_rel * chart scale.
double curvature(const ManifoldModel& model, Vec2 p, double h_rel = 1e-4);

// g-unit vector at p with euclidean direction (cos theta, sin theta).
Vec2 unit_direction(const ManifoldModel& model, Vec2 p, double theta);

// Metric norm of a chart vector at p.
double metric_norm(const ManifoldModel& model, Vec2 p, Vec2 v);

struct GeodesicSample {
    double t = 0.0;
    Vec2 point;
    Vec2 velocity;
};

struct GeodesicPath {
    std::vector<GeodesicSample> samples;
    double t_max = 0.0;
    bool terminated_early = false;
};

struct IntegratorSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Upper bound on the euclidean chart displacement of one step; 0 = none.
    double max_chart_step = 0.0;
    double min_step = 1e-14;
};

struct GeodesicState {
    Vec2 point;
    Vec2 velocity;
};

// Adaptive Dormand-Prince 5(4) integrator for the conformal geodesic equation
//   x'' = -2 (grad phi . x') x' + |x'|^2 grad phi,   phi = log lambda,
// with the velocity projected back to unit metric speed after every accepted
// step.
class GeodesicStepper {
public:
    GeodesicStepper(const ManifoldModel& model, IntegratorSettings settings = {});

    // Attempts one step of size h from s. Returns false if the step left the
    // chart or produced a non-finite state.
    bool try_step(const GeodesicState& s, double h, GeodesicState& out, double& error_norm) const;

    // Advances by exactly h with internal substeps (used for bisection refinement).
    bool advance(const GeodesicState& s, double h, GeodesicState& out) const;

    GeodesicState normalized(GeodesicState s) const;
    const IntegratorSettings& settings() const { return settings_; }
    const ManifoldModel& model() const { return *model_; }

private:
    Vec2 acceleration(Vec2 x, Vec2 v) const;

    const ManifoldModel* model_;
    IntegratorSettings settings_;
};

GeodesicPath trace_geodesic(const ManifoldModel& model, Vec2 p, Vec2 v, double t_max, double step,
                            IntegratorSettings settings = {});

// Closed-form exponential map at a base point for the euclidean and Poincaré
// models. In the recentered frame the base point sits at 0 and geodesics
// through it are straight rays with unchanged direction.
class GeodesicFrame {
public:
    GeodesicFrame(const ManifoldModel& model, Vec2 base);

    std::complex<double> to_frame(Vec2 z) const;
    Vec2 from_frame(std::complex<double> w) const;
    GeneralizedCircle transform(const GeneralizedCircle& g) const;

    // Metric distance from the base point to a frame point of modulus s, and inverse.
    double metric_radius(double s) const;
    double frame_radius(double t) const;
    // Largest admissible frame modulus (1 for the disk, infinite for the plane).
    double frame_limit() const { return hyperbolic_ ? 1.0 : kInfinity; }

    Vec2 point_at(double theta, double t) const;
    Vec2 velocity_at(double theta, double t) const;
    Vec2 base() const { return base_; }

private:
    bool hyperbolic_ = false;
    double sqrt_b_ = 1.0;
    Vec2 base_;
    std::complex<double> p_;
};

}  // namespace hardyscope

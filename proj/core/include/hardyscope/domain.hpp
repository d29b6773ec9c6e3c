#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardyscope/expr.hpp"
#include "hardyscope/gencircle.hpp"
#include "hardyscope/geometry.hpp"
#include "hardyscope/manifold.hpp"

namespace hardyscope {

enum class SegmentKind {
    line,        // infinite straight line; the domain lies to its left
    straight,    // chart line segment (a geodesic of the flat model, or a Poincaré diameter)
    arc,         // circular chart arc (euclidean arcs and Poincaré geodesics)
    parametric,  // (x(t), y(t)) from expressions
};

std::string to_string(SegmentKind kind);

// One smooth piece of the boundary, parametrized by s in [0, 1]
// (any real s for lines).
struct BoundarySegment {
    int id = 0;
    SegmentKind kind = SegmentKind::straight;
    bool gamma_member = true;
    bool geodesic = false;

    Vec2 a;  // straight and arc: exact start; line: anchor point
    Vec2 b;  // straight and arc: exact end;   line: direction
    Vec2 center;
    double radius = 0.0;
    double theta0 = 0.0;
    double sweep = 0.0;
    std::shared_ptr<const Expression> curve_x;
    std::shared_ptr<const Expression> curve_y;
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<Vec2> polyline;  // parametric segments only

    // +1 if the domain lies to the left of the direction of increasing s.
    int inward_side = 1;

    static BoundarySegment make_line(Vec2 point, Vec2 direction);
    static BoundarySegment make_straight(Vec2 from, Vec2 to);
    static BoundarySegment make_arc(Vec2 center, double radius, double theta0, double sweep);
    static BoundarySegment make_parametric(const std::string& x_of_t, const std::string& y_of_t, double t_from,
                                           double t_to);

    bool bounded() const { return kind != SegmentKind::line; }
    Vec2 point_at(double s) const;
    Vec2 tangent_at(double s) const;
    Vec2 inward_normal(double s) const;
    Vec2 start() const { return point_at(0.0); }
    Vec2 end() const { return point_at(1.0); }

    // Circle or line carrying the segment; empty for parametric curves.
    std::optional<GeneralizedCircle> carrier() const;
    // Parameter of q when q (assumed on the carrier) lies within the segment.
    std::optional<double> locate(Vec2 q, double tol) const;

    double chart_distance(Vec2 p) const;
    double chart_length() const;
    Box extent() const;
    // Crossings of the horizontal ray from p towards +x (half-open rule).
    int crossings(Vec2 p) const;
};

struct Vertex {
    Vec2 point;
    bool ideal = false;
};

// Domain with piecewise-smooth boundary. The vertex list is the critical set.
// Immutable after construction and safe for concurrent queries.
class DomainSpec {
public:
    // view_box is required for unbounded domains (those with line segments)
    // and is used to size grids and sampling windows.
    DomainSpec(ManifoldModel model, std::vector<BoundarySegment> segments, std::vector<Vertex> vertices,
               std::optional<Box> view_box = std::nullopt, std::string name = {});

    const ManifoldModel& model() const { return model_; }
    const std::vector<BoundarySegment>& segments() const { return segments_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const Box& bounding_box() const { return bbox_; }
    const std::string& name() const { return name_; }

    bool unbounded() const { return unbounded_; }
    bool has_ideal_vertices() const;
    bool has_gamma_subset() const;
    // Closed-form ray casting and distances are available.
    bool analytic() const { return analytic_; }
    double tolerance() const { return tol_; }

    // Nearest chart distance from p to the boundary (or only to Γ).
    double chart_distance_to_boundary(Vec2 p, bool gamma_only = false) const;
    int nearest_segment(Vec2 p, bool gamma_only = false) const;

    bool inside_raw(Vec2 p) const;

private:
    ManifoldModel model_;
    std::vector<BoundarySegment> segments_;
    std::vector<Vertex> vertices_;
    Box bbox_;
    std::string name_;
    bool unbounded_ = false;
    bool analytic_ = false;
    double tol_ = 1e-12;
};

// Open-domain membership: boundary points are outside.
bool contains(const DomainSpec& dom, Vec2 p);

// Metric distance d(p) to the boundary.
double boundary_distance(const DomainSpec& dom, Vec2 p);

struct RayHit {
    double hit_time = kInfinity;
    std::optional<int> segment_id;
    std::optional<Vec2> hit_point;
    bool capped = false;
    bool perturbed = false;

    bool infinite() const { return !std::isfinite(hit_time); }
};

enum class CastMethod {
    automatic,  // closed form when the domain allows it, marching otherwise
    analytic,
    march,      // integrate the geodesic and bisect on the inside/outside predicate
};

struct CastOptions {
    CastMethod method = CastMethod::automatic;
    IntegratorSettings integrator{};
};

// Precomputes everything that depends only on the base point, so that casting
// many directions from one point is cheap.
class RayCaster {
public:
    RayCaster(const DomainSpec& dom, Vec2 p, CastOptions options = {});

    // Forward first contact along the geodesic with initial direction theta.
    // With gamma_only the ray still stops at the first boundary contact and
    // only counts when that contact lies on Γ.
    RayHit cast(double theta, double t_max, bool gamma_only = false) const;
    // inf |t| over both directions.
    RayHit two_sided(double theta, double t_max, bool gamma_only = false) const;

    bool uses_closed_form() const { return closed_form_; }

private:
    RayHit cast_closed_form(double theta, double t_max, bool gamma_only) const;
    RayHit cast_march(double theta, double t_max, bool gamma_only, bool allow_retry) const;

    const DomainSpec* dom_;
    Vec2 p_;
    CastOptions options_;
    bool closed_form_ = false;
    std::optional<GeodesicFrame> frame_;
    std::vector<std::optional<GeneralizedCircle>> transformed_;
};

RayHit hitting_radius(const DomainSpec& dom, Vec2 p, double theta, double t_max, bool gamma_only = false,
                      CastOptions options = {});

// max(40, 20 x metric diameter of the bounding box when that is finite).
double default_t_max(const DomainSpec& dom);

struct PolygonVertex {
    Vec2 point;
    bool ideal = false;

    static PolygonVertex finite(Vec2 p) { return {p, false}; }
    static PolygonVertex at_infinity(double angle_rad) { return {Vec2::polar(1.0, angle_rad), true}; }
};

// Domain bounded by geodesic arcs between consecutive vertices. gamma_mask may
// be empty (every side in Γ) or give one flag per side; side i joins vertex i
// to vertex i+1.
DomainSpec build_geodesic_polygon(const ManifoldModel& model, std::span<const PolygonVertex> vertices,
                                  std::span<const bool> gamma_mask = {}, std::string name = {});

namespace shapes {

DomainSpec disk(Vec2 center, double radius);
DomainSpec unit_disk();
DomainSpec rectangle(double x0, double y0, double x1, double y1);
DomainSpec unit_square();
// {x > 0}
DomainSpec half_plane();
// {0 < x < width}
DomainSpec strip(double width = 1.0);
// Metric ball of radius R about center in the given closed-form model.
DomainSpec geodesic_ball(const ManifoldModel& model, Vec2 center, double radius);
// Ideal polygon in the given model with vertices at the listed boundary angles (degrees).
DomainSpec ideal_polygon(const ManifoldModel& model, std::span<const double> angles_deg);
DomainSpec ideal_triangle(const ManifoldModel& model = ManifoldModel::poincare_disk(1.0));

}  // namespace shapes

}  // namespace hardyscope

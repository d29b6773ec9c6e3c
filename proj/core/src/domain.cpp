#include "hardyscope/domain.hpp"

#include <algorithm>
#include <cmath>

#include "hardyscope/errors.hpp"

namespace hardyscope {

std::string to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::line: return "line";
        case SegmentKind::straight: return "straight";
        case SegmentKind::arc: return "arc";
        case SegmentKind::parametric: return "parametric";
    }
    return "unknown";
}

namespace {

constexpr int kParametricPieces = 512;

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = d.norm2();
    double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

int straight_crossing(Vec2 p, Vec2 a, Vec2 b) {
    if ((a.y > p.y) == (b.y > p.y)) return 0;
    const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
    return x > p.x ? 1 : 0;
}

// Arc angle fraction in [0, 1] for an angle, or a value outside when off the arc.
double arc_fraction(const BoundarySegment& s, double angle) {
    if (s.sweep >= 0.0) return wrap_angle(angle - s.theta0) / s.sweep;
    return wrap_angle(s.theta0 - angle) / -s.sweep;
}

}  // namespace

BoundarySegment BoundarySegment::make_line(Vec2 point, Vec2 direction) {
    BoundarySegment s;
    s.kind = SegmentKind::line;
    s.a = point;
    s.b = direction / direction.norm();
    s.geodesic = true;
    return s;
}

BoundarySegment BoundarySegment::make_straight(Vec2 from, Vec2 to) {
    BoundarySegment s;
    s.kind = SegmentKind::straight;
    s.a = from;
    s.b = to;
    return s;
}

BoundarySegment BoundarySegment::make_arc(Vec2 center, double radius, double theta0, double sweep) {
    BoundarySegment s;
    s.kind = SegmentKind::arc;
    s.center = center;
    s.radius = radius;
    s.theta0 = theta0;
    s.sweep = std::clamp(sweep, -kTwoPi, kTwoPi);
    s.a = center + Vec2::polar(radius, theta0);
    s.b = std::abs(s.sweep) == kTwoPi ? s.a : center + Vec2::polar(radius, theta0 + s.sweep);
    return s;
}

BoundarySegment BoundarySegment::make_parametric(const std::string& x_of_t, const std::string& y_of_t,
                                                 double t_from, double t_to) {
    BoundarySegment s;
    s.kind = SegmentKind::parametric;
    s.curve_x = std::make_shared<const Expression>(Expression::parse(x_of_t, {"t"}));
    s.curve_y = std::make_shared<const Expression>(Expression::parse(y_of_t, {"t"}));
    s.t0 = t_from;
    s.t1 = t_to;
    s.polyline.reserve(kParametricPieces + 1);
    for (int i = 0; i <= kParametricPieces; ++i) s.polyline.push_back(s.point_at(double(i) / kParametricPieces));
    return s;
}

Vec2 BoundarySegment::point_at(double s) const {
    switch (kind) {
        case SegmentKind::line: return a + b * s;
        case SegmentKind::straight: return a + (b - a) * s;
        case SegmentKind::arc:
            // Endpoints are stored exactly so that segments sharing a vertex agree bit for bit.
            if (s == 0.0) return a;
            if (s == 1.0) return b;
            return center + Vec2::polar(radius, theta0 + s * sweep);
        case SegmentKind::parametric: {
            const double t = t0 + s * (t1 - t0);
            return {(*curve_x)(t), (*curve_y)(t)};
        }
    }
    return {};
}

Vec2 BoundarySegment::tangent_at(double s) const {
    switch (kind) {
        case SegmentKind::line: return b;
        case SegmentKind::straight: return b - a;
        case SegmentKind::arc: {
            const double th = theta0 + s * sweep;
            return Vec2{-std::sin(th), std::cos(th)} * (radius * sweep);
        }
        case SegmentKind::parametric: {
            const double h = 1e-6;
            const double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
            return (point_at(hi) - point_at(lo)) / (hi - lo);
        }
    }
    return {};
}

Vec2 BoundarySegment::inward_normal(double s) const {
    const Vec2 t = tangent_at(s);
    return t.perp() * (double(inward_side) / t.norm());
}

std::optional<GeneralizedCircle> BoundarySegment::carrier() const {
    switch (kind) {
        case SegmentKind::line: return GeneralizedCircle::line(a, b);
        case SegmentKind::straight: return GeneralizedCircle::line(a, b - a);
        case SegmentKind::arc: return GeneralizedCircle::circle(center, radius);
        case SegmentKind::parametric: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> BoundarySegment::locate(Vec2 q, double tol) const {
    switch (kind) {
        case SegmentKind::line: return dot(q - a, b);
        case SegmentKind::straight: {
            const Vec2 d = b - a;
            const double len = d.norm();
            const double s = dot(q - a, d) / (len * len);
            const double ds = tol / len;
            if (s < -ds || s > 1.0 + ds) return std::nullopt;
            return std::clamp(s, 0.0, 1.0);
        }
        case SegmentKind::arc: {
            const double f = arc_fraction(*this, (q - center).angle());
            const double df = tol / (radius * std::abs(sweep));
            if (f <= 1.0 + df) return std::min(f, 1.0);
            // Just before theta0: wrap_angle put it near a full turn.
            const double full = kTwoPi / std::abs(sweep);
            if (f >= full - df) return 0.0;
            return std::nullopt;
        }
        case SegmentKind::parametric: {
            double best = kInfinity;
            double best_s = 0.0;
            for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
                const double d = point_segment_distance(q, polyline[i], polyline[i + 1]);
                if (d < best) {
                    best = d;
                    best_s = double(i) / double(polyline.size() - 1);
                }
            }
            if (best > std::max(tol, 1e-6)) return std::nullopt;
            return best_s;
        }
    }
    return std::nullopt;
}

double BoundarySegment::chart_distance(Vec2 p) const {
    switch (kind) {
        case SegmentKind::line: return std::abs(cross(b, p - a));
        case SegmentKind::straight: return point_segment_distance(p, a, b);
        case SegmentKind::arc: {
            const Vec2 r = p - center;
            const double f = arc_fraction(*this, r.angle());
            if (f <= 1.0) return std::abs(r.norm() - radius);
            return std::min((p - start()).norm(), (p - end()).norm());
        }
        case SegmentKind::parametric: {
            double best = kInfinity;
            for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
                best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
            return best;
        }
    }
    return kInfinity;
}

double BoundarySegment::chart_length() const {
    switch (kind) {
        case SegmentKind::line: return kInfinity;
        case SegmentKind::straight: return (b - a).norm();
        case SegmentKind::arc: return radius * std::abs(sweep);
        case SegmentKind::parametric: {
            double len = 0.0;
            for (std::size_t i = 0; i + 1 < polyline.size(); ++i) len += (polyline[i + 1] - polyline[i]).norm();
            return len;
        }
    }
    return 0.0;
}

Box BoundarySegment::extent() const {
    Box box = Box::empty();
    switch (kind) {
        case SegmentKind::line: return {-kInfinity, -kInfinity, kInfinity, kInfinity};
        case SegmentKind::straight:
            box.extend(a);
            box.extend(b);
            return box;
        case SegmentKind::arc:
            box.extend(start());
            box.extend(end());
            for (int k = 0; k < 4; ++k) {
                const double ang = k * 0.5 * kPi;
                if (arc_fraction(*this, ang) <= 1.0) box.extend(center + Vec2::polar(radius, ang));
            }
            return box;
        case SegmentKind::parametric:
            for (const Vec2& q : polyline) box.extend(q);
            return box;
    }
    return box;
}

int BoundarySegment::crossings(Vec2 p) const {
    switch (kind) {
        case SegmentKind::line: return 0;
        case SegmentKind::straight: return straight_crossing(p, a, b);
        case SegmentKind::parametric: {
            int n = 0;
            for (std::size_t i = 0; i + 1 < polyline.size(); ++i) n += straight_crossing(p, polyline[i], polyline[i + 1]);
            return n;
        }
        case SegmentKind::arc: {
            // Split into y-monotone pieces at the top and bottom of the circle; the
            // breakpoints carry exact y values so the half-open rule is consistent.
            struct Break {
                double f;
                Vec2 q;
            };
            std::vector<Break> cuts{{0.0, a}};
            for (int k = 0; k < 2; ++k) {
                const double ang = 0.5 * kPi + k * kPi;
                const double f = arc_fraction(*this, ang);
                if (f > 0.0 && f < 1.0) cuts.push_back({f, {center.x, center.y + (k == 0 ? radius : -radius)}});
            }
            cuts.push_back({1.0, b});
            std::sort(cuts.begin(), cuts.end(), [](const Break& l, const Break& r) { return l.f < r.f; });
            int n = 0;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const Vec2 pa = cuts[i].q;
                const Vec2 pb = cuts[i + 1].q;
                if ((pa.y > p.y) == (pb.y > p.y)) continue;
                double x;
                if (p.y == pa.y) {
                    x = pa.x;
                } else if (p.y == pb.y) {
                    x = pb.x;
                } else {
                    const Vec2 mid = point_at(0.5 * (cuts[i].f + cuts[i + 1].f));
                    const double dy = p.y - center.y;
                    const double dx = std::sqrt(std::max(0.0, radius * radius - dy * dy));
                    x = mid.x >= center.x ? center.x + dx : center.x - dx;
                }
                if (x > p.x) ++n;
            }
            return n;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

DomainSpec::DomainSpec(ManifoldModel model, std::vector<BoundarySegment> segments, std::vector<Vertex> vertices,
                       std::optional<Box> view_box, std::string name)
    : model_(std::move(model)), segments_(std::move(segments)), vertices_(std::move(vertices)), name_(std::move(name)) {
    if (segments_.empty()) throw ConstructionError("domain: at least one boundary segment is required");

    analytic_ = model_.has_closed_form_geodesics();
    Box box = Box::empty();
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        auto& s = segments_[i];
        s.id = static_cast<int>(i);
        if (s.kind == SegmentKind::line) {
            unbounded_ = true;
            if (model_.kind() != ModelKind::euclidean)
                throw ConstructionError("domain: unbounded line segments require the euclidean model");
        } else {
            box.extend(s.extent().xmin < kInfinity ? Vec2{s.extent().xmin, s.extent().ymin} : Vec2{});
            box.extend({s.extent().xmax, s.extent().ymax});
        }
        if (s.kind == SegmentKind::parametric) analytic_ = false;
    }

    for (const auto& v : vertices_) {
        if (!v.ideal) continue;
        if (model_.kind() == ModelKind::euclidean)
            throw ConstructionError("domain: ideal vertices are not allowed on a flat model");
        if (model_.chart().kind != Chart::Kind::disk || std::abs(v.point.norm() - model_.chart().radius) > 1e-9)
            throw ConstructionError("domain: ideal vertices must lie on the chart boundary circle");
    }

    if (unbounded_) {
        if (!view_box) throw ConstructionError("domain: unbounded domains need a view box");
        bbox_ = *view_box;
    } else {
        bbox_ = view_box ? *view_box : box;
    }
    tol_ = 1e-12 * std::max(1.0, bbox_.diameter());

    // Orient every segment towards the interior by probing both sides of its midpoint.
    for (auto& s : segments_) {
        if (s.kind == SegmentKind::line) {
            s.inward_side = 1;
            continue;
        }
        const Vec2 mid = s.point_at(0.5);
        const Vec2 t = s.tangent_at(0.5);
        const Vec2 n = t.perp() / t.norm();
        const double delta = 1e-7 * std::max(1.0, bbox_.diameter());
        const bool left = inside_raw(mid + n * delta);
        const bool right = inside_raw(mid - n * delta);
        if (left == right)
            throw ConstructionError("domain: segment " + std::to_string(s.id) + " does not separate inside from outside");
        s.inward_side = left ? 1 : -1;
    }
}

bool DomainSpec::has_ideal_vertices() const {
    return std::any_of(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return v.ideal; });
}

bool DomainSpec::has_gamma_subset() const {
    return std::any_of(segments_.begin(), segments_.end(), [](const BoundarySegment& s) { return !s.gamma_member; });
}

bool DomainSpec::inside_raw(Vec2 p) const {
    if (!model_.in_chart(p)) return false;
    int crossings = 0;
    bool any_bounded = false;
    for (const auto& s : segments_) {
        if (s.kind == SegmentKind::line) {
            if (cross(s.b, p - s.a) <= 0.0) return false;
        } else {
            any_bounded = true;
            crossings += s.crossings(p);
        }
    }
    return !any_bounded || (crossings % 2 == 1);
}

double DomainSpec::chart_distance_to_boundary(Vec2 p, bool gamma_only) const {
    double best = kInfinity;
    for (const auto& s : segments_) {
        if (gamma_only && !s.gamma_member) continue;
        best = std::min(best, s.chart_distance(p));
    }
    return best;
}

int DomainSpec::nearest_segment(Vec2 p, bool gamma_only) const {
    double best = kInfinity;
    int id = -1;
    for (const auto& s : segments_) {
        if (gamma_only && !s.gamma_member) continue;
        const double d = s.chart_distance(p);
        if (d < best) {
            best = d;
            id = s.id;
        }
    }
    return id;
}

bool contains(const DomainSpec& dom, Vec2 p) {
    if (!dom.inside_raw(p)) return false;
    return dom.chart_distance_to_boundary(p) > dom.tolerance();
}

// ---------------------------------------------------------------------------

namespace {

double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

// Sampled bracket followed by golden-section refinement.
double bracketed_minimum(const std::function<double(double)>& f, double lo, double hi, int samples, double tol) {
    double best = kInfinity;
    int best_i = 0;
    for (int i = 0; i <= samples; ++i) {
        const double v = f(lo + (hi - lo) * i / samples);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    const double step = (hi - lo) / samples;
    const double a = std::max(lo, lo + (best_i - 1) * step);
    const double b = std::min(hi, lo + (best_i + 1) * step);
    return std::min(best, golden_minimize(f, a, b, tol));
}

double closed_form_segment_distance(const DomainSpec& dom, const GeodesicFrame& frame, const BoundarySegment& s) {
    const ManifoldModel& model = dom.model();
    if (s.kind == SegmentKind::parametric) {
        const auto f = [&](double u) {
            const Vec2 q = s.point_at(u);
            return model.in_chart(q) ? model.distance(frame.base(), q) : kInfinity;
        };
        return bracketed_minimum(f, 0.0, 1.0, 128, 1e-12);
    }
    const GeneralizedCircle g = frame.transform(*s.carrier());
    const std::complex<double> w = g.closest_to_origin();
    double modulus = kInfinity;
    if (s.locate(frame.from_frame(w), 1e-9)) {
        modulus = std::abs(w);
    } else if (s.bounded()) {
        modulus = std::min(std::abs(frame.to_frame(s.start())), std::abs(frame.to_frame(s.end())));
    }
    return frame.metric_radius(modulus);
}

}  // namespace

double boundary_distance(const DomainSpec& dom, Vec2 p) {
    if (!contains(dom, p)) throw PreconditionError("boundary_distance: point is not interior");
    if (dom.model().has_closed_form_geodesics()) {
        const GeodesicFrame frame(dom.model(), p);
        double best = kInfinity;
        for (const auto& s : dom.segments()) best = std::min(best, closed_form_segment_distance(dom, frame, s));
        return best;
    }
    // Geodesic shooting: the distance is realized by a boundary-hitting geodesic.
    const RayCaster caster(dom, p);
    const double t_max = default_t_max(dom);
    const auto f = [&](double theta) { return caster.cast(theta, t_max).hit_time; };
    return bracketed_minimum(f, 0.0, kTwoPi, 96, 1e-9);
}

double default_t_max(const DomainSpec& dom) {
    double diameter = 0.0;
    const Box& b = dom.bounding_box();
    const ManifoldModel& m = dom.model();
    if (!dom.unbounded() && m.has_closed_form_geodesics()) {
        const Vec2 corners[4] = {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
        bool all_inside = true;
        for (const auto& c : corners) all_inside = all_inside && m.in_chart(c);
        if (all_inside) diameter = std::max(m.distance(corners[0], corners[2]), m.distance(corners[1], corners[3]));
    }
    return std::max(40.0, 20.0 * diameter);
}

// ---------------------------------------------------------------------------

namespace {


BoundarySegment poincare_geodesic(Vec2 a, Vec2 b) {
    // Circles orthogonal to the unit circle through a and b satisfy c.q = (1 + |q|^2) / 2.
    const double det = cross(a, b);
    if (std::abs(det) < 1e-12) {
        auto s = BoundarySegment::make_straight(a, b);
        s.geodesic = true;
        return s;
    }
    const double ra = 0.5 * (1.0 + a.norm2());
    const double rb = 0.5 * (1.0 + b.norm2());
    const Vec2 c{(ra * b.y - rb * a.y) / det, (rb * a.x - ra * b.x) / det};
    const double r = std::sqrt(c.norm2() - 1.0);
    const double ta = (a - c).angle();
    const double tb = (b - c).angle();
    double sweep = wrap_angle(tb - ta);
    const Vec2 mid = c + Vec2::polar(r, ta + 0.5 * sweep);
    if (mid.norm2() >= 1.0) sweep -= kTwoPi;
    auto s = BoundarySegment::make_arc(c, r, ta, sweep);
    s.a = a;
    s.b = b;
    s.geodesic = true;
    return s;
}

std::vector<Vec2> segment_intersections(const BoundarySegment& s1, const BoundarySegment& s2) {
    std::vector<Vec2> out;
    const auto c1 = s1.carrier();
    const auto c2 = s2.carrier();
    if (!c1 || !c2) return out;
    auto on_both = [&](Vec2 q) {
        if (s1.locate(q, 1e-12) && s2.locate(q, 1e-12)) out.push_back(q);
    };
    if (s1.kind == SegmentKind::arc && s2.kind == SegmentKind::arc) {
        const Vec2 d = s2.center - s1.center;
        const double dist = d.norm();
        if (dist == 0.0 || dist > s1.radius + s2.radius || dist < std::abs(s1.radius - s2.radius)) return out;
        const double along = (s1.radius * s1.radius - s2.radius * s2.radius + dist * dist) / (2.0 * dist);
        const double h = std::sqrt(std::max(0.0, s1.radius * s1.radius - along * along));
        const Vec2 base = s1.center + d * (along / dist);
        const Vec2 off = d.perp() * (h / dist);
        on_both(base + off);
        if (h > 0.0) on_both(base - off);
        return out;
    }
    // One of them is straight: parametrize it and intersect with the other carrier.
    const BoundarySegment& st = s1.kind == SegmentKind::arc ? s2 : s1;
    const GeneralizedCircle& other = s1.kind == SegmentKind::arc ? *c1 : *c2;
    const Vec2 origin = st.kind == SegmentKind::line ? st.a : st.a;
    const Vec2 dir = st.kind == SegmentKind::line ? st.b : st.b - st.a;
    const double len = dir.norm();
    const GeneralizedCircle g = other.translated(origin.as_complex());
    const std::complex<double> u = (dir / len).as_complex();
    for (double sgn : {1.0, -1.0}) {
        for (double t : g.ray_parameters(u * sgn)) on_both(origin + dir * (sgn * t / len));
    }
    return out;
}

}  // namespace

DomainSpec build_geodesic_polygon(const ManifoldModel& model, std::span<const PolygonVertex> vertices,
                                  std::span<const bool> gamma_mask, std::string name) {
    const std::size_t n = vertices.size();
    if (n < 3) throw ConstructionError("geodesic polygon: at least three vertices are required");
    if (!gamma_mask.empty() && gamma_mask.size() != n)
        throw ConstructionError("geodesic polygon: gamma mask needs one flag per side");
    if (model.kind() == ModelKind::custom_conformal)
        throw ConstructionError("geodesic polygon: custom conformal models have no closed-form geodesics");

    std::vector<BoundarySegment> sides;
    std::vector<Vertex> verts;
    for (std::size_t i = 0; i < n; ++i) {
        const PolygonVertex& va = vertices[i];
        const PolygonVertex& vb = vertices[(i + 1) % n];
        if (va.ideal && model.kind() == ModelKind::euclidean)
            throw ConstructionError("geodesic polygon: ideal vertex on a flat model");
        if ((va.point - vb.point).norm() < 1e-12)
            throw ConstructionError("geodesic polygon: consecutive vertices coincide");
        if (!va.ideal && !model.in_chart(va.point))
            throw ConstructionError("geodesic polygon: finite vertex outside the chart");
        BoundarySegment s = model.kind() == ModelKind::euclidean ? BoundarySegment::make_straight(va.point, vb.point)
                                                                  : poincare_geodesic(va.point, vb.point);
        if (model.kind() == ModelKind::euclidean) s.geodesic = true;
        s.gamma_member = gamma_mask.empty() ? true : gamma_mask[i];
        sides.push_back(std::move(s));
        verts.push_back({va.point, va.ideal});
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            for (const Vec2& q : segment_intersections(sides[i], sides[j])) {
                bool at_shared_vertex = false;
                if (adjacent) {
                    for (const auto& v : verts) at_shared_vertex = at_shared_vertex || (q - v.point).norm() < 1e-6;
                }
                if (!at_shared_vertex)
                    throw ConstructionError("geodesic polygon: sides " + std::to_string(i) + " and " + std::to_string(j) +
                                            " intersect");
            }
        }
    }
    return DomainSpec(model, std::move(sides), std::move(verts), std::nullopt, std::move(name));
}

namespace shapes {

DomainSpec disk(Vec2 center, double radius) {
    return DomainSpec(ManifoldModel::euclidean(), {BoundarySegment::make_arc(center, radius, 0.0, kTwoPi)}, {},
                      std::nullopt, "disk");
}

DomainSpec unit_disk() { return disk({0.0, 0.0}, 1.0); }

DomainSpec rectangle(double x0, double y0, double x1, double y1) {
    const PolygonVertex v[4] = {PolygonVertex::finite({x0, y0}), PolygonVertex::finite({x1, y0}),
                                PolygonVertex::finite({x1, y1}), PolygonVertex::finite({x0, y1})};
    return build_geodesic_polygon(ManifoldModel::euclidean(), v, {}, "rectangle");
}

DomainSpec unit_square() { return rectangle(0.0, 0.0, 1.0, 1.0); }

DomainSpec half_plane() {
    return DomainSpec(ManifoldModel::euclidean(), {BoundarySegment::make_line({0.0, 0.0}, {0.0, -1.0})}, {},
                      Box{0.0, -2.0, 4.0, 2.0}, "half_plane");
}

DomainSpec strip(double width) {
    return DomainSpec(ManifoldModel::euclidean(),
                      {BoundarySegment::make_line({0.0, 0.0}, {0.0, -1.0}),
                       BoundarySegment::make_line({width, 0.0}, {0.0, 1.0})},
                      {}, Box{0.0, -2.0 * width, width, 2.0 * width}, "strip");
}

DomainSpec geodesic_ball(const ManifoldModel& model, Vec2 center, double radius) {
    switch (model.kind()) {
        case ModelKind::euclidean: return disk(center, radius);
        case ModelKind::poincare_disk: {
            // Hyperbolic circles are euclidean circles in the chart.
            const double rho = std::tanh(0.5 * std::sqrt(model.curvature_magnitude()) * radius);
            const double c2 = center.norm2();
            const double den = 1.0 - rho * rho * c2;
            const Vec2 ec = center * ((1.0 - rho * rho) / den);
            const double er = rho * (1.0 - c2) / den;
            return DomainSpec(model, {BoundarySegment::make_arc(ec, er, 0.0, kTwoPi)}, {}, std::nullopt,
                              "geodesic_ball");
        }
        case ModelKind::custom_conformal: break;
    }
    throw ConstructionError("geodesic_ball: no closed form for custom conformal models");
}

DomainSpec ideal_polygon(const ManifoldModel& model, std::span<const double> angles_deg) {
    std::vector<PolygonVertex> v;
    for (double a : angles_deg) v.push_back(PolygonVertex::at_infinity(a * kPi / 180.0));
    if (model.kind() == ModelKind::poincare_disk) return build_geodesic_polygon(model, v, {}, "ideal_polygon");
    // Same chart polygon (hyperbolic geodesic sides) carrying a different conformal factor.
    const DomainSpec base = build_geodesic_polygon(ManifoldModel::poincare_disk(1.0), v, {}, "ideal_polygon");
    std::vector<BoundarySegment> sides = base.segments();
    for (auto& s : sides) s.geodesic = false;
    return DomainSpec(model, std::move(sides), base.vertices(), std::nullopt, "ideal_polygon");
}

DomainSpec ideal_triangle(const ManifoldModel& model) {
    const double angles[3] = {90.0, 210.0, 330.0};
    return ideal_polygon(model, angles);
}

}  // namespace shapes

}  // namespace hardyscope

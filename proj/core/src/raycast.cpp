#include <algorithm>
#include <cmath>

#include "hardyscope/domain.hpp"
#include "hardyscope/errors.hpp"

namespace hardyscope {

namespace {

constexpr double kBisectionTol = 1e-10;
constexpr double kRetryPerturbation = 1e-7;
constexpr double kPoincareEdge = 1.0 - 1e-12;
// Between two asymptotic sides the horn is about delta^2 wide at chart distance
// delta from the ideal vertex; below this cutoff membership is round-off, so a
// path that gets this close has reached the ideal boundary.
constexpr double kCuspCutoff = 1e-6;

RayHit capped_hit() {
    RayHit h;
    h.capped = true;
    return h;
}

}  // namespace

RayCaster::RayCaster(const DomainSpec& dom, Vec2 p, CastOptions options) : dom_(&dom), p_(p), options_(options) {
    if (!contains(dom, p)) throw PreconditionError("hitting_radius: base point is not interior");
    const bool can_close = dom.analytic();
    if (options.method == CastMethod::analytic && !can_close)
        throw PreconditionError("hitting_radius: closed-form casting unavailable for this domain");
    closed_form_ = can_close && options.method != CastMethod::march;
    if (closed_form_) {
        frame_.emplace(dom.model(), p);
        transformed_.reserve(dom.segments().size());
        for (const auto& s : dom.segments()) {
            const auto carrier = s.carrier();
            transformed_.push_back(carrier ? std::optional(frame_->transform(*carrier)) : std::nullopt);
        }
    }
}

RayHit RayCaster::cast(double theta, double t_max, bool gamma_only) const {
    return closed_form_ ? cast_closed_form(theta, t_max, gamma_only) : cast_march(theta, t_max, gamma_only, true);
}

RayHit RayCaster::two_sided(double theta, double t_max, bool gamma_only) const {
    RayHit fwd = cast(theta, t_max, gamma_only);
    RayHit bwd = cast(theta + kPi, t_max, gamma_only);
    if (bwd.hit_time < fwd.hit_time) return bwd;
    if (fwd.infinite() && bwd.infinite()) fwd.capped = fwd.capped || bwd.capped;
    return fwd;
}

RayHit RayCaster::cast_closed_form(double theta, double t_max, bool gamma_only) const {
    const std::complex<double> u = std::polar(1.0, theta);
    const double limit = frame_->frame_limit();
    const auto& segments = dom_->segments();
    double best_s = kInfinity;
    int best_id = -1;
    Vec2 best_point;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!transformed_[i]) continue;
        for (double s : transformed_[i]->ray_parameters(u)) {
            if (s >= best_s) break;
            if (s >= limit) break;
            const Vec2 q = frame_->from_frame(s * u);
            if (!segments[i].locate(q, 1e-10)) continue;
            best_s = s;
            best_id = static_cast<int>(i);
            best_point = q;
            break;
        }
    }
    if (best_id < 0) {
        // Unbounded flat rays run out of t_max; hyperbolic rays reach the ideal boundary.
        return std::isfinite(limit) ? RayHit{} : capped_hit();
    }
    const double t = frame_->metric_radius(best_s);
    if (t > t_max) return capped_hit();
    if (gamma_only && !segments[best_id].gamma_member) return RayHit{};
    RayHit hit;
    hit.hit_time = t;
    hit.segment_id = best_id;
    hit.hit_point = best_point;
    return hit;
}

RayHit RayCaster::cast_march(double theta, double t_max, bool gamma_only, bool allow_retry) const {
    const DomainSpec& dom = *dom_;
    const ManifoldModel& model = dom.model();
    const GeodesicStepper stepper(model, options_.integrator);
    const double scale = std::max(dom.bounding_box().diameter(), 1e-300);
    const double floor_step = 1e-3 * scale;
    const bool poincare = model.kind() == ModelKind::poincare_disk;
    const double chart_scale = model.chart().scale();

    GeodesicState state{p_, unit_direction(model, p_, theta)};
    double t = 0.0;
    double h = kInfinity;
    while (t < t_max) {
        const double chart_speed = state.velocity.norm();
        double chart_step = std::max(0.5 * dom.chart_distance_to_boundary(state.point), floor_step);
        if (options_.integrator.max_chart_step > 0.0) chart_step = std::min(chart_step, options_.integrator.max_chart_step);
        h = std::min({h, chart_step / chart_speed, t_max - t});

        GeodesicState next;
        double err = 0.0;
        if (!stepper.try_step(state, h, next, err) || err > 1.0) {
            h *= err > 1.0 && std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
            if (h < options_.integrator.min_step) return RayHit{};  // ran into the chart boundary
            continue;
        }

        if (!dom.inside_raw(next.point)) {
            // Bisect on the inside/outside predicate between t and t + h.
            double lo = 0.0, hi = h;
            GeodesicState at_hi = next;
            while (hi - lo > kBisectionTol) {
                const double mid = 0.5 * (lo + hi);
                GeodesicState probe;
                if (!stepper.advance(state, mid, probe)) break;
                if (dom.inside_raw(probe.point)) {
                    lo = mid;
                } else {
                    hi = mid;
                    at_hi = probe;
                }
            }
            const Vec2 q = at_hi.point;
            const int id = dom.nearest_segment(q);
            const double gap = id >= 0 ? dom.segments()[id].chart_distance(q) : kInfinity;
            const bool ambiguous = hi - lo > kBisectionTol || gap > 1e-8 * std::max(1.0, scale) ||
                                   std::any_of(dom.vertices().begin(), dom.vertices().end(),
                                               [&](const Vertex& v) { return (v.point - q).norm() < 1e-9 * scale; });
            if (ambiguous && allow_retry) {
                RayHit retry = cast_march(theta + kRetryPerturbation, t_max, gamma_only, false);
                retry.perturbed = true;
                return retry;
            }
            if (gamma_only && (id < 0 || !dom.segments()[id].gamma_member)) return RayHit{};
            RayHit hit;
            hit.hit_time = t + hi;
            hit.segment_id = id;
            hit.hit_point = q;
            return hit;
        }

        t += h;
        state = stepper.normalized(next);
        if (err > 0.0 && std::isfinite(err)) h *= std::min(5.0, 0.9 * std::pow(err, -0.2));
        else h *= 5.0;

        if (poincare && state.point.norm() > kPoincareEdge) return RayHit{};
        for (const Vertex& v : dom.vertices())
            if (v.ideal && (state.point - v.point).norm() < kCuspCutoff * chart_scale) return RayHit{};
        if (!poincare && model.chart().kind != Chart::Kind::plane &&
            model.chart().boundary_distance(state.point) < 1e-12 * chart_scale)
            return RayHit{};
    }
    return capped_hit();
}

RayHit hitting_radius(const DomainSpec& dom, Vec2 p, double theta, double t_max, bool gamma_only,
                      CastOptions options) {
    return RayCaster(dom, p, options).two_sided(theta, t_max, gamma_only);
}

}  // namespace hardyscope

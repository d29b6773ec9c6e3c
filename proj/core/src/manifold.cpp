#include "hardyscope/manifold.hpp"

#include <array>
#include <cmath>

#include "hardyscope/errors.hpp"

namespace hardyscope {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::euclidean: return "euclidean";
        case ModelKind::poincare_disk: return "poincare_disk";
        case ModelKind::custom_conformal: return "custom_conformal";
    }
    return "unknown";
}

bool Chart::contains(Vec2 p) const {
    switch (kind) {
        case Kind::plane: return std::isfinite(p.x) && std::isfinite(p.y);
        case Kind::disk: return p.norm2() < radius * radius;
        case Kind::box: return p.x > box.xmin && p.x < box.xmax && p.y > box.ymin && p.y < box.ymax;
    }
    return false;
}

double Chart::boundary_distance(Vec2 p) const {
    switch (kind) {
        case Kind::plane: return kInfinity;
        case Kind::disk: return radius - p.norm();
        case Kind::box:
            return std::min({p.x - box.xmin, box.xmax - p.x, p.y - box.ymin, box.ymax - p.y});
    }
    return 0.0;
}

double Chart::scale() const {
    switch (kind) {
        case Kind::plane: return 1.0;
        case Kind::disk: return radius;
        case Kind::box: return std::min(box.width(), box.height());
    }
    return 1.0;
}

ManifoldModel ManifoldModel::euclidean() {
    ManifoldModel m;
    m.kind_ = ModelKind::euclidean;
    return m;
}

ManifoldModel ManifoldModel::poincare_disk(double b) {
    if (!(b > 0.0)) throw PreconditionError("poincare_disk: curvature magnitude must be positive");
    ManifoldModel m;
    m.kind_ = ModelKind::poincare_disk;
    m.b_ = b;
    m.chart_ = Chart::disk(1.0);
    m.lambda_source_ = "(2/sqrt(" + std::to_string(b) + "))/(1-x^2-y^2)";
    return m;
}

ManifoldModel ManifoldModel::custom_conformal(const std::string& lambda_expression, Chart chart) {
    ManifoldModel m;
    m.kind_ = ModelKind::custom_conformal;
    m.chart_ = chart;
    m.lambda_source_ = lambda_expression;
    m.lambda_expr_ = std::make_shared<const Expression>(Expression::parse(lambda_expression, {"x", "y"}));
    return m;
}

double ManifoldModel::lambda(Vec2 p) const {
    switch (kind_) {
        case ModelKind::euclidean: return 1.0;
        case ModelKind::poincare_disk: return (2.0 / std::sqrt(b_)) / (1.0 - p.norm2());
        case ModelKind::custom_conformal: return (*lambda_expr_)(p.x, p.y);
    }
    return 1.0;
}

Vec2 ManifoldModel::grad_log_lambda(Vec2 p) const {
    switch (kind_) {
        case ModelKind::euclidean: return {};
        case ModelKind::poincare_disk: return p * (2.0 / (1.0 - p.norm2()));
        case ModelKind::custom_conformal: {
            constexpr double h = 1e-6;
            const auto log_l = [&](double x, double y) { return std::log((*lambda_expr_)(x, y)); };
            return {(log_l(p.x + h, p.y) - log_l(p.x - h, p.y)) / (2.0 * h),
                    (log_l(p.x, p.y + h) - log_l(p.x, p.y - h)) / (2.0 * h)};
        }
    }
    return {};
}

double ManifoldModel::distance(Vec2 p, Vec2 q) const {
    switch (kind_) {
        case ModelKind::euclidean: return (p - q).norm();
        case ModelKind::poincare_disk: {
            const std::complex<double> zp = p.as_complex();
            const std::complex<double> zq = q.as_complex();
            const double s = std::abs(zp - zq) / std::abs(1.0 - std::conj(zp) * zq);
            return (2.0 / std::sqrt(b_)) * std::atanh(std::min(s, 1.0));
        }
        case ModelKind::custom_conformal: break;
    }
    throw PreconditionError("distance: no closed form for custom conformal models");
}

double conformal_factor(const ManifoldModel& model, Vec2 p) {
    if (!model.in_chart(p)) throw DomainError("conformal_factor: point outside chart");
    return model.lambda(p);
}

double curvature(const ManifoldModel& model, Vec2 p, double h_rel) {
    if (!model.in_chart(p)) throw DomainError("curvature: point outside chart");
    const double h = h_rel * model.chart().scale();
    if (model.chart().boundary_distance(p) < 2.0 * h)
        throw StencilError("curvature: stencil reaches the chart boundary");
    const auto log_l = [&](double x, double y) { return std::log(model.lambda({x, y})); };
    const double c = log_l(p.x, p.y);
    const double lap = (log_l(p.x + h, p.y) + log_l(p.x - h, p.y) + log_l(p.x, p.y + h) + log_l(p.x, p.y - h) - 4.0 * c) /
                       (h * h);
    const double l = model.lambda(p);
    return -lap / (l * l);
}

Vec2 unit_direction(const ManifoldModel& model, Vec2 p, double theta) {
    const double l = conformal_factor(model, p);
    return Vec2::polar(1.0 / l, theta);
}

double metric_norm(const ManifoldModel& model, Vec2 p, Vec2 v) { return model.lambda(p) * v.norm(); }

// ---------------------------------------------------------------------------

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Deriv {
    Vec2 dx;
    Vec2 dv;
};

}  // namespace

GeodesicStepper::GeodesicStepper(const ManifoldModel& model, IntegratorSettings settings)
    : model_(&model), settings_(settings) {}

Vec2 GeodesicStepper::acceleration(Vec2 x, Vec2 v) const {
    const Vec2 g = model_->grad_log_lambda(x);
    return v * (-2.0 * dot(g, v)) + g * v.norm2();
}

GeodesicState GeodesicStepper::normalized(GeodesicState s) const {
    const double speed = model_->lambda(s.point) * s.velocity.norm();
    if (speed > 0.0 && std::isfinite(speed)) s.velocity = s.velocity / speed;
    return s;
}

bool GeodesicStepper::try_step(const GeodesicState& s, double h, GeodesicState& out, double& error_norm) const {
    const ManifoldModel& m = *model_;
    std::array<Deriv, 7> k;
    auto eval = [&](Vec2 x, Vec2 v, Deriv& d) {
        if (!m.in_chart(x)) return false;
        d.dx = v;
        d.dv = acceleration(x, v);
        return std::isfinite(d.dv.x) && std::isfinite(d.dv.y);
    };
    const Vec2 x0 = s.point, v0 = s.velocity;
    if (!eval(x0, v0, k[0])) return false;
    if (!eval(x0 + h * (a21 * k[0].dx), v0 + h * (a21 * k[0].dv), k[1])) return false;
    if (!eval(x0 + h * (a31 * k[0].dx + a32 * k[1].dx), v0 + h * (a31 * k[0].dv + a32 * k[1].dv), k[2])) return false;
    if (!eval(x0 + h * (a41 * k[0].dx + a42 * k[1].dx + a43 * k[2].dx),
              v0 + h * (a41 * k[0].dv + a42 * k[1].dv + a43 * k[2].dv), k[3]))
        return false;
    if (!eval(x0 + h * (a51 * k[0].dx + a52 * k[1].dx + a53 * k[2].dx + a54 * k[3].dx),
              v0 + h * (a51 * k[0].dv + a52 * k[1].dv + a53 * k[2].dv + a54 * k[3].dv), k[4]))
        return false;
    if (!eval(x0 + h * (a61 * k[0].dx + a62 * k[1].dx + a63 * k[2].dx + a64 * k[3].dx + a65 * k[4].dx),
              v0 + h * (a61 * k[0].dv + a62 * k[1].dv + a63 * k[2].dv + a64 * k[3].dv + a65 * k[4].dv), k[5]))
        return false;
    const Vec2 x1 = x0 + h * (b1 * k[0].dx + b3 * k[2].dx + b4 * k[3].dx + b5 * k[4].dx + b6 * k[5].dx);
    const Vec2 v1 = v0 + h * (b1 * k[0].dv + b3 * k[2].dv + b4 * k[3].dv + b5 * k[4].dv + b6 * k[5].dv);
    if (!eval(x1, v1, k[6])) return false;

    const Vec2 ex = h * (e1 * k[0].dx + e3 * k[2].dx + e4 * k[3].dx + e5 * k[4].dx + e6 * k[5].dx + e7 * k[6].dx);
    const Vec2 ev = h * (e1 * k[0].dv + e3 * k[2].dv + e4 * k[3].dv + e5 * k[4].dv + e6 * k[5].dv + e7 * k[6].dv);
    const auto scaled = [&](double err, double a, double b) {
        return std::abs(err) / (settings_.atol + settings_.rtol * std::max(std::abs(a), std::abs(b)));
    };
    error_norm = std::max({scaled(ex.x, x0.x, x1.x), scaled(ex.y, x0.y, x1.y), scaled(ev.x, v0.x, v1.x),
                           scaled(ev.y, v0.y, v1.y)});
    out = {x1, v1};
    return std::isfinite(error_norm);
}

bool GeodesicStepper::advance(const GeodesicState& s, double h, GeodesicState& out) const {
    GeodesicState cur = s;
    double remaining = h;
    double step = h;
    int guard = 0;
    while (remaining > 0.0) {
        if (++guard > 100000) return false;
        step = std::min(step, remaining);
        GeodesicState next;
        double err = 0.0;
        if (!try_step(cur, step, next, err)) {
            step *= 0.5;
            if (step < settings_.min_step) return false;
            continue;
        }
        if (err <= 1.0) {
            cur = normalized(next);
            remaining -= step;
            step *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
        } else {
            step *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            if (step < settings_.min_step) return false;
        }
    }
    out = cur;
    return true;
}

GeodesicPath trace_geodesic(const ManifoldModel& model, Vec2 p, Vec2 v, double t_max, double step,
                            IntegratorSettings settings) {
    if (!model.in_chart(p)) throw DomainError("trace_geodesic: start point outside chart");
    if (!(t_max > 0.0)) throw PreconditionError("trace_geodesic: t_max must be positive");
    if (std::abs(metric_norm(model, p, v) - 1.0) > 1e-8)
        throw PreconditionError("trace_geodesic: initial vector is not of unit metric length");

    GeodesicStepper stepper(model, settings);
    GeodesicPath path;
    path.t_max = t_max;
    GeodesicState state{p, v};
    double t = 0.0;
    path.samples.push_back({0.0, p, v});
    double h = step > 0.0 ? step : 1e-2;

    const bool poincare = model.kind() == ModelKind::poincare_disk;
    while (t < t_max) {
        double trial = std::min(h, t_max - t);
        if (settings.max_chart_step > 0.0) {
            const double chart_speed = state.velocity.norm();
            if (chart_speed * trial > settings.max_chart_step) trial = settings.max_chart_step / chart_speed;
        }
        GeodesicState next;
        double err = 0.0;
        if (!stepper.try_step(state, trial, next, err)) {
            h = 0.5 * trial;
            if (h < settings.min_step) {
                path.terminated_early = true;
                break;
            }
            continue;
        }
        if (err > 1.0) {
            h = trial * std::max(0.1, 0.9 * std::pow(err, -0.2));
            if (h < settings.min_step) {
                path.terminated_early = true;
                break;
            }
            continue;
        }
        state = stepper.normalized(next);
        t += trial;
        path.samples.push_back({t, state.point, state.velocity});
        h = trial * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
        if (poincare && state.point.norm() > 1.0 - 1e-12) {
            path.terminated_early = true;
            break;
        }
    }
    return path;
}

// ---------------------------------------------------------------------------

GeodesicFrame::GeodesicFrame(const ManifoldModel& model, Vec2 base) : base_(base), p_(base.as_complex()) {
    switch (model.kind()) {
        case ModelKind::euclidean: hyperbolic_ = false; break;
        case ModelKind::poincare_disk:
            hyperbolic_ = true;
            sqrt_b_ = std::sqrt(model.curvature_magnitude());
            break;
        case ModelKind::custom_conformal:
            throw PreconditionError("GeodesicFrame: custom conformal models have no closed-form geodesics");
    }
}

std::complex<double> GeodesicFrame::to_frame(Vec2 z) const {
    const std::complex<double> w = z.as_complex();
    if (!hyperbolic_) return w - p_;
    return (w - p_) / (1.0 - std::conj(p_) * w);
}

Vec2 GeodesicFrame::from_frame(std::complex<double> w) const {
    if (!hyperbolic_) return Vec2::from_complex(w + p_);
    return Vec2::from_complex((w + p_) / (1.0 + std::conj(p_) * w));
}

GeneralizedCircle GeodesicFrame::transform(const GeneralizedCircle& g) const {
    return hyperbolic_ ? g.mobius_recentered(p_) : g.translated(p_);
}

double GeodesicFrame::metric_radius(double s) const {
    if (!hyperbolic_) return s;
    if (s >= 1.0) return kInfinity;
    return (2.0 / sqrt_b_) * std::atanh(s);
}

double GeodesicFrame::frame_radius(double t) const {
    if (!hyperbolic_) return t;
    return std::tanh(0.5 * sqrt_b_ * t);
}

Vec2 GeodesicFrame::point_at(double theta, double t) const {
    return from_frame(std::polar(frame_radius(t), theta));
}

Vec2 GeodesicFrame::velocity_at(double theta, double t) const {
    const std::complex<double> u = std::polar(1.0, theta);
    if (!hyperbolic_) return Vec2::from_complex(u);
    const double rho = frame_radius(t);
    const double drho = 0.5 * sqrt_b_ * (1.0 - rho * rho);
    const std::complex<double> w = rho * u;
    const std::complex<double> den = 1.0 + std::conj(p_) * w;
    const std::complex<double> dz = (1.0 - std::norm(p_)) / (den * den);
    return Vec2::from_complex(dz * drho * u);
}

}  // namespace hardyscope

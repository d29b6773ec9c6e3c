#include "hardyscope/hardy.hpp"

#include <algorithm>
#include <cmath>

#include "hardyscope/errors.hpp"
#include "hardyscope/parallel.hpp"

namespace hardyscope {

DirectionQuadrature DirectionQuadrature::make(int n_dirs, double t_max) {
    DirectionQuadrature q;
    q.n_dirs = n_dirs;
    q.offset = kPi / (2.0 * n_dirs);
    q.t_max = t_max;
    q.validate();
    return q;
}

DirectionQuadrature DirectionQuadrature::for_domain(const DomainSpec& dom, int n_dirs) {
    return make(n_dirs, default_t_max(dom));
}

void DirectionQuadrature::validate() const {
    if (n_dirs < 16) throw PreconditionError("direction quadrature: n_dirs must be at least 16");
    if (!(t_max > 0.0)) throw PreconditionError("direction quadrature: t_max must be positive");
}

WeightSample weight_sample(const DomainSpec& dom, Vec2 p, const DirectionQuadrature& quad, bool gamma_only,
                           CastOptions options) {
    quad.validate();
    const RayCaster caster(dom, p, options);
    const int n = quad.n_dirs;
    std::vector<RayHit> two(n);
    if (n % 2 == 0) {
        // theta_k + pi is theta_{k + n/2}, so one forward cast per direction suffices.
        std::vector<RayHit> fwd(n);
        for (int k = 0; k < n; ++k) fwd[k] = caster.cast(quad.angle(k), quad.t_max, gamma_only);
        for (int k = 0; k < n; ++k) {
            const RayHit& a = fwd[k];
            const RayHit& b = fwd[(k + n / 2) % n];
            two[k] = b.hit_time < a.hit_time ? b : a;
            if (two[k].infinite()) two[k].capped = a.capped || b.capped;
            two[k].perturbed = a.perturbed || b.perturbed;
        }
    } else {
        for (int k = 0; k < n; ++k) two[k] = caster.two_sided(quad.angle(k), quad.t_max, gamma_only);
    }

    WeightSample w;
    double sum = 0.0, sum_half = 0.0;
    int n_half = 0, capped = 0, finite = 0;
    for (int k = 0; k < n; ++k) {
        const RayHit& r = two[k];
        const double inv = r.infinite() ? 0.0 : 1.0 / (r.hit_time * r.hit_time);
        sum += inv;
        if (k % 2 == 0) {
            sum_half += inv;
            ++n_half;
        }
        if (r.infinite() && r.capped) ++capped;
        if (!r.infinite()) ++finite;
        if (r.perturbed) w.flags |= weight_perturbed;
    }
    w.inv_m2 = sum / n;
    w.inv_m2_half = sum_half / n_half;
    w.capped_fraction = double(capped) / n;
    w.m = finite > 0 ? 1.0 / std::sqrt(w.inv_m2) : kInfinity;
    if (capped > 0) w.flags |= weight_capped;
    if (finite == 0) w.flags |= weight_infinite;
    return w;
}

double mean_hitting_weight(const DomainSpec& dom, Vec2 p, const DirectionQuadrature& quad, bool gamma_only) {
    return weight_sample(dom, p, quad, gamma_only).m;
}

WeightField weight_field(const DomainSpec& dom, double h, const DirectionQuadrature& quad, bool gamma_only) {
    if (!(h > 0.0)) throw PreconditionError("weight_field: h must be positive");
    quad.validate();
    WeightField field;
    field.box = dom.bounding_box();
    field.h = h;
    field.nx = static_cast<int>(std::floor(field.box.width() / h + 1e-9)) + 1;
    field.ny = static_cast<int>(std::floor(field.box.height() / h + 1e-9)) + 1;
    field.gamma_restricted = gamma_only;
    field.quad = quad;
    field.index.assign(static_cast<std::size_t>(field.nx) * field.ny, -1);
    for (int j = 0; j < field.ny; ++j) {
        for (int i = 0; i < field.nx; ++i) {
            const Vec2 p = field.node_point(i, j);
            if (!contains(dom, p)) continue;
            field.index[static_cast<std::size_t>(j) * field.nx + i] = static_cast<int>(field.nodes.size());
            field.nodes.push_back({i, j, p, 0.0, {}});
        }
    }
    if (field.nodes.empty()) throw PreconditionError("weight_field: grid has no interior nodes");
    parallel_for(field.nodes.size(), [&](std::size_t k) {
        WeightNode& node = field.nodes[k];
        node.d = boundary_distance(dom, node.p);
        node.w = weight_sample(dom, node.p, quad, gamma_only);
    });
    return field;
}

TestFunction TestFunction::make(std::string name, const std::string& expression, const std::string& support) {
    TestFunction f;
    f.name_ = std::move(name);
    f.source_ = expression;
    f.value_ = std::make_shared<const Expression>(Expression::parse(expression, {"x", "y"}));
    if (!support.empty()) f.support_ = std::make_shared<const Expression>(Expression::parse(support, {"x", "y"}));
    return f;
}

Vec2 TestFunction::gradient(Vec2 p, double step) const {
    const double fx = raw({p.x + step, p.y}) - raw({p.x - step, p.y});
    const double fy = raw({p.x, p.y + step}) - raw({p.x, p.y - step});
    return Vec2{fx, fy} / (2.0 * step);
}

namespace {

// Midpoint rule on cells of side h over the bounding box. Cells whose corners
// disagree on membership (domain and support) are split into 8 x 8 subcells.
template <class Integrand>
double cell_integral(const DomainSpec& dom, const TestFunction& f, const Box& box, double h, Integrand&& g) {
    auto member = [&](Vec2 p) { return f.in_support(p) && contains(dom, p); };
    const int nx = std::max(1, static_cast<int>(std::ceil(box.width() / h - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil(box.height() / h - 1e-9)));
    const double inset = 1e-6 * h;
    constexpr int kSplit = 8;
    const double sub = h / kSplit;
    double total = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double x0 = box.xmin + i * h;
            const double y0 = box.ymin + j * h;
            const Vec2 c{x0 + 0.5 * h, y0 + 0.5 * h};
            const bool mc = member(c);
            const int corners = int(member({x0 + inset, y0 + inset})) + int(member({x0 + h - inset, y0 + inset})) +
                                int(member({x0 + inset, y0 + h - inset})) +
                                int(member({x0 + h - inset, y0 + h - inset}));
            if (corners == 4 && mc) {
                total += g(c) * h * h;
            } else if (corners > 0 || mc) {
                for (int b = 0; b < kSplit; ++b)
                    for (int a = 0; a < kSplit; ++a) {
                        const Vec2 q{x0 + (a + 0.5) * sub, y0 + (b + 0.5) * sub};
                        if (member(q)) total += g(q) * sub * sub;
                    }
            }
        }
    }
    return total;
}

struct LatticeSums {
    double energy = 0.0;
    double rhs = 0.0;
    double rhs_half = 0.0;
    double cap = 0.0;
    int nodes = 0;
};

LatticeSums lattice_sums(const DomainSpec& dom, const TestFunction& f, const WeightField& field, int stride) {
    LatticeSums s;
    const double cell = stride * field.h;
    const double area = cell * cell;
    const double step = 1e-3 * field.h;
    s.energy = cell_integral(dom, f, field.box, cell, [&](Vec2 p) { return f.gradient(p, step).norm2(); });
    for (const WeightNode& node : field.nodes) {
        if (node.i % stride != 0 || node.j % stride != 0) continue;
        if (!f.in_support(node.p)) continue;
        const double v = f.raw(node.p);
        const double lam = dom.model().lambda(node.p);
        const double mass = 0.5 * v * v * lam * lam * area;
        s.rhs += mass * node.w.inv_m2;
        s.rhs_half += mass * node.w.inv_m2_half;
        s.cap += mass * node.w.capped_fraction / (field.quad.t_max * field.quad.t_max);
        ++s.nodes;
    }
    return s;
}

}  // namespace

HardyReport hardy_report(const DomainSpec& dom, const TestFunction& f, const WeightField& field) {
    const double step = 1e-3 * field.h;
    // Support margin: f must be numerically zero next to the boundary (or next to Γ).
    double max_grad = 0.0;
    for (const WeightNode& node : field.nodes) {
        if (f.in_support(node.p)) max_grad = std::max(max_grad, f.gradient(node.p, step).norm());
    }
    const double margin_tol = 2.0 * field.h * max_grad;
    for (const WeightNode& node : field.nodes) {
        if (dom.chart_distance_to_boundary(node.p, field.gamma_restricted) >= field.h) continue;
        if (std::abs(f(node.p)) > margin_tol)
            throw PreconditionError("hardy_report: test function '" + f.name() + "' does not vanish near the boundary");
    }

    const LatticeSums fine = lattice_sums(dom, f, field, 1);
    const LatticeSums coarse = lattice_sums(dom, f, field, 2);

    HardyReport r;
    r.function = f.name();
    r.gamma_restricted = field.gamma_restricted;
    r.energy = fine.energy;
    r.rhs = fine.rhs;
    r.nodes_used = fine.nodes;
    r.ratio = fine.rhs > 0.0 ? fine.energy / fine.rhs : kInfinity;
    if (fine.rhs > 0.0) {
        r.angular_term = std::abs(fine.rhs - fine.rhs_half) / fine.rhs;
        r.cap_term = fine.cap / fine.rhs;
        if (coarse.rhs > 0.0 && std::isfinite(r.ratio)) {
            const double coarse_ratio = coarse.energy / coarse.rhs;
            r.grid_term = std::abs(r.ratio - coarse_ratio) / r.ratio;
        }
    }
    r.quad_error_budget = r.angular_term + r.grid_term + r.cap_term;
    return r;
}

double dirichlet_energy_metric(const DomainSpec& dom, const TestFunction& f, const WeightField& field) {
    const ManifoldModel& model = dom.model();
    const double step = 1e-3 * field.h;
    return cell_integral(dom, f, field.box, field.h, [&](Vec2 p) {
        const double lam = model.lambda(p);
        // grad_g f = lambda^-2 grad f; dmu = lambda^2 dx dy.
        const Vec2 grad_g = f.gradient(p, step) / (lam * lam);
        const double norm = metric_norm(model, p, grad_g);
        return norm * norm * lam * lam;
    });
}

WeakHardyConstants weak_hardy_constants(double alpha, double v_inf) {
    if (!(alpha > 0.0)) throw PreconditionError("weak_hardy_constants: alpha must be positive");
    if (!std::isfinite(v_inf)) throw PreconditionError("weak_hardy_constants: v_inf must be finite");
    return {std::max(0.0, -v_inf), alpha * 2.0 / 4.0, alpha, v_inf};
}

CrokeReport croke_bound(const DomainSpec& dom, const DirectionQuadrature& quad, std::span<const Vec2> samples) {
    quad.validate();
    if (samples.empty()) throw PreconditionError("croke_bound: no sample points");
    const int n = quad.n_dirs;
    std::vector<double> integrals(samples.size(), 0.0);
    std::vector<int> infinite(samples.size(), 0);
    parallel_for(samples.size(), [&](std::size_t s) {
        const RayCaster caster(dom, samples[s]);
        std::vector<double> fwd(n), bwd(n);
        for (int k = 0; k < n; ++k) fwd[k] = caster.cast(quad.angle(k), quad.t_max).hit_time;
        for (int k = 0; k < n; ++k)
            bwd[k] = n % 2 == 0 ? fwd[(k + n / 2) % n] : caster.cast(quad.angle(k) + kPi, quad.t_max).hit_time;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double l = fwd[k] + bwd[k];
            if (!std::isfinite(l)) {
                ++infinite[s];
                continue;
            }
            sum += 1.0 / (l * l);
        }
        integrals[s] = sum * kTwoPi / n;
    });

    CrokeReport report;
    report.fiber_integrals = integrals;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        report.infinite_chords += infinite[s];
        if (integrals[s] < report.bound) {
            report.bound = integrals[s];
            report.argmin = samples[s];
        }
    }
    report.flagged = report.infinite_chords > 0;
    return report;
}

std::vector<Vec2> interior_samples(const DomainSpec& dom, double h) {
    if (!(h > 0.0)) throw PreconditionError("interior_samples: h must be positive");
    const Box& box = dom.bounding_box();
    std::vector<Vec2> out;
    const int nx = static_cast<int>(std::floor(box.width() / h + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor(box.height() / h + 1e-9)) + 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 p{box.xmin + i * h, box.ymin + j * h};
            if (contains(dom, p)) out.push_back(p);
        }
    }
    return out;
}

}  // namespace hardyscope

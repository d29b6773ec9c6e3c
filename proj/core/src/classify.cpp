#include "hardyscope/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hardyscope/errors.hpp"
#include "hardyscope/parallel.hpp"

namespace hardyscope {

std::string to_string(QbVerdict v) {
    switch (v) {
        case QbVerdict::quasi_bounded: return "quasi_bounded";
        case QbVerdict::not_quasi_bounded: return "not";
        case QbVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(BdrVerdict v) { return v == BdrVerdict::regular ? "regular" : "inconclusive"; }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::discrete_spectrum_certified: return "discrete_spectrum_certified";
        case Verdict::compact_case: return "compact_case";
        case Verdict::refuted_quasi_boundedness: return "refuted_quasi_boundedness";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::optional<Box> chart_clip(const ManifoldModel& model) {
    const Chart& c = model.chart();
    switch (c.kind) {
        case Chart::Kind::plane: return std::nullopt;
        case Chart::Kind::disk: return Box{-c.radius, -c.radius, c.radius, c.radius};
        case Chart::Kind::box: return c.box;
    }
    return std::nullopt;
}

Box intersect(const Box& a, const std::optional<Box>& clip) {
    if (!clip) return a;
    return {std::max(a.xmin, clip->xmin), std::max(a.ymin, clip->ymin), std::min(a.xmax, clip->xmax),
            std::min(a.ymax, clip->ymax)};
}

struct FarPair {
    double distance = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
};

FarPair metric_diameter(const ManifoldModel& model, const std::vector<Vec2>& pts) {
    FarPair best;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = model.distance(pts[i], pts[j]);
            if (d > best.distance) best = {d, i, j};
        }
    }
    return best;
}

}  // namespace

QbReport quasibounded_probe(const DomainSpec& dom, std::span<const double> epsilons, const QbSettings& settings) {
    if (settings.n_samples < 2) throw PreconditionError("quasibounded_probe: n_samples must be at least 2");
    for (double e : epsilons)
        if (!(e > 0.0)) throw PreconditionError("quasibounded_probe: epsilons must be positive");
    const ManifoldModel& model = dom.model();
    if (!model.has_closed_form_geodesics())
        throw PreconditionError("quasibounded_probe: metric diameters need a closed-form distance");

    QbReport report;
    report.epsilons.assign(epsilons.begin(), epsilons.end());
    report.n_samples = settings.n_samples;
    report.seed = settings.seed;
    const std::optional<Box> clip = chart_clip(model);
    const Box base = intersect(dom.bounding_box(), clip);

    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const double eps = epsilons[e];
        std::mt19937_64 rng(mix_seed(settings.seed, e));
        const auto draw = [&](const Box& window, const std::optional<Box>& exclude) {
            std::uniform_real_distribution<double> ux(window.xmin, window.xmax), uy(window.ymin, window.ymax);
            std::vector<Vec2> candidates(settings.n_samples);
            for (auto& c : candidates) {
                const double x = ux(rng);
                c = {x, uy(rng)};
            }
            std::vector<char> keep(candidates.size(), 0);
            parallel_for(candidates.size(), [&](std::size_t i) {
                const Vec2 c = candidates[i];
                if (exclude && exclude->contains(c)) return;
                if (!contains(dom, c)) return;
                keep[i] = boundary_distance(dom, c) >= eps;
            });
            std::vector<Vec2> out;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                if (keep[i]) out.push_back(candidates[i]);
            return out;
        };

        QbEntry entry;
        entry.epsilon = eps;
        std::vector<Vec2> accepted = draw(base, std::nullopt);
        entry.diameter = metric_diameter(model, accepted).distance;
        const std::vector<Vec2> more = draw(base, std::nullopt);
        accepted.insert(accepted.end(), more.begin(), more.end());
        if (accepted.empty()) {
            entry.note = "empty sample of the deep set; epsilon skipped";
            report.entries.push_back(entry);
            continue;
        }
        FarPair far = metric_diameter(model, accepted);
        entry.diameter_doubled = far.distance;
        const auto agree = [&] {
            return std::abs(entry.diameter_doubled - entry.diameter) <=
                   settings.stability_tolerance * std::max(entry.diameter_doubled, 1e-300);
        };
        entry.stable = agree();
        // Keep doubling the draw count until consecutive estimates agree.
        for (int round = 0; round < settings.max_stability_doublings && !entry.stable; ++round) {
            const std::size_t have = accepted.size();
            while (accepted.size() < 2 * have) {
                const std::vector<Vec2> extra = draw(base, std::nullopt);
                if (extra.empty()) break;
                accepted.insert(accepted.end(), extra.begin(), extra.end());
            }
            entry.diameter = entry.diameter_doubled;
            far = metric_diameter(model, accepted);
            entry.diameter_doubled = far.distance;
            entry.stable = agree();
        }
        entry.accepted = static_cast<int>(accepted.size());
        const double initial = entry.diameter_doubled;

        Box previous = base;
        for (int j = 1; j <= settings.max_window_doublings; ++j) {
            const Box window = intersect(base.scaled(std::ldexp(1.0, j)), clip);
            if (window.xmin == previous.xmin && window.xmax == previous.xmax && window.ymin == previous.ymin &&
                window.ymax == previous.ymax) {
                entry.bounded = true;
                break;
            }
            const std::vector<Vec2> fresh = draw(window, previous);
            previous = window;
            if (fresh.empty()) {
                entry.bounded = true;
                break;
            }
            accepted.insert(accepted.end(), fresh.begin(), fresh.end());
            far = metric_diameter(model, accepted);
            entry.window_diameters.push_back(far.distance);
            if (far.distance > settings.witness_factor * initial) {
                entry.witness = true;
                entry.witness_pair = std::make_pair(accepted[far.i], accepted[far.j]);
                break;
            }
        }
        entry.accepted = static_cast<int>(accepted.size());
        if (!entry.bounded && !entry.witness) entry.note = "deep points keep appearing in every grown window";
        report.entries.push_back(entry);
    }

    bool any = false, all_good = true, refuted = false;
    for (const QbEntry& entry : report.entries) {
        if (entry.accepted == 0) continue;
        any = true;
        report.diam_estimates.push_back(entry.window_diameters.empty() ? entry.diameter_doubled
                                                                       : entry.window_diameters.back());
        refuted = refuted || entry.witness;
        all_good = all_good && entry.bounded && entry.stable;
    }
    if (refuted) report.verdict = QbVerdict::not_quasi_bounded;
    else if (any && all_good) report.verdict = QbVerdict::quasi_bounded;
    else report.verdict = QbVerdict::inconclusive;
    return report;
}

std::vector<CuspPath> default_cusp_paths(const DomainSpec& dom, Vec2 from, int levels) {
    const Chart& chart = dom.model().chart();
    if (chart.kind != Chart::Kind::disk || std::abs(chart.radius - 1.0) > 1e-12)
        throw PreconditionError("cusp paths: ideal vertices need the unit-disk chart");
    const std::complex<double> p = from.as_complex();
    std::vector<CuspPath> paths;
    for (std::size_t v = 0; v < dom.vertices().size(); ++v) {
        const Vertex& vertex = dom.vertices()[v];
        if (!vertex.ideal) continue;
        const std::complex<double> target = vertex.point.as_complex();
        // In the frame centred at `from` the geodesic to the vertex is the ray towards u.
        const std::complex<double> u = (target - p) / (1.0 - std::conj(p) * target);
        const auto at = [&](double s) { return Vec2::from_complex((s * u + p) / (1.0 + std::conj(p) * s * u)); };
        CuspPath path;
        path.vertex = static_cast<int>(v);
        for (int j = 1; j <= levels; ++j) {
            const double delta = std::ldexp(1.0, -j);
            if ((from - vertex.point).norm() <= delta) continue;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((at(mid) - vertex.point).norm() > delta ? lo : hi) = mid;
            }
            const Vec2 q = at(lo);
            if (contains(dom, q)) path.points.push_back(q);
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

bool envelope_bounded(std::span<const double> ratios, double envelope) {
    for (double r : ratios)
        if (!std::isfinite(r)) return false;
    const std::size_t n = ratios.size();
    if (n < 4) return true;
    const std::size_t tail = n - n / 4;
    const double running = *std::max_element(ratios.begin(), ratios.begin() + tail);
    const double last = *std::max_element(ratios.begin() + tail, ratios.end());
    return last <= envelope * running;
}

BdrReport bdr_estimate(const DomainSpec& dom, const WeightField& field, std::span<const CuspPath> cusp_paths) {
    if (field.gamma_restricted) throw PreconditionError("bdr_estimate: needs a full-boundary weight field");
    BdrReport report;
    for (const WeightNode& node : field.nodes) {
        if (!std::isfinite(node.w.m)) {
            ++report.excluded_infinite;
            continue;
        }
        ++report.nodes_used;
        const double ratio = node.w.m / node.d;
        if (ratio > report.c_estimate) {
            report.c_estimate = ratio;
            report.argmax = node.p;
        }
    }
    bool all_bounded = true;
    for (const CuspPath& path : cusp_paths) {
        CuspSequence seq;
        seq.vertex = path.vertex;
        seq.points = path.points;
        seq.ratios.resize(path.points.size());
        parallel_for(path.points.size(), [&](std::size_t i) {
            const Vec2 q = path.points[i];
            seq.ratios[i] = weight_sample(dom, q, field.quad).m / boundary_distance(dom, q);
        });
        seq.bounded = !seq.ratios.empty() && envelope_bounded(seq.ratios);
        all_bounded = all_bounded && seq.bounded;
        report.cusp_sequences.push_back(std::move(seq));
    }
    const bool field_ok = report.nodes_used > 0 && std::isfinite(report.c_estimate);
    report.verdict = field_ok && all_bounded ? BdrVerdict::regular : BdrVerdict::inconclusive;
    return report;
}

UicResult uic_check(const DomainSpec& dom, Vec2 p, double c0, const DirectionQuadrature& quad) {
    if (!(c0 > 1.0)) throw PreconditionError("uic_check: c0 must exceed 1");
    quad.validate();
    UicResult result;
    result.d = boundary_distance(dom, p);
    const RayCaster caster(dom, p);
    const auto hit = [&](double theta) { return caster.cast(theta, quad.t_max).hit_time; };

    const int n = quad.n_dirs;
    const double dtheta = kTwoPi / n;
    std::vector<double> fwd(n);
    int k_star = 0;
    for (int k = 0; k < n; ++k) {
        fwd[k] = hit(quad.angle(k));
        if (fwd[k] < fwd[k_star]) k_star = k;
    }
    // Golden-section refinement of the nearest-boundary direction.
    {
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = quad.angle(k_star) - dtheta, hi = quad.angle(k_star) + dtheta;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = hit(x1), f2 = hit(x2);
        while (hi - lo > 1e-12) {
            if (f1 < f2) {
                hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = hit(x1);
            } else {
                lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = hit(x2);
            }
        }
        result.theta_star = 0.5 * (lo + hi);
    }
    const double bound = c0 * result.d;
    const auto passes = [&](double beta) {
        return hit(result.theta_star + beta) < bound && hit(result.theta_star - beta) < bound;
    };
    if (!passes(0.0)) return result;

    int m_fail = -1;
    for (int m = 1; m <= n / 2; ++m) {
        if (!passes(m * dtheta)) {
            m_fail = m;
            break;
        }
    }
    if (m_fail < 0) {
        result.alpha = kTwoPi;
        return result;
    }
    double lo = (m_fail - 1) * dtheta, hi = m_fail * dtheta;
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    result.alpha = 2.0 * lo;
    return result;
}

bool ueb_check(const DomainSpec& dom, Vec2 q, double k, std::span<const double> probe_radii,
               const UebSettings& settings) {
    if (!(k > 0.0)) throw PreconditionError("ueb_check: k must be positive");
    const ManifoldModel& model = dom.model();
    if (!model.has_closed_form_geodesics()) throw PreconditionError("ueb_check: metric balls need a closed form");
    const double scale = std::max(1.0, dom.bounding_box().diameter());
    for (const Vertex& v : dom.vertices())
        if ((v.point - q).norm() < 1e-6 * scale) throw PreconditionError("ueb_check: boundary point is a vertex");
    const int id = dom.nearest_segment(q);
    if (id < 0 || dom.segments()[id].chart_distance(q) > 1e-9 * scale)
        throw PreconditionError("ueb_check: point is not on the boundary");
    const BoundarySegment& seg = dom.segments()[id];
    const auto s = seg.locate(q, 1e-9 * scale);
    if (!s) throw PreconditionError("ueb_check: point is not on the boundary");
    const bool closed = seg.kind == SegmentKind::arc && std::abs(std::abs(seg.sweep) - kTwoPi) < 1e-12;
    if (seg.bounded() && !closed && (*s < 1e-9 || *s > 1.0 - 1e-9))
        throw PreconditionError("ueb_check: boundary point is a segment endpoint");
    const Vec2 outward = -seg.inward_normal(*s);

    for (double r : probe_radii) {
        if (!(r > 0.0)) continue;
        const Vec2 c = q + outward * r;
        if (!model.in_chart(c)) continue;
        const double radius = k * model.distance(q, c);
        Vec2 center = c;
        double chart_radius = radius;
        if (model.kind() == ModelKind::poincare_disk) {
            const double rho = std::tanh(0.5 * std::sqrt(model.curvature_magnitude()) * radius);
            const double c2 = c.norm2();
            const double den = 1.0 - rho * rho * c2;
            center = c * ((1.0 - rho * rho) / den);
            chart_radius = rho * (1.0 - c2) / den;
        }
        chart_radius *= 1.0 - 1e-9;
        bool misses = !contains(dom, center);
        for (int i = 1; i <= settings.rings && misses; ++i) {
            const double rr = chart_radius * i / settings.rings;
            for (int j = 0; j < settings.per_ring && misses; ++j) {
                const Vec2 x = center + Vec2::polar(rr, kTwoPi * (j + 0.5 * (i % 2)) / settings.per_ring);
                if (model.in_chart(x) && contains(dom, x)) misses = false;
            }
        }
        if (misses) return true;
    }
    return false;
}

bool is_compact_case(const DomainSpec& dom) {
    if (dom.unbounded() || dom.has_ideal_vertices()) return false;
    const Chart& chart = dom.model().chart();
    const double tol = 1e-9 * chart.scale();
    for (const BoundarySegment& s : dom.segments()) {
        for (int i = 0; i <= 64; ++i) {
            const Vec2 q = s.point_at(i / 64.0);
            if (!chart.contains(q) || chart.boundary_distance(q) <= tol) return false;
        }
    }
    return true;
}

Verdict combine_verdict(bool compact, std::optional<QbVerdict> qb, std::optional<BdrVerdict> bdr) {
    if (compact) return Verdict::compact_case;
    if (qb == QbVerdict::not_quasi_bounded) return Verdict::refuted_quasi_boundedness;
    if (qb == QbVerdict::quasi_bounded && bdr == BdrVerdict::regular) return Verdict::discrete_spectrum_certified;
    return Verdict::inconclusive;
}

Certificate classify_domain(const DomainSpec& dom, const ClassifySettings& settings) {
    Certificate cert;
    cert.domain = dom.name();
    cert.seed = settings.qb.seed;
    if (dom.model().curvature_bounded_below())
        cert.notes.push_back(
            "curvature is bounded below: quasi-boundedness is also necessary for purely discrete spectrum");

    if (is_compact_case(dom)) {
        cert.notes.push_back("bounded closure inside the chart with no ideal vertices; probes skipped");
        cert.verdict = combine_verdict(true, std::nullopt, std::nullopt);
        return cert;
    }

    try {
        cert.qb = quasibounded_probe(dom, settings.epsilons, settings.qb);
    } catch (const Error& e) {
        cert.notes.push_back(std::string("quasi-boundedness probe: ") + e.what());
    }

    try {
        const DirectionQuadrature quad = DirectionQuadrature::for_domain(dom, settings.n_dirs);
        const WeightField field = weight_field(dom, settings.field_h, quad);

        std::vector<CuspPath> paths;
        if (dom.has_ideal_vertices()) {
            const auto deepest = std::max_element(field.nodes.begin(), field.nodes.end(),
                                                  [](const WeightNode& a, const WeightNode& b) { return a.d < b.d; });
            paths = default_cusp_paths(dom, deepest->p, settings.cusp_levels);
        }
        cert.bdr = bdr_estimate(dom, field, paths);

        UicSummary uic;
        uic.c0 = settings.c0;
        uic.alpha_min = kInfinity;
        const std::size_t count = std::min<std::size_t>(settings.uic_points, field.nodes.size());
        std::vector<double> alphas(count);
        parallel_for(count, [&](std::size_t i) {
            const WeightNode& node = field.nodes[i * field.nodes.size() / count];
            alphas[i] = uic_check(dom, node.p, settings.c0, quad).alpha;
        });
        for (double a : alphas) uic.alpha_min = std::min(uic.alpha_min, a);
        uic.points = static_cast<int>(count);
        if (count == 0) uic.alpha_min = 0.0;
        cert.uic = uic;
    } catch (const Error& e) {
        cert.notes.push_back(std::string("weight field probes: ") + e.what());
    }

    try {
        UebSummary ueb;
        ueb.k = settings.ueb_k;
        int passed = 0;
        const double span = 0.25 * dom.bounding_box().diameter();
        for (const BoundarySegment& seg : dom.segments()) {
            for (int i = 0; i < settings.ueb_points_per_segment; ++i) {
                const double s = (i + 0.5) / settings.ueb_points_per_segment;
                const Vec2 q = seg.bounded() ? seg.point_at(s) : seg.point_at((2.0 * s - 1.0) * span);
                try {
                    passed += ueb_check(dom, q, settings.ueb_k, settings.ueb_probe_radii) ? 1 : 0;
                    ++ueb.points;
                } catch (const PreconditionError&) {
                    // Points that coincide with vertices are not probed.
                }
            }
        }
        ueb.pass_fraction = ueb.points > 0 ? double(passed) / ueb.points : 0.0;
        cert.ueb = ueb;
    } catch (const Error& e) {
        cert.notes.push_back(std::string("exterior ball probe: ") + e.what());
    }

    cert.verdict = combine_verdict(false, cert.qb ? std::optional(cert.qb->verdict) : std::nullopt,
                                   cert.bdr ? std::optional(cert.bdr->verdict) : std::nullopt);
    return cert;
}

}  // namespace hardyscope

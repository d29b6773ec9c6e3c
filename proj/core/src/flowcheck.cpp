#include "hardyscope/flowcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>

#include "hardyscope/errors.hpp"
#include "hardyscope/expr.hpp"
#include "hardyscope/parallel.hpp"

namespace hardyscope {

namespace {

constexpr int kGaussPoints = 20;
constexpr long long kBatch = 8192;
constexpr int kLengthPanels = 256;

struct GaussRule {
    std::array<double, kGaussPoints> x{};
    std::array<double, kGaussPoints> w{};
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
GaussRule make_gauss_rule() {
    GaussRule rule;
    const int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.x[i] = x;
        rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule() {
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double metric_speed(const ManifoldModel& model, const BoundarySegment& seg, double s) {
    return model.lambda(seg.point_at(s)) * seg.tangent_at(s).norm();
}

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    long long count = 0;
    long long infinite = 0;
};

}  // namespace

TangentIntegrand TangentIntegrand::constant(double c) {
    return {"constant", [c](Vec2, double) { return c; }};
}

TangentIntegrand TangentIntegrand::basepoint(const std::string& expression) {
    auto e = std::make_shared<const Expression>(Expression::parse(expression, {"x", "y"}));
    return {expression, [e](Vec2 p, double) { return (*e)(p.x, p.y); }};
}

double SantaloReport::combined_stderr() const { return std::hypot(stderr_lhs, stderr_rhs); }

double SantaloReport::z_score() const { return std::abs(lhs - rhs) / combined_stderr(); }

BoundaryFiberSampler::BoundaryFiberSampler(const DomainSpec& dom) : dom_(&dom) {
    if (dom.unbounded() || dom.has_ideal_vertices())
        throw PreconditionError("santalo: the domain must be compact");
    if (!dom.analytic()) throw PreconditionError("santalo: closed-form geodesics and boundary curves required");
    const ManifoldModel& model = dom.model();
    const GaussRule& g = gauss_rule();
    for (const BoundarySegment& seg : dom.segments()) {
        double length = 0.0;
        double peak = 0.0;
        for (int panel = 0; panel < kLengthPanels; ++panel) {
            const double a = double(panel) / kLengthPanels;
            const double half = 0.5 / kLengthPanels;
            for (int i = 0; i < kGaussPoints; ++i) {
                const double v = metric_speed(model, seg, a + half * (1.0 + g.x[i]));
                length += g.w[i] * half * v;
                peak = std::max(peak, v);
            }
        }
        for (int i = 0; i <= 16 * kLengthPanels; ++i)
            peak = std::max(peak, metric_speed(model, seg, double(i) / (16 * kLengthPanels)));
        total_length_ += length;
        cumulative_.push_back(total_length_);
        density_max_.push_back(peak * (1.0 + 1e-3));
    }
}

BoundaryFiberSample BoundaryFiberSampler::make_sample(double segment_pick, double s_uniform, double accept,
                                                      double phi_uniform, bool& accepted) const {
    const double target = segment_pick * total_length_;
    const std::size_t idx = std::min<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), target) - cumulative_.begin(), cumulative_.size() - 1);
    const BoundarySegment& seg = dom_->segments()[idx];
    BoundaryFiberSample sample;
    accepted = accept * density_max_[idx] <= metric_speed(dom_->model(), seg, s_uniform);
    if (!accepted) return sample;
    const double phi = (phi_uniform - 0.5) * kPi;
    sample.boundary_point = seg.point_at(s_uniform);
    sample.inward_angle = seg.inward_normal(s_uniform).angle() + phi;
    sample.cosine = std::cos(phi);
    sample.exit_time = exit_time(sample.boundary_point, sample.inward_angle);
    return sample;
}

double BoundaryFiberSampler::exit_time(Vec2 q, double theta) const {
    const GeodesicFrame frame(dom_->model(), q);
    const std::complex<double> u = std::polar(1.0, theta);
    double best = kInfinity;
    for (const BoundarySegment& seg : dom_->segments()) {
        const GeneralizedCircle g = frame.transform(*seg.carrier());
        for (double s : g.ray_parameters(u)) {
            // The root at the starting point itself is discarded.
            if (s < 1e-9 || s >= best || s >= frame.frame_limit()) continue;
            if (seg.locate(frame.from_frame(s * u), 1e-10)) {
                best = s;
                break;
            }
        }
    }
    return std::isfinite(best) ? frame.metric_radius(best) : kInfinity;
}

SantaloReport santalo_compare(const DomainSpec& dom, const TangentIntegrand& integrand, long long n_samples,
                              std::uint64_t seed) {
    if (n_samples < 2) throw PreconditionError("santalo_compare: n_samples must be at least 2");
    const BoundaryFiberSampler sampler(dom);
    const ManifoldModel& model = dom.model();
    const Box window = dom.bounding_box().padded(0.05);
    const double window_area = window.width() * window.height();
    const GaussRule& g = gauss_rule();

    const long long n_batches = (n_samples + kBatch - 1) / kBatch;
    std::vector<Moments> lhs(n_batches), rhs(n_batches);
    parallel_for(static_cast<std::size_t>(n_batches), [&](std::size_t b) {
        const long long count = std::min(kBatch, n_samples - static_cast<long long>(b) * kBatch);
        // Phase-space side: p uniform in the padded box, theta uniform.
        std::mt19937_64 rng_l(batch_seed(seed, 2 * b));
        Moments& ml = lhs[b];
        for (long long i = 0; i < count; ++i) {
            const double x = window.xmin + window.width() * std::generate_canonical<double, 53>(rng_l);
            const double y = window.ymin + window.height() * std::generate_canonical<double, 53>(rng_l);
            const double theta = kTwoPi * std::generate_canonical<double, 53>(rng_l);
            const Vec2 p{x, y};
            double v = 0.0;
            if (contains(dom, p)) {
                const double lam = model.lambda(p);
                v = window_area * kTwoPi * lam * lam * integrand.f(p, theta);
            }
            ml.sum += v;
            ml.sum_sq += v * v;
            ++ml.count;
        }
        // Boundary-fiber side.
        std::mt19937_64 rng_r(batch_seed(seed, 2 * b + 1));
        Moments& mr = rhs[b];
        for (long long i = 0; i < count; ++i) {
            const BoundaryFiberSample s = sampler.draw(rng_r);
            const double l = s.exit_time;
            double v = 0.0;
            if (std::isfinite(l)) {
                const GeodesicFrame frame(model, s.boundary_point);
                double chord = 0.0;
                for (int k = 0; k < kGaussPoints; ++k) {
                    const double t = 0.5 * l * (1.0 + g.x[k]);
                    const Vec2 at = frame.point_at(s.inward_angle, t);
                    const double dir = frame.velocity_at(s.inward_angle, t).angle();
                    chord += g.w[k] * integrand.f(at, dir);
                }
                v = sampler.boundary_length() * kPi * s.cosine * 0.5 * l * chord;
            } else {
                ++mr.infinite;
            }
            mr.sum += v;
            mr.sum_sq += v * v;
            ++mr.count;
        }
    });

    const auto summarize = [](const std::vector<Moments>& parts, double& mean, double& stderr_out, long long& inf) {
        double sum = 0.0, sum_sq = 0.0;
        long long n = 0;
        for (const Moments& m : parts) {
            sum += m.sum;
            sum_sq += m.sum_sq;
            n += m.count;
            inf += m.infinite;
        }
        mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
        stderr_out = std::sqrt(var / n);
    };
    SantaloReport report;
    report.n_samples = n_samples;
    report.seed = seed;
    report.integrand = integrand.name;
    report.boundary_length = sampler.boundary_length();
    long long unused = 0;
    summarize(lhs, report.lhs, report.stderr_lhs, unused);
    summarize(rhs, report.rhs, report.stderr_rhs, report.infinite_chords);
    return report;
}

}  // namespace hardyscope

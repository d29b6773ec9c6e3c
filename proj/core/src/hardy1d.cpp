#include <algorithm>
#include <cmath>

#include "hardyscope/errors.hpp"
#include "hardyscope/hardy.hpp"

namespace hardyscope {

namespace {

constexpr double kEndpointTol = 1e-9;

double derivative(const std::function<double(double)>& f, double x, double step) {
    return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step);
}

// Composite Simpson on [lo, hi] with an even number of panels.
template <class F>
double simpson(F&& g, double lo, double hi, int panels) {
    panels += panels % 2;
    const double dx = (hi - lo) / panels;
    double sum = g(lo, true) + g(hi, true);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(lo + i * dx, false);
    return sum * dx / 3.0;
}

// Cut point a + 2^k for the half-axis: the first span whose tail [a + 2^k, a + 2^(k+1)]
// is negligible against the peak of |f| seen so far.
double decay_limit(const std::function<double(double)>& f, double a) {
    constexpr int kProbe = 64;
    double peak = 0.0;
    double span = 1.0;
    for (int k = 0; k < 40; ++k, span *= 2.0) {
        for (int i = 1; i <= kProbe; ++i) peak = std::max(peak, std::abs(f(a + span * i / kProbe)));
        bool small = peak > 0.0;
        for (int i = 1; i <= kProbe && small; ++i) small = std::abs(f(a + span + span * i / kProbe)) <= 1e-13 * peak;
        if (small) return a + span;
    }
    throw PreconditionError("hardy_1d: samples do not decay on the half-axis");
}

}  // namespace

Hardy1DReport hardy_1d(const std::function<double(double)>& f, double a, double b, int n_points) {
    if (!(b > a)) throw PreconditionError("hardy_1d: empty interval");
    if (n_points < 16) throw PreconditionError("hardy_1d: n_points must be at least 16");
    const bool half_axis = !std::isfinite(b);
    if (std::abs(f(a)) > kEndpointTol || (!half_axis && std::abs(f(b)) > kEndpointTol))
        throw PreconditionError("hardy_1d: f does not vanish at the endpoints");

    const double hi = half_axis ? decay_limit(f, a) : b;
    const double length = hi - a;
    const double step = 1e-3 * std::min(1.0, length);
    const double limit_step = 1e-7 * length;

    const auto energy_density = [&](double x, bool) {
        const double d = derivative(f, x, step);
        return d * d;
    };
    // f^2 / (4 d^2) at an endpoint is the limit f'(end)^2 / 4, taken as a one-sided quotient.
    const auto weighted_from = [&](double end, double sign) {
        return [&f, end, sign, limit_step](double x, bool at_end) {
            const double dist = std::abs(x - end);
            if (at_end && dist == 0.0) {
                const double q = f(end + sign * limit_step) / limit_step;
                return q * q / 4.0;
            }
            const double v = f(x);
            return v * v / (4.0 * dist * dist);
        };
    };

    Hardy1DReport r;
    r.upper = hi;
    if (half_axis) {
        r.energy = simpson(energy_density, a, hi, n_points);
        r.weighted = simpson(weighted_from(a, 1.0), a, hi, n_points);
    } else {
        // d has a kink at the midpoint; integrate each half separately.
        const double mid = 0.5 * (a + b);
        const int half = std::max(8, n_points / 2);
        r.energy = simpson(energy_density, a, mid, half) + simpson(energy_density, mid, b, half);
        r.weighted = simpson(weighted_from(a, 1.0), a, mid, half) + simpson(weighted_from(b, -1.0), mid, b, half);
    }
    r.ratio = r.weighted > 0.0 ? r.energy / r.weighted : kInfinity;
    return r;
}

}  // namespace hardyscope

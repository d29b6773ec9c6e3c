#include "hardyscope/gencircle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardyscope {

GeneralizedCircle GeneralizedCircle::circle(Vec2 center, double radius) {
    const std::complex<double> c0 = center.as_complex();
    return {1.0, -c0, std::norm(c0) - radius * radius};
}

GeneralizedCircle GeneralizedCircle::line(Vec2 point, Vec2 direction) {
    const Vec2 n = direction.perp() / direction.norm();
    return {0.0, 0.5 * n.as_complex(), -dot(n, point)};
}

double GeneralizedCircle::evaluate(std::complex<double> z) const {
    return a * std::norm(z) + 2.0 * std::real(std::conj(b) * z) + c;
}

GeneralizedCircle GeneralizedCircle::translated(std::complex<double> p) const {
    // Substitute z = w + p.
    return {a, a * p + b, a * std::norm(p) + 2.0 * std::real(std::conj(b) * p) + c};
}

GeneralizedCircle GeneralizedCircle::mobius_recentered(std::complex<double> p) const {
    // Substitute z = (w + p) / (1 + conj(p) w) and clear the denominator.
    const double cross_term = 2.0 * std::real(std::conj(b) * p);
    return {
        a + cross_term + c * std::norm(p),
        a * p + b + std::conj(b) * p * p + c * p,
        a * std::norm(p) + cross_term + c,
    };
}

std::vector<double> GeneralizedCircle::ray_parameters(std::complex<double> u) const {
    // a s^2 + 2 beta s + c = 0
    const double beta = std::real(std::conj(b) * u);
    std::vector<double> out;
    const double scale = std::abs(a) + std::abs(beta) + std::abs(c);
    if (scale == 0.0) return out;
    if (std::abs(a) <= 1e-15 * scale) {
        if (beta != 0.0) {
            const double s = -c / (2.0 * beta);
            if (s > 0.0) out.push_back(s);
        }
        return out;
    }
    const double disc = beta * beta - a * c;
    // A discriminant at round-off level is a tangency: the ray touches the
    // carrier without crossing it (e.g. a ray into an ideal vertex along
    // which both sides are asymptotic).
    constexpr double kTangentUlps = 64.0 * std::numeric_limits<double>::epsilon();
    if (disc <= kTangentUlps * std::max(beta * beta, std::abs(a * c))) return out;
    const double sq = std::sqrt(disc);
    // Cancellation-free pair of roots.
    const double q = -(beta + std::copysign(sq, beta));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : -beta / a;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0) out.push_back(r1);
    if (r2 > 0.0 && r2 != r1) out.push_back(r2);
    return out;
}

std::complex<double> GeneralizedCircle::closest_to_origin() const {
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    if (std::abs(a) > 1e-15 * scale) {
        const std::complex<double> center = -b / a;
        const double r2 = std::norm(center) - c / a;
        const double r = std::sqrt(std::max(0.0, r2));
        const double m = std::abs(center);
        if (m == 0.0) return {r, 0.0};
        return center * (1.0 - r / m);
    }
    // 2 Re(conj(b) w) + c = 0: foot of the perpendicular from 0.
    return -c * b / (2.0 * std::norm(b));
}

}  // namespace hardyscope

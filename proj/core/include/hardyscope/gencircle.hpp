#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hardyscope/geometry.hpp"

namespace hardyscope {

// Zero set of  a|z|^2 + 2 Re(conj(b) z) + c = 0  with a, c real.
// a != 0 describes a circle, a == 0 a straight line. Both families are closed
// under translations and under the disk automorphisms used to recenter the
// Poincaré chart, which is what makes closed-form ray casting possible.
struct GeneralizedCircle {
    double a = 0.0;
    std::complex<double> b{};
    double c = 0.0;

    static GeneralizedCircle circle(Vec2 center, double radius);
    static GeneralizedCircle line(Vec2 point, Vec2 direction);

    double evaluate(std::complex<double> z) const;

    // Image under z -> z - p.
    GeneralizedCircle translated(std::complex<double> p) const;
    // Image under z -> (z - p) / (1 - conj(p) z).
    GeneralizedCircle mobius_recentered(std::complex<double> p) const;

    // Positive parameters s (ascending) with  s*u  on the curve, |u| = 1.
    std::vector<double> ray_parameters(std::complex<double> u) const;

    // Point of the curve closest to the origin.
    std::complex<double> closest_to_origin() const;
};

}  // namespace hardyscope

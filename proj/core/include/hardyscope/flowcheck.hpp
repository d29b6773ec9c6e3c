#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include "hardyscope/domain.hpp"

namespace hardyscope {

// Function on unit tangent vectors, given by base point and euclidean direction angle.
struct TangentIntegrand {
    std::string name;
    std::function<double(Vec2, double)> f;

    static TangentIntegrand constant(double c);
    // f(p, theta) = expression(x, y).
    static TangentIntegrand basepoint(const std::string& expression);
};

struct BoundaryFiberSample {
    Vec2 boundary_point;
    double inward_angle = 0.0;  // euclidean direction of u
    double cosine = 0.0;        // g(N, u)
    double exit_time = kInfinity;
};

struct SantaloReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_lhs = 0.0;
    double stderr_rhs = 0.0;
    long long n_samples = 0;
    std::uint64_t seed = 0;
    double boundary_length = 0.0;  // metric length of the boundary
    long long infinite_chords = 0;
    std::string integrand;

    double combined_stderr() const;
    double z_score() const;
    bool agrees(double sigmas = 3.0) const { return z_score() <= sigmas; }
};

// Draws one boundary fiber sample: boundary point uniform in metric arclength,
// angle phi from the inward normal uniform in (-pi/2, pi/2).
class BoundaryFiberSampler {
public:
    explicit BoundaryFiberSampler(const DomainSpec& dom);

    template <class Rng>
    BoundaryFiberSample draw(Rng& rng) const;

    double boundary_length() const { return total_length_; }
    // Exit time of the geodesic leaving boundary point q in direction theta.
    double exit_time(Vec2 q, double theta) const;

private:
    BoundaryFiberSample make_sample(double segment_pick, double s_uniform, double accept, double phi_uniform,
                                    bool& accepted) const;

    const DomainSpec* dom_;
    std::vector<double> cumulative_;  // metric length prefix sums
    std::vector<double> density_max_;
    double total_length_ = 0.0;
};

// Monte Carlo estimates of both sides of Santalo's formula
//   int_{S Omega} F dmu_L = int_{S+ dOmega} int_0^{l(u)} F(phi^t u) dt g(N, u) du.
SantaloReport santalo_compare(const DomainSpec& dom, const TangentIntegrand& integrand, long long n_samples,
                              std::uint64_t seed);

template <class Rng>
BoundaryFiberSample BoundaryFiberSampler::draw(Rng& rng) const {
    for (;;) {
        const double u1 = std::generate_canonical<double, 53>(rng);
        const double u2 = std::generate_canonical<double, 53>(rng);
        const double u3 = std::generate_canonical<double, 53>(rng);
        const double u4 = std::generate_canonical<double, 53>(rng);
        bool accepted = false;
        BoundaryFiberSample s = make_sample(u1, u2, u3, u4, accepted);
        if (accepted) return s;
    }
}

}  // namespace hardyscope

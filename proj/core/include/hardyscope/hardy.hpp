#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hardyscope/domain.hpp"
#include "hardyscope/expr.hpp"

namespace hardyscope {

// Equispaced directions theta_k = offset + 2 pi k / n_dirs with uniform
// weights 1/n_dirs (normalized fiber measure).
struct DirectionQuadrature {
    int n_dirs = 720;
    double offset = kPi / (2.0 * 720);
    double t_max = 40.0;

    // Offset pi / (2 n) keeps rays off axis-aligned tangencies.
    static DirectionQuadrature make(int n_dirs, double t_max);
    static DirectionQuadrature for_domain(const DomainSpec& dom, int n_dirs = 720);

    double angle(int k) const { return offset + kTwoPi * k / n_dirs; }
    void validate() const;
};

enum WeightFlags : std::uint32_t {
    weight_capped = 1u,      // at least one ray reached t_max
    weight_perturbed = 2u,   // at least one ray was retried off a vertex
    weight_infinite = 4u,    // every ray was infinite
};

// Per-point result of the directional quadrature.
struct WeightSample {
    double m = kInfinity;
    double inv_m2 = 0.0;
    // 1/m^2 from the even-indexed half of the directions.
    double inv_m2_half = 0.0;
    double capped_fraction = 0.0;
    std::uint32_t flags = 0;
};

WeightSample weight_sample(const DomainSpec& dom, Vec2 p, const DirectionQuadrature& quad, bool gamma_only = false,
                           CastOptions options = {});

// m(p) = [ mean_k 1/r_p(theta_k)^2 ]^(-1/2); infinite rays contribute 0.
double mean_hitting_weight(const DomainSpec& dom, Vec2 p, const DirectionQuadrature& quad, bool gamma_only = false);

struct WeightNode {
    int i = 0;
    int j = 0;
    Vec2 p;
    double d = 0.0;  // boundary_distance
    WeightSample w;
};

// Weight values on the interior nodes of the lattice x_i = xmin + i h,
// i in [0, nx), over the bounding box.
struct WeightField {
    Box box;
    double h = 0.0;
    int nx = 0;
    int ny = 0;
    bool gamma_restricted = false;
    DirectionQuadrature quad;
    std::vector<WeightNode> nodes;
    std::vector<int> index;  // nx * ny lattice slots; -1 for exterior nodes

    Vec2 node_point(int i, int j) const { return {box.xmin + i * h, box.ymin + j * h}; }
    const WeightNode* at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return nullptr;
        const int k = index[static_cast<std::size_t>(j) * nx + i];
        return k < 0 ? nullptr : &nodes[k];
    }
};

WeightField weight_field(const DomainSpec& dom, double h, const DirectionQuadrature& quad, bool gamma_only = false);

// Closed-form test function with an optional support predicate (support
// where the predicate expression is > 0). Values outside the support are 0.
class TestFunction {
public:
    static TestFunction make(std::string name, const std::string& expression, const std::string& support = {});

    const std::string& name() const { return name_; }
    const std::string& source() const { return source_; }
    bool in_support(Vec2 p) const { return !support_ || (*support_)(p.x, p.y) > 0.0; }
    double raw(Vec2 p) const { return (*value_)(p.x, p.y); }
    double operator()(Vec2 p) const { return in_support(p) ? raw(p) : 0.0; }
    // Central differences of the raw expression.
    Vec2 gradient(Vec2 p, double step) const;

private:
    std::string name_;
    std::string source_;
    std::shared_ptr<const Expression> value_;
    std::shared_ptr<const Expression> support_;
};

struct HardyReport {
    std::string function;
    double energy = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double quad_error_budget = 0.0;
    // Components of the budget, each relative to rhs or ratio.
    double angular_term = 0.0;
    double grid_term = 0.0;
    double cap_term = 0.0;
    int nodes_used = 0;
    bool gamma_restricted = false;

    bool holds() const { return ratio >= 1.0 - quad_error_budget; }
};

// Q(f) = int |grad f|^2 dx dy by the midpoint rule on cells of side h
// (conformal invariance of the 2-D Dirichlet energy) and
// rhs = (2/4) sum f^2 / m^2 lambda^2 h^2 over the field nodes.
HardyReport hardy_report(const DomainSpec& dom, const TestFunction& f, const WeightField& field);

// Same energy computed as sum lambda^-2 |grad f|^2 lambda^2 h^2 through the
// model's conformal factor.
double dirichlet_energy_metric(const DomainSpec& dom, const TestFunction& f, const WeightField& field);

struct WeakHardyConstants {
    double a = 0.0;
    double c_rhs = 0.0;
    double alpha = 0.0;
    double v_inf = 0.0;
};

WeakHardyConstants weak_hardy_constants(double alpha, double v_inf);

struct Hardy1DReport {
    double energy = 0.0;    // integral of f'^2
    double weighted = 0.0;  // integral of f^2 / (4 d^2)
    double ratio = 0.0;
    double upper = 0.0;     // integration limit actually used
};

// b may be kInfinity (half-axis). f' is taken by fourth-order central differences.
Hardy1DReport hardy_1d(const std::function<double(double)>& f, double a, double b, int n_points = 100000);

struct CrokeReport {
    double bound = kInfinity;
    Vec2 argmin;
    std::vector<double> fiber_integrals;  // one per sample point
    int infinite_chords = 0;
    bool flagged = false;
};

// min over samples of sum_k 1/l(theta_k)^2 * 2 pi / n_dirs with l the full chord length.
CrokeReport croke_bound(const DomainSpec& dom, const DirectionQuadrature& quad, std::span<const Vec2> samples);

// Interior points of the lattice box.min + (i, j) h, for croke sampling.
std::vector<Vec2> interior_samples(const DomainSpec& dom, double h);

}  // namespace hardyscope

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardyscope/domain.hpp"
#include "hardyscope/hardy.hpp"

namespace hardyscope {

enum class QbVerdict { quasi_bounded, not_quasi_bounded, inconclusive };
enum class BdrVerdict { regular, inconclusive };
enum class Verdict { discrete_spectrum_certified, compact_case, refuted_quasi_boundedness, inconclusive };

std::string to_string(QbVerdict v);
std::string to_string(BdrVerdict v);
std::string to_string(Verdict v);

struct QbEntry {
    double epsilon = 0.0;
    // Metric diameter of the base-window samples at the last two draw counts (n, 2n).
    double diameter = 0.0;
    double diameter_doubled = 0.0;
    // Diameter of everything accepted after each window growth.
    std::vector<double> window_diameters;
    int accepted = 0;
    bool bounded = false;  // a window growth found no new deep points, or the window saturated
    bool stable = false;   // n versus 2n agree within the stability tolerance
    bool witness = false;  // a pair farther apart than the witness factor x diameter
    std::optional<std::pair<Vec2, Vec2>> witness_pair;
    std::string note;
};

struct QbReport {
    std::vector<double> epsilons;
    std::vector<double> diam_estimates;
    std::vector<QbEntry> entries;
    int n_samples = 0;
    std::uint64_t seed = 0;
    QbVerdict verdict = QbVerdict::inconclusive;
};

struct QbSettings {
    int n_samples = 10000;
    int max_window_doublings = 5;
    // Extra doublings of the base draw while n versus 2n disagree.
    int max_stability_doublings = 2;
    double stability_tolerance = 0.05;
    double witness_factor = 10.0;
    std::uint64_t seed = 1;
};

// Rejection-samples Omega_eps = {d >= eps} in windows that double around the
// bounding box (clipped to the chart) and estimates metric diameters.
QbReport quasibounded_probe(const DomainSpec& dom, std::span<const double> epsilons, const QbSettings& settings = {});

struct CuspSequence {
    int vertex = 0;  // index into dom.vertices()
    std::vector<Vec2> points;
    std::vector<double> ratios;
    bool bounded = false;
};

struct BdrReport {
    double c_estimate = 0.0;
    Vec2 argmax;
    int nodes_used = 0;
    int excluded_infinite = 0;
    std::vector<CuspSequence> cusp_sequences;
    BdrVerdict verdict = BdrVerdict::inconclusive;
};

struct CuspPath {
    int vertex = 0;
    std::vector<Vec2> points;
};

// Points on the hyperbolic geodesic from `from` to each ideal vertex at chart
// distance 2^-j from the vertex, j = 1..levels. Requires a unit-disk chart.
std::vector<CuspPath> default_cusp_paths(const DomainSpec& dom, Vec2 from, int levels = 20);

// Envelope rule: the last quartile stays within `envelope` x the running max before it.
bool envelope_bounded(std::span<const double> ratios, double envelope = 1.1);

BdrReport bdr_estimate(const DomainSpec& dom, const WeightField& field, std::span<const CuspPath> cusp_paths);

struct UicResult {
    double alpha = 0.0;  // full cone angle; 2 pi when every direction qualifies
    double theta_star = 0.0;
    double d = 0.0;
};

// Largest symmetric cone around the nearest-boundary direction on which the
// one-sided hit time stays below c0 d(p).
UicResult uic_check(const DomainSpec& dom, Vec2 p, double c0, const DirectionQuadrature& quad);

struct UebSettings {
    int rings = 24;
    int per_ring = 96;
};

// True if for some probe radius r the metric ball about q + r n_out of radius
// k d_g(q, q + r n_out) misses the domain.
bool ueb_check(const DomainSpec& dom, Vec2 q_boundary, double k, std::span<const double> probe_radii,
               const UebSettings& settings = {});

struct ClassifySettings {
    std::vector<double> epsilons{0.4, 0.2, 0.1};
    QbSettings qb{};
    double field_h = 0.05;
    int n_dirs = 360;
    int cusp_levels = 20;
    double c0 = 2.0;
    int uic_points = 16;
    double ueb_k = 1.0;
    std::vector<double> ueb_probe_radii{0.05, 0.1, 0.2};
    int ueb_points_per_segment = 4;
};

struct UicSummary {
    double c0 = 0.0;
    double alpha_min = 0.0;
    int points = 0;
};

struct UebSummary {
    double k = 0.0;
    double pass_fraction = 0.0;
    int points = 0;
};

struct Certificate {
    std::string domain;
    std::optional<QbReport> qb;
    std::optional<BdrReport> bdr;
    std::optional<UicSummary> uic;
    std::optional<UebSummary> ueb;
    Verdict verdict = Verdict::inconclusive;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
};

// True for bounded domains whose closure sits inside the chart without ideal vertices.
bool is_compact_case(const DomainSpec& dom);

// Pure verdict rule.
Verdict combine_verdict(bool compact, std::optional<QbVerdict> qb, std::optional<BdrVerdict> bdr);

Certificate classify_domain(const DomainSpec& dom, const ClassifySettings& settings = {});

}  // namespace hardyscope

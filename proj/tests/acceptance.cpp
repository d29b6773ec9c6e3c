// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: hardyscope_acceptance [scratch_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hardyscope/classify.hpp"
#include "hardyscope/flowcheck.hpp"
#include "hardyscope/hardy.hpp"
#include "hardyscope/manifold.hpp"
#include "hardyscope/serialize.hpp"
#include "hardyscope/spectrum.hpp"
#include "job.hpp"
#include "oracles.hpp"

using namespace hardyscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Coefficients printed at full precision so the expressions are exact.
std::string coef(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return buf;
}

const double pi = oracle::pi;

// ---------------------------------------------------------------------------

Outcome half_plane_weight() {
    Outcome o;
    const auto hp = shapes::half_plane();
    const auto q = DirectionQuadrature::for_domain(hp, 720);
    oracle::SplitMix64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Vec2 p{rng.uniform(0.01, 1.0), rng.uniform(-2.0, 2.0)};
        const double m = mean_hitting_weight(hp, p, q);
        worst = std::max(worst, std::abs(m / (std::sqrt(2.0) * p.x) - 1.0));
    }
    o.require(worst <= 1e-3, "relative error " + num(worst));
    o.note("max |m/(sqrt2 d) - 1| = " + num(worst) + " over 50 points");
    return o;
}

Outcome disk_weight() {
    Outcome o;
    const auto q = DirectionQuadrature::make(720, 40.0);
    for (double radius : {1.0, 0.6}) {
        const double m = mean_hitting_weight(shapes::disk({0.3, -0.2}, radius), {0.3, -0.2}, q);
        o.require(std::abs(m - radius) <= 1e-3 * radius, "m(center) = " + num(m) + " for R = " + num(radius));
    }
    const auto field = weight_field(shapes::unit_disk(), 0.02, q);
    int below = 0;
    for (const auto& n : field.nodes) below += n.w.m < n.d;
    o.require(below == 0, std::to_string(below) + " nodes with m < d");
    o.note(std::to_string(field.nodes.size()) + " nodes, m >= d everywhere");
    return o;
}

struct HardyCase {
    std::string name;
    DomainSpec dom;
    std::vector<TestFunction> functions;
};

std::vector<TestFunction> square_functions() {
    std::vector<TestFunction> fs;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            fs.push_back(TestFunction::make("sin" + std::to_string(a) + std::to_string(b),
                                            "sin(" + std::to_string(a) + "*pi*x)*sin(" + std::to_string(b) + "*pi*y)"));
    oracle::SplitMix64 rng(31);
    for (int k = 0; k < 6; ++k) {
        const std::string e = "x*(1-x)*y*(1-y)*(1+" + coef(rng.uniform(-2, 2)) + "*x+" + coef(rng.uniform(-2, 2)) +
                              "*y)^" + std::to_string(1 + k % 2);
        fs.push_back(TestFunction::make("poly" + std::to_string(k), e));
    }
    return fs;
}

// Functions on the chart disk of radius rho built from s = rho^2 - x^2 - y^2.
std::vector<TestFunction> radial_family(const std::string& tag, double rho, std::uint64_t seed) {
    std::vector<TestFunction> fs;
    const std::string s = "(" + coef(rho * rho) + "-x^2-y^2)";
    oracle::SplitMix64 rng(seed);
    for (int k = 0; k < 16; ++k) {
        const std::string e = s + "^" + std::to_string(1 + k % 3) + "*(1+" + coef(rng.uniform(-1, 1) / rho) + "*x+" +
                              coef(rng.uniform(-1, 1) / rho) + "*y+" + coef(rng.uniform(-1, 1) / (rho * rho)) +
                              "*x*y)";
        fs.push_back(TestFunction::make(tag + "poly" + std::to_string(k), e, s));
    }
    for (int k = 1; k <= 4; ++k) {
        const std::string e = "sin(" + std::to_string(k) + "*pi*(x^2+y^2)/" + coef(rho * rho) + ")";
        fs.push_back(TestFunction::make(tag + "sin" + std::to_string(k), e, s));
    }
    return fs;
}

// Ideal-triangle sides are circles of radius sqrt 3 centred at 2 e^{i phi}.
std::vector<TestFunction> triangle_functions() {
    std::string g[3];
    int i = 0;
    for (double deg : {150.0, 270.0, 30.0}) {
        const double phi = deg * pi / 180.0;
        g[i++] = "((x-" + coef(2 * std::cos(phi)) + ")^2+(y-" + coef(2 * std::sin(phi)) + ")^2-3)";
    }
    const std::string prod = g[0] + "*" + g[1] + "*" + g[2];
    const std::string support = "min(min(" + g[0] + "," + g[1] + ")," + g[2] + ")";
    std::vector<TestFunction> fs;
    oracle::SplitMix64 rng(77);
    for (int k = 0; k < 20; ++k) {
        const std::string e = prod + "^" + std::to_string(1 + k % 2) + "*(1+" + coef(rng.uniform(-1, 1)) + "*x+" +
                              coef(rng.uniform(-1, 1)) + "*y)*exp(-" + coef(rng.uniform(0, 3)) + "*(x^2+y^2))";
        fs.push_back(TestFunction::make("tri" + std::to_string(k), e, support));
    }
    return fs;
}

Outcome hardy_suite() {
    Outcome o;
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    std::vector<HardyCase> cases;
    cases.push_back({"square", shapes::unit_square(), square_functions()});
    cases.push_back({"disk", shapes::unit_disk(), radial_family("disk", 1.0, 41)});
    cases.push_back({"ball", shapes::geodesic_ball(hyp, {0, 0}, 1.0), radial_family("ball", std::tanh(0.5), 43)});
    cases.push_back({"triangle", shapes::ideal_triangle(hyp), triangle_functions()});
    for (const auto& c : cases) {
        const auto field = weight_field(c.dom, 0.02, DirectionQuadrature::for_domain(c.dom, 720));
        int violations = 0;
        double min_ratio = kInfinity;
        for (const auto& f : c.functions) {
            const HardyReport r = hardy_report(c.dom, f, field);
            violations += !r.holds();
            min_ratio = std::min(min_ratio, r.ratio);
        }
        o.require(c.functions.size() >= 20, c.name + ": too few functions");
        o.require(violations == 0, c.name + ": " + std::to_string(violations) + " violations");
        o.note(c.name + " " + std::to_string(c.functions.size()) + " fns min ratio " + num(min_ratio));
    }
    return o;
}

Outcome mixed_suite() {
    Outcome o;
    const PolygonVertex v[4] = {PolygonVertex::finite({0, 0}), PolygonVertex::finite({1, 0}),
                                PolygonVertex::finite({1, 1}), PolygonVertex::finite({0, 1})};
    const bool gamma[4] = {true, false, false, false};
    const auto sq = build_geodesic_polygon(ManifoldModel::euclidean(), v, gamma);
    const auto q = DirectionQuadrature::make(720, default_t_max(sq));
    const auto full = weight_field(sq, 0.02, q);
    const auto restricted = weight_field(sq, 0.02, q, true);
    int below = 0;
    for (std::size_t k = 0; k < full.nodes.size(); ++k) below += restricted.nodes[k].w.m < full.nodes[k].w.m;
    o.require(below == 0, std::to_string(below) + " nodes with m_Gamma < m");
    const char* exprs[] = {"y", "y*exp(-x)", "y*(1+x^2)", "sin(pi*y/2)", "y*(2-y)*cos(x)"};
    double min_ratio = kInfinity;
    for (const char* e : exprs) {
        const HardyReport r = hardy_report(sq, TestFunction::make(e, e), restricted);
        o.require(r.holds(), std::string(e) + " ratio " + num(r.ratio));
        min_ratio = std::min(min_ratio, r.ratio);
    }
    o.note("m_Gamma >= m on " + std::to_string(full.nodes.size()) + " nodes, min ratio " + num(min_ratio));
    return o;
}

Outcome hardy_one_dimensional() {
    Outcome o;
    const auto a = hardy_1d([](double x) { return x * (1 - x); }, 0, 1);
    o.require(std::abs(a.weighted - 7.0 / 48.0) <= 1e-6, "x(1-x) weighted " + num(a.weighted));
    const auto b = hardy_1d([](double x) { return x * std::exp(-x); }, 0, kInfinity);
    o.require(std::abs(b.ratio - 2.0) <= 1e-6, "x e^-x ratio " + num(b.ratio));
    oracle::SplitMix64 rng(2024);
    double worst = kInfinity;
    for (int i = 0; i < 100; ++i) {
        const auto f = oracle::random_poly_bump(rng);
        worst = std::min(worst, hardy_1d(f, 0, 1).ratio);
    }
    o.require(worst >= 1.0, "random bump ratio " + num(worst));
    o.note("7/48 err " + num(std::abs(a.weighted - 7.0 / 48.0)) + ", ratio-2 err " + num(std::abs(b.ratio - 2.0)) +
           ", min bump ratio " + num(worst));
    return o;
}

double lambda1(const DomainSpec& dom, double h) {
    return lowest_eigenvalues(assemble_pencil(dom, h).pencil, 1).values[0];
}

Outcome eigenvalues() {
    Outcome o;
    const double sq = 2 * pi * pi;
    const double e32 = std::abs(lambda1(shapes::unit_square(), 1.0 / 32) - sq);
    const double e64 = std::abs(lambda1(shapes::unit_square(), 1.0 / 64) - sq);
    const double l128 = lambda1(shapes::unit_square(), 1.0 / 128);
    const double e128 = std::abs(l128 - sq);
    o.require(e128 <= 0.01 * sq, "square " + num(l128));
    const double order = std::log2(std::sqrt((e32 / e64) * (e64 / e128)));
    o.require(std::abs(order - 2.0) <= 0.1, "observed order " + num(order));

    const double j01 = oracle::bessel_j0_first_zero();
    const double disk = lambda1(shapes::unit_disk(), 1.0 / 128);
    o.require(std::abs(disk - j01 * j01) <= 0.01 * j01 * j01, "disk " + num(disk));
    const double rect = lambda1(shapes::rectangle(0, 0, 1, 2), 1.0 / 128);
    const double rect_exact = oracle::rectangle_eigenvalue(1, 2, 1, 1);
    o.require(std::abs(rect - rect_exact) <= 0.01 * rect_exact, "rectangle " + num(rect));
    o.note("square " + num(l128) + " (order " + num(order) + "), disk " + num(disk) + " vs " + num(j01 * j01) +
           ", 1x2 " + num(rect) + " vs " + num(rect_exact));
    return o;
}

Outcome croke() {
    Outcome o;
    const auto q = DirectionQuadrature::make(720, 40.0);
    const std::vector<Vec2> centre{{0, 0}};
    const double c = croke_bound(shapes::unit_disk(), q, centre).bound;
    o.require(std::abs(c - pi / 2) <= 1e-2, "disk centre " + num(c));
    for (const auto& [name, dom] : {std::pair{"disk", shapes::unit_disk()}, std::pair{"square", shapes::unit_square()}}) {
        const double bound = croke_bound(dom, q, interior_samples(dom, 0.05)).bound;
        const double l1 = lambda1(dom, 1.0 / 64);
        o.require(bound <= l1, std::string(name) + " bound " + num(bound) + " > " + num(l1));
        o.note(std::string(name) + " " + num(bound) + " <= " + num(l1));
    }
    o.note("centre " + num(c));
    return o;
}

Outcome santalo() {
    Outcome o;
    struct Case {
        const char* name;
        DomainSpec dom;
        TangentIntegrand f;
    };
    const Case cases[] = {
        {"disk/1", shapes::unit_disk(), TangentIntegrand::constant(1.0)},
        {"disk/bump", shapes::unit_disk(), TangentIntegrand::basepoint("1-x^2-y^2")},
        {"square/1", shapes::unit_square(), TangentIntegrand::constant(1.0)},
        {"square/poly", shapes::unit_square(), TangentIntegrand::basepoint("1+x*y-x^2")},
    };
    double worst = 0.0;
    for (const auto& c : cases)
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto r = santalo_compare(c.dom, c.f, 1000000, seed);
            worst = std::max(worst, r.z_score());
            o.require(r.agrees(3.0), std::string(c.name) + " seed " + std::to_string(seed) + " z " + num(r.z_score()));
        }
    o.note("12 runs at 1e6 samples, max z " + num(worst));
    return o;
}

Outcome classification() {
    Outcome o;
    ClassifySettings s;
    const auto tri = classify_domain(shapes::ideal_triangle(), s);
    o.require(tri.verdict == Verdict::discrete_spectrum_certified, "triangle " + to_string(tri.verdict));
    o.require(tri.qb && tri.qb->verdict == QbVerdict::quasi_bounded, "triangle probe not quasi-bounded");
    int bounded = 0;
    if (tri.bdr)
        for (const auto& seq : tri.bdr->cusp_sequences) bounded += seq.bounded;
    o.require(bounded == 3, std::to_string(bounded) + " of 3 cusp paths bounded");
    const auto strip = classify_domain(shapes::strip(1.0), s);
    o.require(strip.verdict == Verdict::refuted_quasi_boundedness, "strip " + to_string(strip.verdict));
    const auto disk = classify_domain(shapes::unit_disk(), s);
    o.require(disk.verdict == Verdict::compact_case, "disk " + to_string(disk.verdict));
    o.note("triangle " + to_string(tri.verdict) + " (c " + num(tri.bdr ? tri.bdr->c_estimate : 0.0) + "), strip " +
           to_string(strip.verdict) + ", disk " + to_string(disk.verdict));
    return o;
}

void check_table(Outcome& o, const std::string& tag, const TruncationTable& t) {
    o.require(t.monotone, tag + " not monotone");
    o.require(t.cauchy.value_or(false), tag + " not Cauchy");
    const auto& last = t.rows.back();
    std::string diffs;
    for (const auto& row : t.rows)
        if (!row.diffs.empty()) diffs += (diffs.empty() ? "" : ",") + num(row.diffs[0]);
    o.note(tag + " lambda1 " + num(last.values.empty() ? 0.0 : last.values[0]) + " diffs " + diffs);
}

Outcome truncation() {
    Outcome o;
    const double coarse[] = {0.5, 0.5 / std::sqrt(2.0), 0.25, 0.25 / std::sqrt(2.0), 0.125};
    const double fine[] = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    const auto hyp = ManifoldModel::poincare_disk(1.0);
    check_table(o, "triangle/coarse", truncation_study(shapes::ideal_triangle(hyp), coarse, 1.0 / 64, 3));
    check_table(o, "triangle/fine", truncation_study(shapes::ideal_triangle(hyp), fine, 1.0 / 128, 3));

    const auto vc = ManifoldModel::custom_conformal("2*2^(-(1+x)/2)/(1-x^2-y^2)", Chart::disk(1.0));
    oracle::SplitMix64 rng(9);
    double kmin = kInfinity, kmax = -kInfinity;
    for (int i = 0; i < 200; ++i) {
        const Vec2 p = Vec2::polar(0.95 * std::sqrt(rng.uniform()), 2 * pi * rng.uniform());
        const double k = curvature(vc, p);
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    o.require(kmin >= -4.0 - 1e-4 && kmax <= -1.0 + 1e-4, "K range [" + num(kmin) + ", " + num(kmax) + "]");
    check_table(o, "variable/coarse", truncation_study(shapes::ideal_triangle(vc), coarse, 1.0 / 64, 3));
    o.note("K in [" + num(kmin) + ", " + num(kmax) + "]");
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism(const fs::path& scratch) {
    Outcome o;
    int jobs = 0, files = 0;
    for (const auto& entry : fs::directory_iterator(HARDYSCOPE_JOBS_DIR)) {
        if (entry.path().extension() != ".json") continue;
        const auto cfg = job::load_config(entry.path());
        job::RunOptions a, b;
        a.out_dir = scratch / "determinism_a" / cfg.name;
        b.out_dir = scratch / "determinism_b" / cfg.name;
        a.threads = 1;
        b.threads = 3;
        const auto ra = job::run_job(cfg, a);
        const auto rb = job::run_job(cfg, b);
        o.require(ra.exit_code() == 0, cfg.name + " exit " + std::to_string(ra.exit_code()));
        o.require(ra.files.size() == rb.files.size(), cfg.name + " file lists differ");
        for (const auto& f : ra.files) {
            const bool same = slurp(*a.out_dir / f.path) == slurp(*b.out_dir / f.path);
            o.require(same, cfg.name + "/" + f.path + " differs");
            ++files;
        }
        ++jobs;
    }
    o.note(std::to_string(jobs) + " jobs, " + std::to_string(files) + " artifacts byte-identical across reruns");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hardyscope_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"half-plane weight", half_plane_weight},
        {"disk weight", disk_weight},
        {"hardy inequality suite", hardy_suite},
        {"mixed boundary suite", mixed_suite},
        {"one-dimensional hardy", hardy_one_dimensional},
        {"eigenvalues", eigenvalues},
        {"croke bound", croke},
        {"santalo formula", santalo},
        {"classification", classification},
        {"truncation study", truncation},
        {"determinism", [&] { return determinism(scratch); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

#include "hardyscope/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace hardyscope {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json to_json(Vec2 p) { return json::array({json_number(p.x), json_number(p.y)}); }

namespace {

json numbers(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(json_number(v));
    return arr;
}

}  // namespace

json to_json(const HardyReport& r) {
    return {{"function", r.function},
            {"energy", json_number(r.energy)},
            {"rhs", json_number(r.rhs)},
            {"ratio", json_number(r.ratio)},
            {"quad_error_budget", json_number(r.quad_error_budget)},
            {"angular_term", json_number(r.angular_term)},
            {"grid_term", json_number(r.grid_term)},
            {"cap_term", json_number(r.cap_term)},
            {"nodes_used", r.nodes_used},
            {"gamma_restricted", r.gamma_restricted},
            {"holds", r.holds()}};
}

json to_json(const Hardy1DReport& r) {
    return {{"energy", json_number(r.energy)},
            {"weighted", json_number(r.weighted)},
            {"ratio", json_number(r.ratio)},
            {"upper", json_number(r.upper)}};
}

json to_json(const WeakHardyConstants& c) {
    return {{"a", json_number(c.a)},
            {"c_rhs", json_number(c.c_rhs)},
            {"alpha", json_number(c.alpha)},
            {"v_inf", json_number(c.v_inf)}};
}

json to_json(const CrokeReport& r) {
    return {{"bound", json_number(r.bound)},
            {"argmin", to_json(r.argmin)},
            {"samples", r.fiber_integrals.size()},
            {"infinite_chords", r.infinite_chords},
            {"flagged", r.flagged}};
}

json to_json(const QbReport& r) {
    json entries = json::array();
    for (const QbEntry& e : r.entries) {
        json j = {{"epsilon", json_number(e.epsilon)},
                  {"diameter", json_number(e.diameter)},
                  {"diameter_doubled", json_number(e.diameter_doubled)},
                  {"window_diameters", numbers(e.window_diameters)},
                  {"accepted", e.accepted},
                  {"bounded", e.bounded},
                  {"stable", e.stable},
                  {"witness", e.witness}};
        if (e.witness_pair) j["witness_pair"] = {to_json(e.witness_pair->first), to_json(e.witness_pair->second)};
        if (!e.note.empty()) j["note"] = e.note;
        entries.push_back(j);
    }
    return {{"epsilons", numbers(r.epsilons)},
            {"diam_estimates", numbers(r.diam_estimates)},
            {"entries", entries},
            {"n_samples", r.n_samples},
            {"seed", r.seed},
            {"verdict", to_string(r.verdict)}};
}

json to_json(const BdrReport& r) {
    json seqs = json::array();
    for (const CuspSequence& s : r.cusp_sequences) {
        json pts = json::array();
        for (Vec2 p : s.points) pts.push_back(to_json(p));
        seqs.push_back({{"vertex", s.vertex}, {"points", pts}, {"ratios", numbers(s.ratios)}, {"bounded", s.bounded}});
    }
    return {{"c_estimate", json_number(r.c_estimate)},
            {"argmax", to_json(r.argmax)},
            {"nodes_used", r.nodes_used},
            {"excluded_infinite", r.excluded_infinite},
            {"cusp_sequences", seqs},
            {"verdict", to_string(r.verdict)}};
}

json to_json(const Certificate& c) {
    json j = {{"domain", c.domain}, {"verdict", to_string(c.verdict)}, {"seed", c.seed}, {"notes", c.notes}};
    j["qb"] = c.qb ? to_json(*c.qb) : json(nullptr);
    j["bdr"] = c.bdr ? to_json(*c.bdr) : json(nullptr);
    j["uic"] = c.uic ? json{{"c0", json_number(c.uic->c0)},
                            {"alpha_min", json_number(c.uic->alpha_min)},
                            {"points", c.uic->points}}
                     : json(nullptr);
    j["ueb"] = c.ueb ? json{{"k", json_number(c.ueb->k)},
                            {"pass_fraction", json_number(c.ueb->pass_fraction)},
                            {"points", c.ueb->points}}
                     : json(nullptr);
    return j;
}

json to_json(const EigenResult& r) {
    return {{"values", numbers(r.values)},
            {"residual_norms", numbers(r.residual_norms)},
            {"h", json_number(r.h)},
            {"iterations", r.iterations}};
}

json to_json(const TruncationTable& t) {
    json rows = json::array();
    for (const TruncationRow& row : t.rows) {
        json j = {{"cut", json_number(row.cut)},
                  {"nodes", row.nodes},
                  {"values", numbers(row.values)},
                  {"residuals", numbers(row.residuals)},
                  {"diffs", numbers(row.diffs)},
                  {"skipped", row.skipped}};
        if (!row.note.empty()) j["note"] = row.note;
        rows.push_back(j);
    }
    return {{"h", json_number(t.h)},
            {"k", t.k},
            {"rows", rows},
            {"monotone", t.monotone},
            {"cauchy", t.cauchy ? json(*t.cauchy) : json(nullptr)},
            {"notes", t.notes}};
}

json to_json(const SantaloReport& r) {
    return {{"integrand", r.integrand},
            {"lhs", json_number(r.lhs)},
            {"rhs", json_number(r.rhs)},
            {"stderr_lhs", json_number(r.stderr_lhs)},
            {"stderr_rhs", json_number(r.stderr_rhs)},
            {"z_score", json_number(r.z_score())},
            {"agrees", r.agrees()},
            {"n_samples", r.n_samples},
            {"seed", r.seed},
            {"boundary_length", json_number(r.boundary_length)},
            {"infinite_chords", r.infinite_chords}};
}

void write_weight_csv(std::ostream& out, const WeightField& field) {
    out << "x,y,d,m,flags\n";
    for (const WeightNode& n : field.nodes) {
        out << format_double(n.p.x) << ',' << format_double(n.p.y) << ',' << format_double(n.d) << ','
            << format_double(n.w.m) << ',' << n.w.flags << '\n';
    }
}

void write_truncation_csv(std::ostream& out, const TruncationTable& table) {
    out << "cut_level,h,k,lambda,diff,residual\n";
    for (const TruncationRow& row : table.rows) {
        if (row.skipped) continue;
        for (std::size_t i = 0; i < row.values.size(); ++i) {
            out << format_double(row.cut) << ',' << format_double(table.h) << ',' << (i + 1) << ','
                << format_double(row.values[i]) << ',';
            if (i < row.diffs.size()) out << format_double(row.diffs[i]);
            out << ',' << format_double(row.residuals[i]) << '\n';
        }
    }
}

void write_triplets(std::ostream& out, const SparsePencil& pencil) {
    const auto& k = pencil.stiffness;
    out << "%stiffness " << k.rows() << ' ' << k.cols() << ' ' << k.nonZeros() << '\n';
    for (int c = 0; c < k.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    out << "%mass " << pencil.mass.size() << '\n';
    for (Eigen::Index i = 0; i < pencil.mass.size(); ++i) out << i << ' ' << format_double(pencil.mass[i]) << '\n';
}

}  // namespace hardyscope

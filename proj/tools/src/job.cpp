#include "job.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hardyscope/classify.hpp"
#include "hardyscope/expr.hpp"
#include "hardyscope/parallel.hpp"
#include "hardyscope/serialize.hpp"
#include "hardyscope/spectrum.hpp"
#include "sha256.hpp"

namespace hardyscope::job {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Task t) {
    switch (t) {
        case Task::weight: return "weight";
        case Task::hardy: return "hardy";
        case Task::classify: return "classify";
        case Task::spectrum: return "spectrum";
        case Task::croke: return "croke";
        case Task::santalo: return "santalo";
        case Task::hardy1d: return "hardy1d";
    }
    return "unknown";
}

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"weight", "hardy", "classify", "spectrum", "croke", "santalo", "hardy1d"};
    return names;
}

double JobConfig::effective_t_max() const {
    if (params.t_max) return *params.t_max;
    return domain ? default_t_max(*domain) : 40.0;
}

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) throw ConfigError(join(path, it.key()), "unknown key");
    }
}

double number_at(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(join(path, key), "expected a finite number");
    return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? number_at(obj, path, key) : fallback;
}

long long integer_at(const json& obj, const std::string& path, const char* key, long long lo, long long hi) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(join(path, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

bool bool_or(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return obj.at(key).get<bool>();
}

std::string string_at(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing");
    if (!obj.at(key).is_string()) throw ConfigError(join(path, key), "expected a string");
    return obj.at(key).get<std::string>();
}

Vec2 vec2_at(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing");
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(join(path, key), "expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Box box_at(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (!v.is_array() || v.size() != 4) throw ConfigError(p, "expected [xmin, ymin, xmax, ymax]");
    for (const auto& e : v)
        if (!e.is_number()) throw ConfigError(p, "expected [xmin, ymin, xmax, ymax]");
    const Box b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
    if (!(b.xmax > b.xmin && b.ymax > b.ymin)) throw ConfigError(p, "box is empty");
    return b;
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(index_path(p, i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

// Parses an expression only to surface syntax errors under the right field name.
void check_expression(const std::string& source, std::vector<std::string> vars, const std::string& field) {
    try {
        (void)Expression::parse(source, std::move(vars));
    } catch (const ParseError& e) {
        throw ConfigError(field, std::string("parse error: ") + e.what());
    }
}

ManifoldModel parse_model(const json& doc) {
    if (!doc.contains("model")) return ManifoldModel::euclidean();
    const json& m = doc.at("model");
    require_object(m, "model");
    reject_unknown(m, "model", {"kind", "b", "lambda", "chart"});
    const std::string kind = string_at(m, "model", "kind");
    if (kind == "euclidean") return ManifoldModel::euclidean();
    if (kind == "poincare_disk") {
        const double b = number_or(m, "model", "b", 1.0);
        if (!(b > 0.0)) throw ConfigError("model.b", "curvature magnitude must be positive");
        return ManifoldModel::poincare_disk(b);
    }
    if (kind == "custom_conformal") {
        const std::string lambda = string_at(m, "model", "lambda");
        check_expression(lambda, {"x", "y"}, "model.lambda");
        Chart chart = Chart::plane();
        if (m.contains("chart")) {
            const json& c = m.at("chart");
            require_object(c, "model.chart");
            reject_unknown(c, "model.chart", {"kind", "radius", "box"});
            const std::string ck = string_at(c, "model.chart", "kind");
            if (ck == "plane") {
                chart = Chart::plane();
            } else if (ck == "disk") {
                const double r = number_or(c, "model.chart", "radius", 1.0);
                if (!(r > 0.0)) throw ConfigError("model.chart.radius", "must be positive");
                chart = Chart::disk(r);
            } else if (ck == "box") {
                chart = Chart::rectangle(box_at(c, "model.chart", "box"));
            } else {
                throw ConfigError("model.chart.kind", "unknown chart '" + ck + "' (valid: plane, disk, box)");
            }
        }
        return ManifoldModel::custom_conformal(lambda, chart);
    }
    throw ConfigError("model.kind", "unknown model '" + kind + "' (valid: euclidean, poincare_disk, custom_conformal)");
}

DomainSpec with_gamma(const DomainSpec& dom, const std::vector<bool>& gamma, const std::string& path) {
    if (gamma.size() != dom.segments().size())
        throw ConfigError(path, "expected " + std::to_string(dom.segments().size()) + " flags, one per boundary segment");
    std::vector<BoundarySegment> segs = dom.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) segs[i].gamma_member = gamma[i];
    std::optional<Box> view;
    if (dom.unbounded()) view = dom.bounding_box();
    return DomainSpec(dom.model(), std::move(segs), dom.vertices(), view, dom.name());
}

std::vector<bool> gamma_list(const json& obj, const std::string& path) {
    const json& v = obj.at("gamma");
    const std::string p = join(path, "gamma");
    if (!v.is_array()) throw ConfigError(p, "expected an array of booleans");
    std::vector<bool> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_boolean()) throw ConfigError(index_path(p, i), "expected true or false");
        out.push_back(v[i].get<bool>());
    }
    return out;
}

void require_flat(const ManifoldModel& model, const std::string& preset) {
    if (model.kind() != ModelKind::euclidean)
        throw ConfigError("domain.preset.name", "preset '" + preset + "' requires the euclidean model");
}

DomainSpec parse_preset(const json& p, const ManifoldModel& model) {
    const std::string path = "domain.preset";
    require_object(p, path);
    reject_unknown(p, path, {"name", "center", "radius", "box", "width", "angles_deg"});
    const std::string name = string_at(p, path, "name");
    if (name == "unit_disk") {
        require_flat(model, name);
        return shapes::unit_disk();
    }
    if (name == "disk") {
        require_flat(model, name);
        const double r = number_at(p, path, "radius");
        if (!(r > 0.0)) throw ConfigError(path + ".radius", "must be positive");
        return shapes::disk(p.contains("center") ? vec2_at(p, path, "center") : Vec2{}, r);
    }
    if (name == "unit_square") {
        require_flat(model, name);
        return shapes::unit_square();
    }
    if (name == "rectangle") {
        require_flat(model, name);
        const Box b = box_at(p, path, "box");
        return shapes::rectangle(b.xmin, b.ymin, b.xmax, b.ymax);
    }
    if (name == "half_plane") {
        require_flat(model, name);
        return shapes::half_plane();
    }
    if (name == "strip") {
        require_flat(model, name);
        const double w = number_or(p, path, "width", 1.0);
        if (!(w > 0.0)) throw ConfigError(path + ".width", "must be positive");
        return shapes::strip(w);
    }
    if (name == "geodesic_ball") {
        const double r = number_at(p, path, "radius");
        if (!(r > 0.0)) throw ConfigError(path + ".radius", "must be positive");
        return shapes::geodesic_ball(model, p.contains("center") ? vec2_at(p, path, "center") : Vec2{}, r);
    }
    if (name == "ideal_triangle") return shapes::ideal_triangle(model);
    if (name == "ideal_polygon") {
        const auto angles = number_list(p, path, "angles_deg");
        return shapes::ideal_polygon(model, angles);
    }
    throw ConfigError(path + ".name", "unknown preset '" + name +
                                          "' (valid: unit_disk, disk, unit_square, rectangle, half_plane, strip, "
                                          "geodesic_ball, ideal_triangle, ideal_polygon)");
}

DomainSpec parse_polygon(const json& p, const ManifoldModel& model, const std::string& name) {
    const std::string path = "domain.polygon";
    require_object(p, path);
    reject_unknown(p, path, {"vertices", "gamma"});
    if (!p.contains("vertices") || !p.at("vertices").is_array())
        throw ConfigError(path + ".vertices", "expected an array of vertex records");
    const json& vs = p.at("vertices");
    std::vector<PolygonVertex> verts;
    bool all_ideal = true;
    std::vector<double> ideal_angles;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string vp = index_path(path + ".vertices", i);
        require_object(vs[i], vp);
        reject_unknown(vs[i], vp, {"point", "ideal_angle_deg"});
        if (vs[i].contains("ideal_angle_deg")) {
            const double deg = number_at(vs[i], vp, "ideal_angle_deg");
            verts.push_back(PolygonVertex::at_infinity(deg * kPi / 180.0));
            ideal_angles.push_back(deg);
        } else {
            verts.push_back(PolygonVertex::finite(vec2_at(vs[i], vp, "point")));
            all_ideal = false;
        }
    }
    std::vector<bool> gamma;
    if (p.contains("gamma")) gamma = gamma_list(p, path);
    if (!gamma.empty() && gamma.size() != verts.size())
        throw ConfigError(path + ".gamma", "expected one flag per side");
    if (model.kind() == ModelKind::custom_conformal) {
        if (!all_ideal)
            throw ConfigError(path, "custom conformal models support only ideal polygons (all vertices at infinity)");
        DomainSpec d = shapes::ideal_polygon(model, ideal_angles);
        return gamma.empty() ? d : with_gamma(d, gamma, path + ".gamma");
    }
    const std::unique_ptr<bool[]> storage(new bool[gamma.size() + 1]);
    for (std::size_t i = 0; i < gamma.size(); ++i) storage[i] = gamma[i];
    return build_geodesic_polygon(model, verts, std::span<const bool>(storage.get(), gamma.size()), name);
}

BoundarySegment parse_segment(const json& s, const std::string& path) {
    require_object(s, path);
    const std::string kind = string_at(s, path, "kind");
    BoundarySegment seg;
    if (kind == "line") {
        reject_unknown(s, path, {"kind", "point", "direction", "gamma"});
        const Vec2 dir = vec2_at(s, path, "direction");
        if (dir.norm() == 0.0) throw ConfigError(path + ".direction", "must be nonzero");
        seg = BoundarySegment::make_line(vec2_at(s, path, "point"), dir);
    } else if (kind == "straight") {
        reject_unknown(s, path, {"kind", "from", "to", "gamma"});
        seg = BoundarySegment::make_straight(vec2_at(s, path, "from"), vec2_at(s, path, "to"));
    } else if (kind == "arc") {
        reject_unknown(s, path, {"kind", "center", "radius", "theta0", "sweep", "gamma"});
        const double r = number_at(s, path, "radius");
        if (!(r > 0.0)) throw ConfigError(path + ".radius", "must be positive");
        const double sweep = number_at(s, path, "sweep");
        if (sweep == 0.0) throw ConfigError(path + ".sweep", "must be nonzero");
        seg = BoundarySegment::make_arc(vec2_at(s, path, "center"), r, number_at(s, path, "theta0"), sweep);
    } else if (kind == "parametric") {
        reject_unknown(s, path, {"kind", "x", "y", "t0", "t1", "gamma"});
        const std::string x = string_at(s, path, "x");
        const std::string y = string_at(s, path, "y");
        check_expression(x, {"t"}, path + ".x");
        check_expression(y, {"t"}, path + ".y");
        const double t0 = number_at(s, path, "t0");
        const double t1 = number_at(s, path, "t1");
        if (!(t1 > t0)) throw ConfigError(path + ".t1", "must exceed t0");
        seg = BoundarySegment::make_parametric(x, y, t0, t1);
    } else {
        throw ConfigError(path + ".kind", "unknown segment kind '" + kind + "' (valid: line, straight, arc, parametric)");
    }
    seg.gamma_member = bool_or(s, path, "gamma", true);
    return seg;
}

DomainSpec parse_domain(const json& doc, const ManifoldModel& model, const std::string& name) {
    if (!doc.contains("domain")) throw ConfigError("domain", "missing");
    const json& d = doc.at("domain");
    require_object(d, "domain");
    reject_unknown(d, "domain", {"preset", "polygon", "segments", "vertices", "view_box", "gamma"});
    const int forms = int(d.contains("preset")) + int(d.contains("polygon")) + int(d.contains("segments"));
    if (forms != 1) throw ConfigError("domain", "give exactly one of preset, polygon or segments");

    try {
        if (d.contains("preset")) {
            DomainSpec dom = parse_preset(d.at("preset"), model);
            return d.contains("gamma") ? with_gamma(dom, gamma_list(d, "domain"), "domain.gamma") : dom;
        }
        if (d.contains("polygon")) return parse_polygon(d.at("polygon"), model, name);

        const json& segs = d.at("segments");
        if (!segs.is_array() || segs.empty()) throw ConfigError("domain.segments", "expected a non-empty array");
        std::vector<BoundarySegment> out;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            out.push_back(parse_segment(segs[i], index_path("domain.segments", i)));
            out.back().id = static_cast<int>(i);
        }
        std::vector<Vertex> verts;
        if (d.contains("vertices")) {
            const json& vs = d.at("vertices");
            if (!vs.is_array()) throw ConfigError("domain.vertices", "expected an array of vertex records");
            for (std::size_t i = 0; i < vs.size(); ++i) {
                const std::string vp = index_path("domain.vertices", i);
                require_object(vs[i], vp);
                reject_unknown(vs[i], vp, {"point", "ideal"});
                verts.push_back({vec2_at(vs[i], vp, "point"), bool_or(vs[i], vp, "ideal", false)});
            }
        }
        std::optional<Box> view;
        if (d.contains("view_box")) view = box_at(d, "domain", "view_box");
        return DomainSpec(model, std::move(out), std::move(verts), view, name);
    } catch (const ConfigError&) {
        throw;
    } catch (const ParseError& e) {
        throw ConfigError("domain", std::string("parse error: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError("domain", e.what());
    }
}

JobParams parse_params(const json& doc, const std::string& path, std::vector<TestFunctionSpec>& tests) {
    JobParams p;
    if (!doc.contains("params")) return p;
    const json& j = doc.at("params");
    require_object(j, path);
    reject_unknown(j, path,
                   {"h", "n_dirs", "t_max", "gamma_only", "k", "cut_levels", "seed", "n_samples", "test_functions",
                    "integrand", "function", "interval", "n_points", "samples_h", "epsilons", "export_pencil"});
    if (j.contains("h")) {
        p.h = number_at(j, path, "h");
        if (!(p.h > 0.0)) throw ConfigError(path + ".h", "must be positive");
    }
    if (j.contains("n_dirs")) p.n_dirs = static_cast<int>(integer_at(j, path, "n_dirs", 16, 1 << 20));
    if (j.contains("t_max")) {
        const json& t = j.at("t_max");
        if (t.is_string() && t.get<std::string>() == "auto") {
            p.t_max.reset();
        } else {
            const double v = number_at(j, path, "t_max");
            if (!(v > 0.0)) throw ConfigError(path + ".t_max", "must be positive or \"auto\"");
            p.t_max = v;
        }
    }
    p.gamma_only = bool_or(j, path, "gamma_only", false);
    if (j.contains("k")) p.k = static_cast<int>(integer_at(j, path, "k", 1, 64));
    if (j.contains("cut_levels")) {
        p.cut_levels = number_list(j, path, "cut_levels");
        for (std::size_t i = 0; i < p.cut_levels.size(); ++i) {
            if (!(p.cut_levels[i] > 0.0)) throw ConfigError(index_path(path + ".cut_levels", i), "must be positive");
            if (i > 0 && !(p.cut_levels[i] < p.cut_levels[i - 1]))
                throw ConfigError(index_path(path + ".cut_levels", i), "cut levels must strictly decrease");
        }
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError(path + ".seed", "expected a non-negative integer");
        p.seed = s.get<std::uint64_t>();
    }
    if (j.contains("n_samples")) p.n_samples = integer_at(j, path, "n_samples", 1, 1'000'000'000LL);
    if (j.contains("test_functions")) {
        const json& tf = j.at("test_functions");
        if (!tf.is_array()) throw ConfigError(path + ".test_functions", "expected an array");
        for (std::size_t i = 0; i < tf.size(); ++i) {
            const std::string tp = index_path(path + ".test_functions", i);
            require_object(tf[i], tp);
            reject_unknown(tf[i], tp, {"name", "expr", "support"});
            TestFunctionSpec t;
            t.expression = string_at(tf[i], tp, "expr");
            t.name = tf[i].contains("name") ? string_at(tf[i], tp, "name") : "f" + std::to_string(i);
            if (tf[i].contains("support")) t.support = string_at(tf[i], tp, "support");
            check_expression(t.expression, {"x", "y"}, tp + ".expr");
            if (!t.support.empty()) check_expression(t.support, {"x", "y"}, tp + ".support");
            tests.push_back(t);
        }
    }
    if (j.contains("integrand")) {
        p.integrand = string_at(j, path, "integrand");
        check_expression(p.integrand, {"x", "y"}, path + ".integrand");
    }
    if (j.contains("function")) {
        p.function = string_at(j, path, "function");
        check_expression(p.function, {"x"}, path + ".function");
    }
    if (j.contains("interval")) {
        const json& iv = j.at("interval");
        const std::string ip = path + ".interval";
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number())
            throw ConfigError(ip, "expected [a, b] with b a number or \"inf\"");
        p.a = iv[0].get<double>();
        if (iv[1].is_string() && iv[1].get<std::string>() == "inf") {
            p.b = kInfinity;
        } else if (iv[1].is_number()) {
            p.b = iv[1].get<double>();
        } else {
            throw ConfigError(ip, "expected [a, b] with b a number or \"inf\"");
        }
        if (!std::isfinite(p.a) || !(p.b > p.a)) throw ConfigError(ip, "need a finite a < b");
    }
    if (j.contains("n_points")) p.n_points = static_cast<int>(integer_at(j, path, "n_points", 100, 100'000'000));
    if (j.contains("samples_h")) {
        p.samples_h = number_at(j, path, "samples_h");
        if (!(p.samples_h > 0.0)) throw ConfigError(path + ".samples_h", "must be positive");
    }
    if (j.contains("epsilons")) {
        p.epsilons = number_list(j, path, "epsilons");
        if (p.epsilons.empty()) throw ConfigError(path + ".epsilons", "expected at least one value");
        for (std::size_t i = 0; i < p.epsilons.size(); ++i)
            if (!(p.epsilons[i] > 0.0)) throw ConfigError(index_path(path + ".epsilons", i), "must be positive");
    }
    p.export_pencil = bool_or(j, path, "export_pencil", false);
    return p;
}

// Caps grid sizes well beyond anything the solvers handle on a desktop.
void check_grid(const DomainSpec& dom, double h, const std::string& field) {
    const Box& b = dom.bounding_box();
    const double cells = std::ceil(b.width() / h) * std::ceil(b.height() / h);
    if (cells > 2.5e7) throw ConfigError(field, "grid would have more than 2.5e7 cells");
}

}  // namespace

JobConfig parse_config(const json& doc, const std::string& source_bytes) {
    require_object(doc, "");
    reject_unknown(doc, "", {"name", "task", "model", "domain", "params", "output", "$schema"});
    JobConfig cfg;
    cfg.source_sha256 = sha256_hex(source_bytes.empty() ? doc.dump() : source_bytes);
    if (doc.contains("name")) cfg.name = string_at(doc, "", "name");

    const std::string task = string_at(doc, "", "task");
    const auto& names = task_names();
    const auto it = std::find(names.begin(), names.end(), task);
    if (it == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("task", "unknown task '" + task + "' (valid: " + list + ")");
    }
    cfg.task = static_cast<Task>(it - names.begin());

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        require_object(o, "output");
        reject_unknown(o, "output", {"dir"});
        if (o.contains("dir")) cfg.output_dir = string_at(o, "output", "dir");
    }

    std::vector<TestFunctionSpec> tests;
    cfg.params = parse_params(doc, "params", tests);
    cfg.params.test_functions = tests;

    ManifoldModel model = [&] {
        try {
            return parse_model(doc);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("model", e.what());
        }
    }();

    if (cfg.task == Task::hardy1d) {
        if (cfg.params.function.empty()) throw ConfigError("params.function", "required for task hardy1d");
        if (doc.contains("domain")) throw ConfigError("domain", "task hardy1d takes no domain");
        return cfg;
    }

    cfg.domain = std::make_shared<const DomainSpec>(parse_domain(doc, model, cfg.name));
    const DomainSpec& dom = *cfg.domain;

    if (cfg.params.gamma_only && !dom.has_gamma_subset())
        throw ConfigError("params.gamma_only", "the domain has no boundary segment outside Γ");

    switch (cfg.task) {
        case Task::weight:
            check_grid(dom, cfg.params.h, "params.h");
            break;
        case Task::hardy:
            check_grid(dom, cfg.params.h, "params.h");
            if (cfg.params.test_functions.empty())
                throw ConfigError("params.test_functions", "task hardy needs at least one test function");
            for (const auto& t : cfg.params.test_functions)
                cfg.test_functions.push_back(TestFunction::make(t.name, t.expression, t.support));
            break;
        case Task::classify:
            check_grid(dom, cfg.params.h, "params.h");
            break;
        case Task::spectrum:
            if (dom.unbounded()) throw ConfigError("domain", "task spectrum needs a bounded domain");
            check_grid(dom, cfg.params.h, "params.h");
            if (!cfg.params.cut_levels.empty() && !dom.has_ideal_vertices())
                throw ConfigError("params.cut_levels", "cut levels need a polygon with ideal vertices");
            break;
        case Task::croke:
            if (dom.unbounded()) throw ConfigError("domain", "task croke needs a bounded domain");
            check_grid(dom, cfg.params.samples_h, "params.samples_h");
            break;
        case Task::santalo:
            if (cfg.params.integrand == "1")
                cfg.integrand = TangentIntegrand::constant(1.0);
            else
                cfg.integrand = TangentIntegrand::basepoint(cfg.params.integrand);
            break;
        case Task::hardy1d:
            break;
    }
    return cfg;
}

JobConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    JobConfig cfg = parse_config(doc, bytes);
    cfg.source = path;
    if (cfg.name.empty()) cfg.name = path.stem().string();
    return cfg;
}

fs::path resolve_output_dir(const JobConfig& cfg, const RunOptions& opts) {
    if (opts.out_dir) return *opts.out_dir;
    if (const char* env = std::getenv("HARDYSCOPE_OUT_DIR"); env && *env) return fs::path(env);
    return cfg.output_dir;
}

namespace {

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void text(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + p.string());
        out << content;
        out.close();
        if (!out) throw Error("write failed for " + p.string());
        files_.push_back({name, sha256_hex(content), static_cast<std::uintmax_t>(content.size())});
    }
    void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

    const std::vector<ManifestFile>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<ManifestFile> files_;
};

using Checks = std::vector<std::pair<std::string, bool>>;

json params_json(const JobConfig& cfg, std::uint64_t seed) {
    const JobParams& p = cfg.params;
    json j;
    j["h"] = p.h;
    j["n_dirs"] = p.n_dirs;
    j["t_max"] = json_number(cfg.effective_t_max());
    j["gamma_only"] = p.gamma_only;
    j["seed"] = seed;
    return j;
}

Checks run_weight(const JobConfig& cfg, ArtifactWriter& w) {
    const DomainSpec& dom = *cfg.domain;
    const auto quad = DirectionQuadrature::make(cfg.params.n_dirs, cfg.effective_t_max());
    const WeightField field = weight_field(dom, cfg.params.h, quad, cfg.params.gamma_only);
    std::ostringstream csv;
    write_weight_csv(csv, field);
    w.text("weight.csv", csv.str());

    double min_ratio = kInfinity, max_ratio = 0.0;
    int capped = 0, perturbed = 0, infinite = 0, below = 0;
    for (const auto& n : field.nodes) {
        if (n.w.flags & weight_capped) ++capped;
        if (n.w.flags & weight_perturbed) ++perturbed;
        if (n.w.flags & weight_infinite) ++infinite;
        const double ratio = n.w.m / n.d;
        min_ratio = std::min(min_ratio, ratio);
        if (std::isfinite(ratio)) max_ratio = std::max(max_ratio, ratio);
        if (n.w.m < n.d * (1.0 - 1e-9)) ++below;
    }
    json s;
    s["nodes"] = field.nodes.size();
    s["nx"] = field.nx;
    s["ny"] = field.ny;
    s["min_m_over_d"] = json_number(min_ratio);
    s["max_finite_m_over_d"] = json_number(max_ratio);
    s["capped_nodes"] = capped;
    s["perturbed_nodes"] = perturbed;
    s["infinite_nodes"] = infinite;
    s["nodes_with_m_below_d"] = below;
    w.json_file("weight_summary.json", s);
    return {{"m_ge_d", below == 0}};
}

Checks run_hardy(const JobConfig& cfg, ArtifactWriter& w) {
    const DomainSpec& dom = *cfg.domain;
    const auto quad = DirectionQuadrature::make(cfg.params.n_dirs, cfg.effective_t_max());
    const WeightField field = weight_field(dom, cfg.params.h, quad, cfg.params.gamma_only);
    std::ostringstream csv;
    write_weight_csv(csv, field);
    w.text("weight.csv", csv.str());

    json reports = json::array();
    int violations = 0;
    for (const auto& f : cfg.test_functions) {
        const HardyReport r = hardy_report(dom, f, field);
        if (!r.holds()) ++violations;
        reports.push_back(to_json(r));
    }
    json out;
    out["reports"] = reports;
    out["violations"] = violations;
    w.json_file("hardy.json", out);
    return {{"hardy_inequality", violations == 0}};
}

Checks run_classify(const JobConfig& cfg, std::uint64_t seed, ArtifactWriter& w) {
    ClassifySettings s;
    s.epsilons = cfg.params.epsilons;
    s.field_h = cfg.params.h;
    s.n_dirs = cfg.params.n_dirs;
    s.qb.seed = seed;
    if (cfg.params.n_samples) s.qb.n_samples = static_cast<int>(std::min<long long>(*cfg.params.n_samples, 1 << 20));
    const Certificate c = classify_domain(*cfg.domain, s);
    w.json_file("certificate.json", to_json(c));

    std::optional<QbVerdict> qb;
    std::optional<BdrVerdict> bdr;
    if (c.qb) qb = c.qb->verdict;
    if (c.bdr) bdr = c.bdr->verdict;
    Checks checks{{"verdict_consistent", combine_verdict(is_compact_case(*cfg.domain), qb, bdr) == c.verdict}};
    if (c.bdr) checks.emplace_back("bdr_c_at_least_one", c.bdr->c_estimate >= 1.0 - 1e-6);
    return checks;
}

Checks run_spectrum(const JobConfig& cfg, std::uint64_t seed, ArtifactWriter& w) {
    const DomainSpec& dom = *cfg.domain;
    EigenSettings es;
    es.seed = seed;
    if (!cfg.params.cut_levels.empty()) {
        TruncationSettings ts;
        ts.eigen = es;
        const TruncationTable t = truncation_study(dom, cfg.params.cut_levels, cfg.params.h, cfg.params.k, ts);
        std::ostringstream csv;
        write_truncation_csv(csv, t);
        w.text("convergence.csv", csv.str());
        w.json_file("truncation.json", to_json(t));
        return {{"monotone", t.monotone}, {"cauchy", t.cauchy.value_or(true)}};
    }
    const Discretized disc = assemble_pencil(dom, cfg.params.h);
    const EigenResult r = lowest_eigenvalues(disc.pencil, cfg.params.k, es);
    json j = to_json(r);
    j["nodes"] = disc.grid.nodes.size();
    w.json_file("eigenvalues.json", j);
    if (cfg.params.export_pencil) {
        std::ostringstream trip;
        write_triplets(trip, disc.pencil);
        w.text("pencil.txt", trip.str());
    }
    bool ascending = true, converged = true;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        if (!(r.values[i] > 0.0) || (i > 0 && r.values[i] < r.values[i - 1])) ascending = false;
        if (!(r.residual_norms[i] <= es.tol * std::max(1.0, r.values[i]))) converged = false;
    }
    return {{"positive_ascending", ascending}, {"residuals_converged", converged}};
}

Checks run_croke(const JobConfig& cfg, std::uint64_t seed, ArtifactWriter& w) {
    const DomainSpec& dom = *cfg.domain;
    const auto quad = DirectionQuadrature::make(cfg.params.n_dirs, cfg.effective_t_max());
    const auto samples = interior_samples(dom, cfg.params.samples_h);
    const CrokeReport r = croke_bound(dom, quad, samples);
    json j = to_json(r);
    Checks checks{{"bound_positive", r.bound > 0.0 && std::isfinite(r.bound)}};
    // Compare against lambda_1 of the same domain when it has no cusps to resolve.
    if (!dom.has_ideal_vertices()) {
        EigenSettings es;
        es.seed = seed;
        const Discretized disc = assemble_pencil(dom, cfg.params.h);
        const EigenResult e = lowest_eigenvalues(disc.pencil, 1, es);
        j["lambda1"] = json_number(e.values[0]);
        j["lambda1_h"] = cfg.params.h;
        checks.emplace_back("bound_le_lambda1", r.bound <= e.values[0]);
    }
    w.json_file("croke.json", j);
    return checks;
}

Checks run_santalo(const JobConfig& cfg, std::uint64_t seed, ArtifactWriter& w) {
    const SantaloReport r = santalo_compare(*cfg.domain, *cfg.integrand, cfg.params.n_samples.value_or(1000000), seed);
    w.json_file("santalo.json", to_json(r));
    return {{"agree_3_sigma", r.agrees(3.0)}};
}

Checks run_hardy1d(const JobConfig& cfg, ArtifactWriter& w) {
    const Expression f = Expression::parse(cfg.params.function, {"x"});
    const Hardy1DReport r = hardy_1d([&](double x) { return f(x); }, cfg.params.a, cfg.params.b, cfg.params.n_points);
    json j = to_json(r);
    j["function"] = cfg.params.function;
    j["a"] = json_number(cfg.params.a);
    j["b"] = json_number(cfg.params.b);
    w.json_file("hardy1d.json", j);
    return {{"ratio_at_least_one", r.ratio >= 1.0 - 1e-6}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ReportBundle run_job(const JobConfig& cfg, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    ReportBundle bundle;
    bundle.output_dir = resolve_output_dir(cfg, opts);
    const std::uint64_t seed = opts.seed.value_or(cfg.params.seed);
    set_thread_count(opts.threads.value_or(0));

    ArtifactWriter writer(bundle.output_dir);
    Checks checks;
    json error = nullptr;
    try {
        switch (cfg.task) {
            case Task::weight: checks = run_weight(cfg, writer); break;
            case Task::hardy: checks = run_hardy(cfg, writer); break;
            case Task::classify: checks = run_classify(cfg, seed, writer); break;
            case Task::spectrum: checks = run_spectrum(cfg, seed, writer); break;
            case Task::croke: checks = run_croke(cfg, seed, writer); break;
            case Task::santalo: checks = run_santalo(cfg, seed, writer); break;
            case Task::hardy1d: checks = run_hardy1d(cfg, writer); break;
        }
    } catch (const ConvergenceError& e) {
        error = {{"type", "convergence"}, {"message", e.what()}, {"iterations", e.partial().iterations}};
    } catch (const PreconditionError& e) {
        error = {{"type", "precondition"}, {"message", e.what()}};
    } catch (const std::exception& e) {
        error = {{"type", "computation"}, {"message", e.what()}};
    }

    bundle.failed_with_error = !error.is_null();
    bundle.checks_passed = !bundle.failed_with_error;
    json checks_json = json::object();
    for (const auto& [name, ok] : checks) {
        checks_json[name] = ok;
        bundle.checks_passed = bundle.checks_passed && ok;
    }
    bundle.files = writer.files();

    json files = json::array();
    for (const auto& f : bundle.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});

    json m;
    m["tool"] = "hardyscope";
    m["version"] = HARDYSCOPE_VERSION;
    m["name"] = cfg.name;
    m["task"] = to_string(cfg.task);
    m["config_sha256"] = cfg.source_sha256;
    m["seed"] = seed;
    m["threads"] = thread_count();
    m["params"] = params_json(cfg, seed);
    m["timestamp"] = utc_timestamp();
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m["status"] = bundle.failed_with_error ? "error" : (bundle.checks_passed ? "ok" : "checks_failed");
    m["checks"] = checks_json;
    m["files"] = files;
    m["error"] = error;
    bundle.manifest = m;

    std::ofstream out(bundle.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    return bundle;
}

}  // namespace hardyscope::job

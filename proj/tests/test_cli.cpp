#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "job.hpp"
#include "sha256.hpp"

using namespace hardyscope;
using namespace hardyscope::job;
namespace fs = std::filesystem;

namespace {

const fs::path jobs_dir{HARDYSCOPE_JOBS_DIR};
const fs::path fixtures_dir{HARDYSCOPE_FIXTURES_DIR};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "hardyscope_test_cli" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string config_error(const nlohmann::json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("defaults of a minimal config") {
    const auto cfg = load_config(jobs_dir / "unit_square_weight.json");
    CHECK(cfg.task == Task::weight);
    CHECK(cfg.params.n_dirs == 720);
    CHECK_FALSE(cfg.params.t_max.has_value());
    CHECK(cfg.effective_t_max() == default_t_max(*cfg.domain));
    CHECK(cfg.source_sha256 == sha256_file(jobs_dir / "unit_square_weight.json"));
}

TEST_CASE("ideal triangle config") {
    const auto cfg = load_config(jobs_dir / "ideal_triangle_classify.json");
    REQUIRE(cfg.domain);
    int ideal = 0;
    for (const auto& v : cfg.domain->vertices()) ideal += v.ideal;
    CHECK(ideal == 3);
    CHECK(cfg.domain->segments().size() == 3);
}

TEST_CASE("every shipped job validates") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(jobs_dir)) {
        if (entry.path().extension() != ".json") continue;
        CHECK_NOTHROW(load_config(entry.path()));
        ++count;
    }
    CHECK(count >= 10);
}

TEST_CASE("config errors name the field") {
    try {
        load_config(fixtures_dir / "bad_lambda.json");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "model.lambda");
        CHECK(std::string(e.what()).rfind("model.lambda: parse error", 0) == 0);
    }

    const auto base = nlohmann::json{{"name", "x"}, {"task", "weight"}, {"domain", {{"preset", {{"name", "unit_disk"}}}}}};
    auto doc = base;
    doc["task"] = "foo";
    CHECK(config_error(doc) ==
          "task: unknown task 'foo' (valid: weight, hardy, classify, spectrum, croke, santalo, hardy1d)");
    doc = base;
    doc["params"] = {{"n_dirs", 8}};
    CHECK(config_error(doc).rfind("params.n_dirs", 0) == 0);
    doc = base;
    doc["extra"] = 1;
    CHECK(config_error(doc).rfind("extra", 0) == 0);
    doc = base;
    doc["task"] = "spectrum";
    doc["domain"] = {{"preset", {{"name", "half_plane"}}}};
    CHECK_FALSE(config_error(doc).empty());
    doc = base;
    doc["task"] = "hardy";
    CHECK(config_error(doc).rfind("params.test_functions", 0) == 0);
}

TEST_CASE("weight run writes the centre value") {
    const auto cfg = load_config(jobs_dir / "unit_disk_weight.json");
    RunOptions opts;
    opts.out_dir = scratch("disk_weight");
    const auto bundle = run_job(cfg, opts);
    CHECK(bundle.exit_code() == 0);
    std::istringstream csv(slurp(*opts.out_dir / "weight.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,y,d,m,flags");
    bool found = false;
    while (std::getline(csv, line)) {
        double x, y, d, m;
        char c;
        std::istringstream row(line);
        row >> x >> c >> y >> c >> d >> c >> m;
        if (std::abs(x) < 1e-12 && std::abs(y) < 1e-12) {
            found = true;
            CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    CHECK(found);

    // Manifest hashes match the files on disk.
    const auto manifest = nlohmann::json::parse(slurp(*opts.out_dir / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["config_sha256"] == cfg.source_sha256);
    REQUIRE(manifest["files"].size() == 2);
    for (const auto& f : manifest["files"]) {
        const fs::path p = *opts.out_dir / f["path"].get<std::string>();
        CHECK(f["sha256"] == sha256_file(p));
        CHECK(f["bytes"] == fs::file_size(p));
    }
}

TEST_CASE("classify and spectrum runs") {
    RunOptions opts;
    opts.out_dir = scratch("triangle");
    auto bundle = run_job(load_config(jobs_dir / "ideal_triangle_classify.json"), opts);
    CHECK(bundle.exit_code() == 0);
    const auto cert = nlohmann::json::parse(slurp(*opts.out_dir / "certificate.json"));
    CHECK(cert["verdict"] == "discrete_spectrum_certified");

    opts.out_dir = scratch("square_spectrum");
    bundle = run_job(load_config(jobs_dir / "unit_square_spectrum.json"), opts);
    CHECK(bundle.exit_code() == 0);
    const auto eig = nlohmann::json::parse(slurp(*opts.out_dir / "eigenvalues.json"));
    const double two_pi2 = 2.0 * M_PI * M_PI;
    CHECK(std::abs(eig["values"][0].get<double>() - two_pi2) / two_pi2 < 0.01);
}

TEST_CASE("output directory resolution") {
    auto cfg = load_config(jobs_dir / "unit_square_weight.json");
    RunOptions opts;
    ::setenv("HARDYSCOPE_OUT_DIR", "/tmp/from_env", 1);
    CHECK(resolve_output_dir(cfg, opts) == fs::path("/tmp/from_env"));
    opts.out_dir = "/tmp/from_flag";
    CHECK(resolve_output_dir(cfg, opts) == fs::path("/tmp/from_flag"));
    ::unsetenv("HARDYSCOPE_OUT_DIR");
    CHECK(resolve_output_dir(cfg, RunOptions{}) == cfg.output_dir);
}

TEST_CASE("computation errors land in the manifest") {
    auto cfg = load_config(jobs_dir / "unit_square_weight.json");
    cfg.params.h = 1.0;  // every lattice node is a corner
    RunOptions opts;
    opts.out_dir = scratch("error");
    const auto bundle = run_job(cfg, opts);
    CHECK(bundle.exit_code() == 2);
    const auto manifest = nlohmann::json::parse(slurp(*opts.out_dir / "manifest.json"));
    CHECK(manifest["status"] == "error");
    CHECK(manifest["error"]["type"] == "precondition");
}

TEST_CASE("artifacts do not depend on the thread count") {
    const auto cfg = load_config(jobs_dir / "unit_disk_hardy.json");
    RunOptions a, b;
    a.out_dir = scratch("det1");
    a.threads = 1;
    b.out_dir = scratch("det4");
    b.threads = 4;
    const auto ra = run_job(cfg, a);
    const auto rb = run_job(cfg, b);
    REQUIRE(ra.files.size() == rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) CHECK(ra.files[i].sha256 == rb.files[i].sha256);
}

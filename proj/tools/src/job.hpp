#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardyscope/domain.hpp"
#include "hardyscope/errors.hpp"
#include "hardyscope/flowcheck.hpp"
#include "hardyscope/hardy.hpp"

namespace hardyscope::job {

// Config rejected before any computation; the message starts with the field path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what) : Error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Task { weight, hardy, classify, spectrum, croke, santalo, hardy1d };

std::string to_string(Task t);
const std::vector<std::string>& task_names();

struct TestFunctionSpec {
    std::string name;
    std::string expression;
    std::string support;
};

struct JobParams {
    double h = 0.05;
    int n_dirs = 720;
    std::optional<double> t_max;  // empty: default_t_max of the domain
    bool gamma_only = false;
    int k = 3;
    std::vector<double> cut_levels;
    std::uint64_t seed = 1;
    std::optional<long long> n_samples;  // task default when empty
    std::vector<TestFunctionSpec> test_functions;
    std::string integrand = "1";
    std::string function;         // hardy1d, in x
    double a = 0.0;
    double b = 1.0;               // may be infinite
    int n_points = 100000;
    double samples_h = 0.05;      // croke sample lattice
    std::vector<double> epsilons{0.4, 0.2, 0.1};
    bool export_pencil = false;
};

struct JobConfig {
    std::string name;
    Task task = Task::weight;
    std::filesystem::path source;
    std::string source_sha256;
    std::shared_ptr<const DomainSpec> domain;  // absent only for hardy1d
    JobParams params;
    std::filesystem::path output_dir = "out";

    // Built during validation so run_job never meets an unparsable expression.
    std::vector<TestFunction> test_functions;
    std::optional<TangentIntegrand> integrand;

    double effective_t_max() const;
};

JobConfig load_config(const std::filesystem::path& path);
// Same as load_config on an in-memory document.
JobConfig parse_config(const nlohmann::json& doc, const std::string& source_bytes = {});

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;  // beats the environment and the config
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

// Resolution order: --out, then HARDYSCOPE_OUT_DIR, then the config.
std::filesystem::path resolve_output_dir(const JobConfig& cfg, const RunOptions& opts);

struct ManifestFile {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct ReportBundle {
    std::filesystem::path output_dir;
    nlohmann::json manifest;
    std::vector<ManifestFile> files;
    bool checks_passed = false;
    bool failed_with_error = false;

    int exit_code() const { return failed_with_error ? 2 : (checks_passed ? 0 : 1); }
};

// Writes the task artifacts and manifest.json. Computation errors are
// captured into the manifest instead of propagating.
ReportBundle run_job(const JobConfig& cfg, const RunOptions& opts = {});

}  // namespace hardyscope::job

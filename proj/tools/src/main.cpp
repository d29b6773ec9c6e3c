#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "job.hpp"

namespace job = hardyscope::job;

namespace {

// Exit codes: 0 every check passed, 1 a check failed, 2 config or computation error.
int run(const std::string& config, const job::RunOptions& opts) {
    job::JobConfig cfg;
    try {
        cfg = job::load_config(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const job::ReportBundle bundle = job::run_job(cfg, opts);
    const auto& m = bundle.manifest;
    std::cout << m["task"].get<std::string>() << " " << m["status"].get<std::string>() << " -> "
              << bundle.output_dir.string() << "\n";
    for (const auto& [name, ok] : m["checks"].items())
        std::cout << "  " << (ok.get<bool>() ? "pass " : "FAIL ") << name << "\n";
    if (!m["error"].is_null()) std::cerr << "error: " << m["error"]["message"].get<std::string>() << "\n";
    return bundle.exit_code();
}

int validate(const std::string& config) {
    try {
        const job::JobConfig cfg = job::load_config(config);
        std::cout << "ok: task " << job::to_string(cfg.task);
        if (cfg.domain) {
            std::cout << ", " << cfg.domain->segments().size() << " segments, " << cfg.domain->vertices().size()
                      << " vertices";
            int ideal = 0;
            for (const auto& v : cfg.domain->vertices()) ideal += v.ideal ? 1 : 0;
            if (ideal) std::cout << " (" << ideal << " ideal)";
        }
        std::cout << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hardyscope: Hardy weights, spectra and domain classification on conformal surfaces"};
    app.set_version_flag("--version", std::string(HARDYSCOPE_VERSION));
    app.require_subcommand(1);

    std::string config;
    std::string out;
    unsigned threads = 0;
    std::uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "Run one job and write its artifacts and manifest");
    run_cmd->add_option("--config", config, "Job file (JSON)")->required()->check(CLI::ExistingFile);
    auto* out_opt = run_cmd->add_option("--out", out, "Output directory (overrides HARDYSCOPE_OUT_DIR and the config)");
    auto* threads_opt = run_cmd->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the job seed");

    auto* validate_cmd = app.add_subcommand("validate", "Check a job file without running it");
    validate_cmd->add_option("--config", config, "Job file (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    if (*validate_cmd) return validate(config);

    job::RunOptions opts;
    if (*out_opt) opts.out_dir = out;
    if (*threads_opt) opts.threads = threads;
    if (*seed_opt) opts.seed = seed;
    return run(config, opts);
}

// Batch front-end: one subcommand per invocation, chosen by the config file.
//
// Usage:
//   niche --config run.json [--seed N] [--out DIR] [--workers K] [--quiet]
//
// Exit status: 0 success, 1 validation failure, 2 configuration error,
// 3 runtime error.

#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "niche/config.hpp"
#include "niche/error.hpp"
#include "niche/io.hpp"
#include "niche/runner.hpp"

namespace {

int resolve_workers(int flag, int from_config) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("NICHE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw niche::ConfigError("NICHE_WORKERS must be a positive integer");
        return static_cast<int>(v);
    }
    if (from_config > 0) return from_config;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle and PDE simulations of diffusion with nonlocal Neumann conditions"};
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int workers = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--workers", workers, "worker threads (default: NICHE_WORKERS, then all cores)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "suppress per-snapshot summary lines");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    niche::RunConfig config;
    try {
        config = niche::parse_config(niche::read_text_file(config_path));
        if (*seed_opt) config.seed = seed;
        if (!out_dir.empty()) config.output_dir = out_dir;
        config.workers = resolve_workers(workers, config.workers);
    } catch (const niche::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    if (!quiet && !config.params.lambda_is_integer())
        std::cerr << "warning: lambda = h^(s-1) = " << niche::format_double(config.params.lambda())
                  << " is not an integer\n";

    try {
        return niche::run(config, std::cout, quiet);
    } catch (const niche::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

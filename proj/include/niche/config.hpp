#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/kernels.hpp"
#include "niche/particle_sim.hpp"
#include "niche/pde_solver.hpp"

namespace niche {

enum class Subcommand { Simulate, Solve, Compare, Validate, Constants, Phantom };

std::string to_string(Subcommand c);
Subcommand parse_subcommand(const std::string& name);

struct InitialSpec {
    enum class Kind { PointMass, Uniform };
    Kind kind = Kind::PointMass;
    Point x0;  ///< point-mass location

    InitialCondition to_condition() const;
    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

/// Everything one invocation needs. Keys that do not apply to the chosen
/// subcommand are rejected by the parser.
struct RunConfig {
    Subcommand subcommand = Subcommand::Simulate;
    Domain domain = Domain::interval(0.0, 1.0);
    ProcessParams params{0.5, 0.5, 1e-3};
    std::int64_t particles = 100000;
    double final_time = 0.1;
    std::vector<double> snapshots;
    InitialSpec initial;
    GridSpec grid;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int workers = 0;  ///< 0 selects the number of available cores
    std::optional<double> alpha_override, beta_override;
    std::string histogram_csv, field_csv;
    std::int64_t c_star_samples = 1'000'000;
    double compare_tolerance = 0.05;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse and validate a JSON document. Throws ConfigError naming the
/// offending key for unknown keys, missing required keys, wrong types and
/// out-of-range values.
RunConfig parse_config(const std::string& text);

/// JSON document that parse_config maps back to the same RunConfig.
std::string serialize_config(const RunConfig& config);

}  // namespace niche

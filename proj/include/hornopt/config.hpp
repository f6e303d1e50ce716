#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hornopt/optimize.hpp"

namespace hornopt {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

struct OptimizerSettings {
    int max_iters = 500;
    double tol = 1e-5;
    std::optional<double> penalty_weight;  // unset -> default scaling
    int restarts = 3;
    std::uint64_t seed = 1;
};

/// Everything a run needs, as read from an INI-style config file with
/// sections [model], [integrate], [optimize], [cli].
struct ProblemConfig {
    PhysicalParams params;
    std::vector<int> multipliers = {1, 2};
    ControlBounds bounds;
    double initial_diameter = 0.02;  // D(0)
    int grid_nodes = 513;
    OptimizerSettings opt;
    std::filesystem::path output_dir = "hornopt_out";

    HarmonicSpec harmonics() const { return HarmonicSpec::from_multipliers(multipliers, params); }
    Problem make_problem() const;
    OptimizeOptions make_options() const;

    void validate() const;

    bool operator==(const ProblemConfig&) const;
};

/// Parses and validates a config file.  Omitted fields take their defaults;
/// when `defaulted` is given it receives one "section.key" entry per
/// defaulted field.  Errors name the offending field.
ProblemConfig load_config(const std::filesystem::path& path,
                          std::vector<std::string>* defaulted = nullptr);

/// Writes every field explicitly; load_config(save_config(c)) == c.
void save_config(const ProblemConfig& config, const std::filesystem::path& path);

}  // namespace hornopt

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hornopt/config.hpp"
#include "hornopt/optimize.hpp"
#include "hornopt/spectral.hpp"

namespace hornopt {

/// Outcome of re-solving the spectrum of an optimized profile against the
/// prescribed wave numbers.
struct SpectralVerification {
    std::vector<double> requested;  // j_n * k0
    std::vector<double> computed;   // eigen_solve output
    std::vector<double> relative_error;
    double orthogonality = 0.0;
    bool solved = false;
    std::string note;
};

SpectralVerification verify_design(const DesignResult& result, const ProblemConfig& config);

/// Writes duct.csv, modes.csv, report.json and the duct/dprime/modes SVG
/// plots into `dir`; returns the emitted paths.
std::vector<std::filesystem::path> emit_artifacts(const DesignResult& result,
                                                  const SpectralVerification& spectral,
                                                  const ProblemConfig& config,
                                                  const std::filesystem::path& dir);

/// Full pipeline: optimize, verify, emit, print the one-line summary.
/// Exit code 0 = converged, 2 = feasible but not converged, 1 = error.
int run(const ProblemConfig& config);

}  // namespace hornopt

#include "hornopt/artifacts.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hornopt/log.hpp"
#include "hornopt/svg.hpp"

namespace hornopt {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

const char* arc_name(ArcKind kind) {
    switch (kind) {
        case ArcKind::bang_lower: return "bang_lower";
        case ArcKind::bang_upper: return "bang_upper";
        case ArcKind::singular: return "singular";
        default: return "interior";
    }
}

}  // namespace

SpectralVerification verify_design(const DesignResult& result, const ProblemConfig& config) {
    SpectralVerification verification;
    const HarmonicSpec harmonics = config.harmonics();
    verification.requested = harmonics.wave_numbers;

    BoreProfile profile;
    profile.grid = result.trajectory.grid;
    profile.diameter.reserve(result.trajectory.samples.size());
    for (const StateVector& s : result.trajectory.samples) {
        profile.diameter.push_back(s.diameter);
    }

    try {
        // solve the full spectrum up to a margin above the highest target;
        // the duct may support additional modes below the first target, so
        // each requested k is matched to its nearest computed eigenvalue
        const double k_max = harmonics.wave_numbers.back();
        const double ceiling = 1.3 * k_max + 4.0 * M_PI / profile.grid.length;
        const int n_below =
            static_cast<int>(std::ceil(ceiling * profile.grid.length / M_PI)) + 2;
        auto pairs = eigen_solve(profile, n_below, 2.0 * ceiling + 8.0 * M_PI);
        for (double requested : verification.requested) {
            double best_k = pairs.front().wave_number;
            for (const EigenPair& p : pairs) {
                if (std::abs(p.wave_number - requested) < std::abs(best_k - requested)) {
                    best_k = p.wave_number;
                }
            }
            verification.computed.push_back(best_k);
            verification.relative_error.push_back(std::abs(best_k - requested) / requested);
        }
        verification.orthogonality = orthogonality_check(pairs, profile);
        verification.solved = true;
    } catch (const std::exception& e) {
        verification.note = e.what();
        log_warn(std::string("spectral verification failed: ") + e.what());
    }
    return verification;
}

std::vector<std::filesystem::path> emit_artifacts(const DesignResult& result,
                                                  const SpectralVerification& spectral,
                                                  const ProblemConfig& config,
                                                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    const Grid& grid = result.trajectory.grid;
    const std::size_t m = result.trajectory.samples.size();
    const std::size_t n_modes = result.trajectory.samples.front().modes.size();

    std::vector<double> xs(m), diameters(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = grid.node(static_cast<int>(i));
        diameters[i] = result.trajectory.samples[i].diameter;
    }

    // duct.csv: x, D, Dprime
    {
        std::ostringstream csv;
        csv << "x,D,Dprime\n";
        for (std::size_t i = 0; i < m; ++i) {
            csv << num(xs[i]) << ',' << num(diameters[i]) << ',' << num(result.decision.control[i])
                << '\n';
        }
        write_text(dir / "duct.csv", csv.str());
        written.push_back(dir / "duct.csv");
    }

    // modes.csv: x, phi_1..phi_N, dphi_1..dphi_N, each mode scaled to 1 at x = 0
    std::vector<double> scale(n_modes, 1.0);
    bool zero_mode = false;
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double at_zero = result.trajectory.samples[0].modes[n].phi;
        if (at_zero == 0.0) {
            zero_mode = true;
            scale[n] = 0.0;  // emit the raw all-zero column
        } else {
            scale[n] = 1.0 / at_zero;
        }
    }
    if (zero_mode) {
        log_warn("modes.csv: a mode vanishes at x = 0; emitting unnormalized (zero) column");
    }
    {
        std::ostringstream csv;
        csv << "x";
        for (std::size_t n = 1; n <= n_modes; ++n) csv << ",phi_" << n;
        for (std::size_t n = 1; n <= n_modes; ++n) csv << ",dphi_" << n;
        csv << '\n';
        for (std::size_t i = 0; i < m; ++i) {
            csv << num(xs[i]);
            const StateVector& s = result.trajectory.samples[i];
            for (std::size_t n = 0; n < n_modes; ++n) {
                csv << ',' << num(scale[n] == 0.0 ? s.modes[n].phi : s.modes[n].phi * scale[n]);
            }
            for (std::size_t n = 0; n < n_modes; ++n) {
                csv << ',' << num(scale[n] == 0.0 ? s.modes[n].dphi : s.modes[n].dphi * scale[n]);
            }
            csv << '\n';
        }
        write_text(dir / "modes.csv", csv.str());
        written.push_back(dir / "modes.csv");
    }

    // report.json
    {
        ordered_json report;
        report["objective"] = {
            {"energy", result.report.energy},
            {"penalty", result.report.penalty},
            {"penalized", result.report.penalized},
            {"terminal_residuals", result.report.terminal_residuals},
            {"gradient_norm",
             result.report.gradient_norm ? ordered_json(*result.report.gradient_norm)
                                         : ordered_json(nullptr)},
        };
        report["iterations"] = result.iterations;
        report["converged"] = result.converged;
        report["validity"] = result.validity;
        report["seed"] = result.seed;

        int bang_lower = 0;
        int bang_upper = 0;
        int singular = 0;
        ordered_json arcs = ordered_json::array();
        for (ArcKind a : result.arcs) {
            arcs.push_back(arc_name(a));
            bang_lower += a == ArcKind::bang_lower;
            bang_upper += a == ArcKind::bang_upper;
            singular += a == ArcKind::singular;
        }
        report["arcs"] = {{"per_node", arcs},
                          {"bang_lower_nodes", bang_lower},
                          {"bang_upper_nodes", bang_upper},
                          {"singular_nodes", singular}};

        report["decision"] = {{"control", result.decision.control},
                              {"coefficients", result.decision.coefficients},
                              {"initial_modes", result.decision.initial_modes}};

        ordered_json restarts = ordered_json::array();
        for (const RestartRecord& r : result.restart_log) {
            restarts.push_back({{"index", r.index},
                                {"seed", r.seed},
                                {"penalized", r.penalized},
                                {"energy", r.energy},
                                {"iterations", r.iterations},
                                {"converged", r.converged},
                                {"feasible", r.feasible},
                                {"touches_lower", r.touches_lower},
                                {"touches_upper", r.touches_upper}});
        }
        report["restarts"] = restarts;
        report["objective_history"] = result.objective_history;

        report["spectral"] = {{"solved", spectral.solved},
                              {"requested_wave_numbers", spectral.requested},
                              {"computed_wave_numbers", spectral.computed},
                              {"relative_error", spectral.relative_error},
                              {"orthogonality", spectral.orthogonality},
                              {"note", spectral.note}};

        report["config"] = {
            {"rho0", config.params.density},
            {"sound_speed", config.params.sound_speed},
            {"f0", config.params.fundamental},
            {"length", config.params.length},
            {"d0", config.initial_diameter},
            {"multipliers", config.multipliers},
            {"d_lo", config.bounds.lower},
            {"d_hi", config.bounds.upper},
            {"floor", config.bounds.diameter_floor},
            {"grid_m", config.grid_nodes},
            {"max_iters", config.opt.max_iters},
            {"tol", config.opt.tol},
            {"penalty_w", config.opt.penalty_weight ? ordered_json(*config.opt.penalty_weight)
                                                    : ordered_json("auto")},
            {"restarts", config.opt.restarts},
            {"seed", config.opt.seed},
        };

        write_text(dir / "report.json", report.dump(2) + "\n");
        written.push_back(dir / "report.json");
    }

    // plots
    {
        svg::LinePlot duct;
        duct.title = "Duct shape, " + std::to_string(n_modes) + " components";
        duct.x_label = "x (m)";
        duct.y_label = "D (m)";
        duct.series.push_back({"D(x)", "#1f6fb2", xs, diameters});
        duct.write(dir / "duct.svg");
        written.push_back(dir / "duct.svg");

        svg::LinePlot dprime;
        dprime.title = "Diameter derivative, " + std::to_string(n_modes) + " components";
        dprime.x_label = "x (m)";
        dprime.y_label = "D' (dimensionless)";
        dprime.series.push_back({"D'(x)", "#1f6fb2", xs, result.decision.control});
        dprime.guide_lines = {config.bounds.lower, config.bounds.upper};
        dprime.write(dir / "dprime.svg");
        written.push_back(dir / "dprime.svg");

        svg::LinePlot modes_plot;
        modes_plot.title = "Modal shapes, " + std::to_string(n_modes) + " components";
        modes_plot.x_label = "x (m)";
        modes_plot.y_label = "phi_n (scaled to 1 at x = 0)";
        static constexpr const char* kColors[] = {"#1f6fb2", "#c03030", "#2e8b57", "#8a2be2",
                                                  "#d2691e", "#008b8b", "#b8860b", "#4b0082",
                                                  "#708090", "#dc143c"};
        for (std::size_t n = 0; n < n_modes; ++n) {
            std::vector<double> phi(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double raw = result.trajectory.samples[i].modes[n].phi;
                phi[i] = scale[n] == 0.0 ? raw : raw * scale[n];
            }
            modes_plot.series.push_back(
                {"phi_" + std::to_string(n + 1), kColors[n % 10], xs, std::move(phi)});
        }
        modes_plot.write(dir / "modes.svg");
        written.push_back(dir / "modes.svg");
    }

    return written;
}

int run(const ProblemConfig& config) {
    try {
        config.validate();
        const Problem problem = config.make_problem();
        const OptimizeOptions options = config.make_options();

        log_info("optimizing: N = " + std::to_string(problem.harmonics.mode_count()) +
                 ", m = " + std::to_string(problem.grid.node_count) +
                 ", restarts = " + std::to_string(options.restarts));
        const DesignResult result = optimize(problem, options);
        const SpectralVerification spectral = verify_design(result, config);
        emit_artifacts(result, spectral, config, config.output_dir);

        double max_residual = 0.0;
        for (double r : result.report.terminal_residuals) {
            max_residual = std::max(max_residual, std::abs(r));
        }
        std::cout << "J = " << result.report.penalized << ", E = " << result.report.energy
                  << ", iterations = " << result.iterations
                  << ", converged = " << (result.converged ? "yes" : "no")
                  << ", validity = " << result.validity << ", max|phi_n(L)| = " << max_residual
                  << " -> " << config.output_dir.string() << "\n";
        return result.converged ? 0 : 2;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

}  // namespace hornopt

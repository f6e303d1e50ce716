#include "hornopt/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hornopt/log.hpp"

namespace hornopt {

double default_penalty_weight(const Problem& problem) {
    const double k_max = problem.harmonics.wave_numbers.back();
    return 1e3 * (M_PI * problem.params.density / 8.0) * problem.initial_diameter *
           problem.initial_diameter * k_max * k_max * problem.params.length;
}

namespace {

void normalize_to_sphere(std::vector<double>& v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
    } else {
        const double uniform = 1.0 / std::sqrt(static_cast<double>(v.size()));
        for (double& x : v) x = uniform;
    }
}

StateVector assemble_initial_state(const DecisionVector& decision, const Problem& problem) {
    StateVector initial;
    initial.diameter = problem.initial_diameter;
    initial.modes.resize(decision.initial_modes.size());
    for (std::size_t n = 0; n < decision.initial_modes.size(); ++n) {
        initial.modes[n].phi = decision.initial_modes[n];
        initial.modes[n].dphi = 0.0;  // closed end: phi'(0) = 0
    }
    return initial;
}

void check_decision_shape(const DecisionVector& decision, const Problem& problem) {
    const std::size_t m = static_cast<std::size_t>(problem.grid.node_count);
    const std::size_t n = static_cast<std::size_t>(problem.harmonics.mode_count());
    if (decision.control.size() != m) {
        throw GridMismatchError("decision.control", decision.control.size(), m);
    }
    if (decision.coefficients.size() != n || decision.initial_modes.size() != n) {
        throw std::invalid_argument("decision: coefficient/initial-mode blocks must have " +
                                    std::to_string(n) + " entries");
    }
}

ObjectiveReport make_report(const Trajectory& trajectory, const DecisionVector& decision,
                            const Problem& problem, double penalty_weight) {
    const std::size_t m = trajectory.samples.size();
    const Coefficients coeffs{decision.coefficients};

    std::vector<double> density(m);
    for (std::size_t i = 0; i < m; ++i) {
        density[i] =
            energy_integrand(trajectory.samples[i], coeffs, problem.harmonics, problem.params);
    }

    ObjectiveReport report;
    report.energy = quadrature(density, trajectory.grid);
    const StateVector& last = trajectory.samples.back();
    report.terminal_residuals.reserve(last.modes.size());
    double residual_sq = 0.0;
    for (const ModeAmplitude& mode : last.modes) {
        report.terminal_residuals.push_back(mode.phi);
        residual_sq += mode.phi * mode.phi;
    }
    report.penalty = penalty_weight * residual_sq;
    report.penalized = report.energy - report.penalty;
    return report;
}

double trapezoid_mass(const Grid& grid, int i) {
    const double h = grid.spacing();
    return (i == 0 || i == grid.node_count - 1) ? 0.5 * h : h;
}

}  // namespace

DecisionVector project(DecisionVector decision, const ControlBounds& bounds) {
    for (double& u : decision.control) u = std::clamp(u, bounds.lower, bounds.upper);
    normalize_to_sphere(decision.coefficients);
    normalize_to_sphere(decision.initial_modes);
    return decision;
}

std::pair<ObjectiveReport, Trajectory> penalized_objective(const DecisionVector& decision,
                                                           const Problem& problem,
                                                           double penalty_weight) {
    check_decision_shape(decision, problem);
    Trajectory trajectory =
        integrate_state(decision.control, assemble_initial_state(decision, problem), problem.grid,
                        problem.harmonics, problem.bounds.diameter_floor);
    ObjectiveReport report = make_report(trajectory, decision, problem, penalty_weight);
    return {std::move(report), std::move(trajectory)};
}

std::pair<ObjectiveReport, DecisionVector> objective_gradient(const DecisionVector& decision,
                                                              const Problem& problem,
                                                              double penalty_weight) {
    auto [report, trajectory] = penalized_objective(decision, problem, penalty_weight);

    const Grid& grid = trajectory.grid;
    const std::size_t m = trajectory.samples.size();
    const std::size_t n_modes = static_cast<std::size_t>(problem.harmonics.mode_count());
    const double h = grid.spacing();
    const Coefficients coeffs{decision.coefficients};
    const auto& ks = problem.harmonics.wave_numbers;

    DecisionVector gradient;
    gradient.control.assign(m, 0.0);
    gradient.coefficients.assign(n_modes, 0.0);
    gradient.initial_modes.assign(n_modes, 0.0);

    // Terminal costate: transversality plus the penalty's terminal term,
    // and the trailing quadrature weight of the energy integrand.
    CostateVector lambda = energy_integrand_state_gradient(
        trajectory.samples[m - 1], coeffs, problem.harmonics, problem.params);
    {
        const double w_node = trapezoid_mass(grid, static_cast<int>(m - 1));
        lambda.mu_diameter *= w_node;
        for (std::size_t n = 0; n < n_modes; ++n) {
            lambda.modes[n].mu_phi *= w_node;
            lambda.modes[n].mu_dphi *= w_node;
            lambda.modes[n].mu_phi +=
                -2.0 * penalty_weight * trajectory.samples[m - 1].modes[n].phi;
        }
    }

    // Reverse sweep transposing the predictor-corrector step exactly, so the
    // control gradient matches finite differences of the discrete objective.
    for (std::size_t i = m - 1; i > 0; --i) {
        const StateVector& x = trajectory.samples[i - 1];
        const double u_here = decision.control[i - 1];
        const double u_next = decision.control[i];

        const StateVector f1 = webster_rhs(x, u_here, problem.harmonics);
        StateVector predicted;
        predicted.diameter = x.diameter + h * f1.diameter;
        predicted.modes.resize(n_modes);
        for (std::size_t n = 0; n < n_modes; ++n) {
            predicted.modes[n].phi = x.modes[n].phi + h * f1.modes[n].phi;
            predicted.modes[n].dphi = x.modes[n].dphi + h * f1.modes[n].dphi;
        }

        gradient.control[i] += 0.5 * h * switching_value(predicted, lambda);

        const CostateVector tilde_vjp =
            webster_rhs_state_vjp(predicted, u_next, problem.harmonics, lambda);

        CostateVector carried;  // lambda + h * tilde_vjp
        carried.mu_diameter = lambda.mu_diameter + h * tilde_vjp.mu_diameter;
        carried.modes.resize(n_modes);
        for (std::size_t n = 0; n < n_modes; ++n) {
            carried.modes[n].mu_phi = lambda.modes[n].mu_phi + h * tilde_vjp.modes[n].mu_phi;
            carried.modes[n].mu_dphi = lambda.modes[n].mu_dphi + h * tilde_vjp.modes[n].mu_dphi;
        }

        gradient.control[i - 1] += 0.5 * h * switching_value(x, carried);

        const CostateVector node_vjp =
            webster_rhs_state_vjp(x, u_here, problem.harmonics, carried);
        CostateVector forcing =
            energy_integrand_state_gradient(x, coeffs, problem.harmonics, problem.params);
        const double w_node = trapezoid_mass(grid, static_cast<int>(i - 1));

        lambda.mu_diameter += 0.5 * h * (tilde_vjp.mu_diameter + node_vjp.mu_diameter) +
                              w_node * forcing.mu_diameter;
        for (std::size_t n = 0; n < n_modes; ++n) {
            lambda.modes[n].mu_phi +=
                0.5 * h * (tilde_vjp.modes[n].mu_phi + node_vjp.modes[n].mu_phi) +
                w_node * forcing.modes[n].mu_phi;
            lambda.modes[n].mu_dphi +=
                0.5 * h * (tilde_vjp.modes[n].mu_dphi + node_vjp.modes[n].mu_dphi) +
                w_node * forcing.modes[n].mu_dphi;
        }
    }

    for (std::size_t n = 0; n < n_modes; ++n) {
        gradient.initial_modes[n] = lambda.modes[n].mu_phi;
    }

    // dJ/dc_n: c enters the energy integrand only.
    for (std::size_t n = 0; n < n_modes; ++n) {
        std::vector<double> density(m);
        for (std::size_t i = 0; i < m; ++i) {
            const StateVector& s = trajectory.samples[i];
            density[i] = M_PI * problem.params.density / 4.0 * decision.coefficients[n] *
                         s.diameter * s.diameter *
                         (s.modes[n].dphi * s.modes[n].dphi +
                          ks[n] * ks[n] * s.modes[n].phi * s.modes[n].phi);
        }
        gradient.coefficients[n] = quadrature(density, grid);
    }

    double norm_sq = 0.0;
    for (double v : gradient.control) norm_sq += v * v;
    for (double v : gradient.coefficients) norm_sq += v * v;
    for (double v : gradient.initial_modes) norm_sq += v * v;
    report.gradient_norm = std::sqrt(norm_sq);

    return {std::move(report), std::move(gradient)};
}

std::vector<ArcKind> classify_arcs(const DecisionVector& decision, const Problem& problem,
                                   double penalty_weight) {
    auto [report, gradient] = objective_gradient(decision, problem, penalty_weight);
    const std::size_t m = decision.control.size();

    std::vector<double> switching(m);
    double max_switch = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        switching[i] =
            gradient.control[i] / trapezoid_mass(problem.grid, static_cast<int>(i));
        max_switch = std::max(max_switch, std::abs(switching[i]));
    }

    constexpr double kBoundEps = 1e-12;
    std::vector<ArcKind> arcs(m, ArcKind::interior);
    for (std::size_t i = 0; i < m; ++i) {
        if (decision.control[i] <= problem.bounds.lower + kBoundEps) {
            arcs[i] = ArcKind::bang_lower;
        } else if (decision.control[i] >= problem.bounds.upper - kBoundEps) {
            arcs[i] = ArcKind::bang_upper;
        } else if (std::abs(switching[i]) < 1e-6 * max_switch) {
            arcs[i] = ArcKind::singular;
        }
    }
    return arcs;
}

namespace {

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Flattened {
    std::size_t m;
    std::size_t n;

    VectorXd pack(const DecisionVector& d) const {
        VectorXd z(m + 2 * n);
        for (std::size_t i = 0; i < m; ++i) z[static_cast<Eigen::Index>(i)] = d.control[i];
        for (std::size_t i = 0; i < n; ++i) z[static_cast<Eigen::Index>(m + i)] = d.coefficients[i];
        for (std::size_t i = 0; i < n; ++i) {
            z[static_cast<Eigen::Index>(m + n + i)] = d.initial_modes[i];
        }
        return z;
    }

    DecisionVector unpack(const VectorXd& z) const {
        DecisionVector d;
        d.control.resize(m);
        d.coefficients.resize(n);
        d.initial_modes.resize(n);
        for (std::size_t i = 0; i < m; ++i) d.control[i] = z[static_cast<Eigen::Index>(i)];
        for (std::size_t i = 0; i < n; ++i) d.coefficients[i] = z[static_cast<Eigen::Index>(m + i)];
        for (std::size_t i = 0; i < n; ++i) {
            d.initial_modes[i] = z[static_cast<Eigen::Index>(m + n + i)];
        }
        return d;
    }
};

struct RestartOutcome {
    bool feasible = false;
    bool converged = false;
    int iterations = 0;
    double penalized = -std::numeric_limits<double>::infinity();
    DecisionVector decision;
    std::vector<double> history;
};

// Projected gradient of J (zero at active box bounds pointing outward,
// tangential on the two spheres).
VectorXd projected_gradient(const VectorXd& z, const VectorXd& grad_j, const Flattened& flat,
                            const ControlBounds& bounds) {
    VectorXd pg = grad_j;
    constexpr double kEps = 1e-15;
    for (std::size_t i = 0; i < flat.m; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        if ((z[idx] <= bounds.lower + kEps && grad_j[idx] < 0.0) ||
            (z[idx] >= bounds.upper - kEps && grad_j[idx] > 0.0)) {
            pg[idx] = 0.0;
        }
    }
    for (std::size_t block = 0; block < 2; ++block) {
        const auto off = static_cast<Eigen::Index>(flat.m + block * flat.n);
        const auto len = static_cast<Eigen::Index>(flat.n);
        const VectorXd v = z.segment(off, len);
        pg.segment(off, len) -= grad_j.segment(off, len).dot(v) * v;
    }
    return pg;
}

RestartOutcome run_restart(const Problem& problem, const OptimizeOptions& options,
                           double penalty_weight, std::uint64_t restart_seed) {
    const Flattened flat{static_cast<std::size_t>(problem.grid.node_count),
                         static_cast<std::size_t>(problem.harmonics.mode_count())};
    SplitMix64 rng{restart_seed};

    DecisionVector start;
    start.control.resize(flat.m);
    start.coefficients.resize(flat.n);
    start.initial_modes.resize(flat.n);
    for (double& v : start.control) v = rng.uniform01();
    for (double& v : start.coefficients) v = rng.uniform01();
    for (double& v : start.initial_modes) v = rng.uniform01();
    start = project(std::move(start), problem.bounds);

    RestartOutcome outcome;

    // F = -J; minimize F.
    const auto eval_f = [&](const VectorXd& z) -> double {
        try {
            return -penalized_objective(flat.unpack(z), problem, penalty_weight).first.penalized;
        } catch (const InfeasibleTrajectoryError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const auto eval_fg = [&](const VectorXd& z, double& f, VectorXd& g) -> bool {
        try {
            auto [report, grad] = objective_gradient(flat.unpack(z), problem, penalty_weight);
            f = -report.penalized;
            g = -flat.pack(grad);
            return true;
        } catch (const InfeasibleTrajectoryError&) {
            return false;
        }
    };

    VectorXd z = flat.pack(start);
    double f_value = 0.0;
    VectorXd g(z.size());
    if (!eval_fg(z, f_value, g)) return outcome;  // infeasible initial point
    outcome.feasible = true;
    outcome.history.push_back(-f_value);

    const auto project_flat = [&](const VectorXd& zv) {
        return flat.pack(project(flat.unpack(zv), problem.bounds));
    };

    // Backtracking Armijo, accepting only projected steps aligned with descent.
    const auto line_search = [&](const VectorXd& d,
                                 VectorXd& z_out) -> std::optional<double> {
        double alpha = 1.0;
        for (int t = 0; t < 60; ++t) {
            const VectorXd trial = project_flat(z + alpha * d);
            const VectorXd step = trial - z;
            const double slope = g.dot(step);
            if (slope <= 0.0) {
                const double f_trial = eval_f(trial);
                if (std::isfinite(f_trial) && f_trial <= f_value + 1e-4 * slope) {
                    z_out = trial;
                    return f_trial;
                }
            }
            alpha *= 0.5;
        }
        return std::nullopt;
    };

    const auto dim = z.size();
    MatrixXd inv_hessian = MatrixXd::Identity(dim, dim);
    bool have_pair = false;
    bool retried = false;
    int stall_count = 0;

    int iter = 0;
    while (iter < options.max_iters) {
        ++iter;
        outcome.iterations = iter;

        VectorXd direction = -(inv_hessian * g);
        if (direction.dot(g) >= 0.0) direction = -g;

        VectorXd z_next(dim);
        std::optional<double> f_next = line_search(direction, z_next);
        if (!f_next && have_pair && !retried) {
            retried = true;
            inv_hessian = MatrixXd::Identity(dim, dim);
            have_pair = false;
            f_next = line_search(-g, z_next);
        }
        if (!f_next) {
            outcome.converged = true;  // no improving feasible step remains
            break;
        }

        double f_new = 0.0;
        VectorXd g_new(dim);
        eval_fg(z_next, f_new, g_new);  // feasible: line search evaluated it

        const VectorXd s = z_next - z;
        const VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            if (!have_pair) {
                inv_hessian = MatrixXd::Identity(dim, dim) * (sy / y.dot(y));
                have_pair = true;
            }
            const double rho = 1.0 / sy;
            const VectorXd hy = inv_hessian * y;
            inv_hessian.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
            inv_hessian.noalias() += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
        }

        const double delta_j = f_value - f_new;  // J increase, >= 0
        z = z_next;
        f_value = f_new;
        g = g_new;
        outcome.history.push_back(-f_value);

        const VectorXd pg = projected_gradient(z, VectorXd(-g), flat, problem.bounds);
        if (pg.norm() < options.tol) {
            outcome.converged = true;
            break;
        }
        if (std::abs(delta_j) < options.tol * std::max(1.0, std::abs(f_value))) {
            if (++stall_count >= 2) {
                outcome.converged = true;
                break;
            }
        } else {
            stall_count = 0;
        }
    }

    outcome.penalized = -f_value;
    outcome.decision = flat.unpack(z);
    return outcome;
}

}  // namespace

DesignResult optimize(const Problem& problem, const OptimizeOptions& options) {
    problem.params.validate();
    problem.bounds.validate();
    if (!(problem.initial_diameter >= problem.bounds.diameter_floor)) {
        throw std::invalid_argument("optimize: initial diameter " +
                                    std::to_string(problem.initial_diameter) +
                                    " below the diameter floor");
    }
    if (options.restarts < 1) throw std::invalid_argument("optimize: restarts must be >= 1");

    const double penalty_weight =
        options.penalty_weight > 0.0 ? options.penalty_weight : default_penalty_weight(problem);

    std::vector<RestartRecord> records;
    records.reserve(static_cast<std::size_t>(options.restarts));
    std::optional<RestartOutcome> best;
    std::vector<double> best_history;

    for (int r = 0; r < options.restarts; ++r) {
        const std::uint64_t restart_seed =
            options.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
        RestartOutcome outcome = run_restart(problem, options, penalty_weight, restart_seed);

        RestartRecord record;
        record.index = r;
        record.seed = restart_seed;
        record.feasible = outcome.feasible;
        record.converged = outcome.converged;
        record.iterations = outcome.iterations;
        record.penalized = outcome.penalized;
        if (outcome.feasible) {
            record.energy =
                penalized_objective(outcome.decision, problem, penalty_weight).first.energy;
            for (double u : outcome.decision.control) {
                if (u <= problem.bounds.lower + 1e-12) record.touches_lower = true;
                if (u >= problem.bounds.upper - 1e-12) record.touches_upper = true;
            }
        }
        records.push_back(record);

        if (outcome.feasible && (!best || outcome.penalized > best->penalized)) {
            best = std::move(outcome);
        }
    }

    if (!best) throw AllRestartsInfeasibleError();

    DesignResult result;
    result.decision = best->decision;
    auto [report, trajectory] = penalized_objective(result.decision, problem, penalty_weight);
    auto [grad_report, gradient] = objective_gradient(result.decision, problem, penalty_weight);
    report.gradient_norm = grad_report.gradient_norm;
    result.report = std::move(report);
    result.trajectory = std::move(trajectory);
    result.iterations = best->iterations;
    result.converged = best->converged;
    result.validity = validity_functional(result.decision.control,
                                          problem.harmonics.wave_numbers.back(), problem.grid);
    result.seed = options.seed;
    result.restart_log = std::move(records);
    result.arcs = classify_arcs(result.decision, problem, penalty_weight);
    result.objective_history = std::move(best->history);

    if (result.validity > 0.5) {
        log_warn("plane-wave validity value " + std::to_string(result.validity) +
                 " is large; the horn-equation hypothesis is strained");
    }
    return result;
}

}  // namespace hornopt

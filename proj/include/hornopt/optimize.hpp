#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hornopt/integrate.hpp"
#include "hornopt/model.hpp"

namespace hornopt {

/// The full unknown of problem (P): gridded control u = D', modal weights c
/// and the free initial modal values phi_n(0).  After projection the control
/// lies in the box and both c and phi0 lie on the unit sphere.
struct DecisionVector {
    std::vector<double> control;        // m nodal values of D'
    std::vector<double> coefficients;   // N weights c_n
    std::vector<double> initial_modes;  // N values X_2n(0)
};

struct ObjectiveReport {
    double energy = 0.0;     // E, Eq. 12 quadrature
    double penalty = 0.0;    // w * sum X_2n(L)^2
    double penalized = 0.0;  // J = energy - penalty
    std::vector<double> terminal_residuals;
    std::optional<double> gradient_norm;  // set by objective_gradient only
};

/// Static problem data for one design run.
struct Problem {
    PhysicalParams params;
    HarmonicSpec harmonics;
    ControlBounds bounds;
    double initial_diameter = 0.02;  // D(0)
    Grid grid;
};

struct OptimizeOptions {
    int max_iters = 500;
    double tol = 1e-5;
    double penalty_weight = 0.0;  // w; <= 0 selects the default scaling
    int restarts = 3;
    std::uint64_t seed = 1;
};

/// Default penalty scaling 1e3 * (pi rho0 / 8) * D0^2 * k_max^2 * L.
double default_penalty_weight(const Problem& problem);

struct RestartRecord {
    int index = 0;
    std::uint64_t seed = 0;
    double penalized = 0.0;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
    bool feasible = false;
    bool touches_lower = false;
    bool touches_upper = false;
};

enum class ArcKind { interior, bang_lower, bang_upper, singular };

struct DesignResult {
    DecisionVector decision;
    Trajectory trajectory;
    ObjectiveReport report;
    int iterations = 0;
    bool converged = false;
    double validity = 0.0;  // Eq. 1 value at the returned control
    std::uint64_t seed = 0;
    std::vector<RestartRecord> restart_log;
    std::vector<ArcKind> arcs;              // per-node bang/singular flags
    std::vector<double> objective_history;  // accepted J values, winning restart
};

class AllRestartsInfeasibleError : public std::runtime_error {
public:
    AllRestartsInfeasibleError()
        : std::runtime_error("optimize: no restart produced a feasible trajectory") {}
};

/// Clips the control into the box and rescales c and phi0 to the unit
/// sphere (an all-zero block becomes the uniform unit vector).
DecisionVector project(DecisionVector decision, const ControlBounds& bounds);

/// Integrates the state from x1(0) = D0, x2n(0) = phi0_n, x2n+1(0) = 0 and
/// evaluates J = E - w * sum X_2n(L)^2.
std::pair<ObjectiveReport, Trajectory> penalized_objective(const DecisionVector& decision,
                                                           const Problem& problem,
                                                           double penalty_weight);

/// Same forward sweep, then the adjoint backward sweep differentiating the
/// discrete scheme exactly: terminal costate (0, -2w X_2n(L), 0), reverse
/// predictor-corrector transposition, control gradient assembled from
/// switching values, dJ/dc_n by quadrature of dH/dc_n, dJ/dphi0_n = mu_2n(0).
std::pair<ObjectiveReport, DecisionVector> objective_gradient(const DecisionVector& decision,
                                                              const Problem& problem,
                                                              double penalty_weight);

/// Per-node arc classification of a decision: nodes at a bound are bang
/// arcs; interior nodes with |switching| < 1e-6 * max|switching| are
/// flagged singular.
std::vector<ArcKind> classify_arcs(const DecisionVector& decision, const Problem& problem,
                                   double penalty_weight);

/// Projected-BFGS ascent on J with monotone backtracking line search and
/// uniform random restarts; the best restart (highest J) is returned.
DesignResult optimize(const Problem& problem, const OptimizeOptions& options);

}  // namespace hornopt

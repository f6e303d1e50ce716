#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hornopt/model.hpp"

namespace hornopt {

/// Uniform spatial grid on [0, L].
struct Grid {
    int node_count = 0;
    double length = 0.0;

    static Grid uniform(double length, int node_count);

    double spacing() const { return length / (node_count - 1); }
    double node(int i) const { return i == node_count - 1 ? length : spacing() * i; }
};

class InfeasibleTrajectoryError : public std::runtime_error {
public:
    InfeasibleTrajectoryError(int node, double diameter, double floor)
        : std::runtime_error("infeasible trajectory: diameter " + std::to_string(diameter) +
                             " below floor " + std::to_string(floor) + " at node " +
                             std::to_string(node)),
          node_index(node) {}

    int node_index;
};

class GridMismatchError : public std::invalid_argument {
public:
    GridMismatchError(const std::string& what, std::size_t got, std::size_t expected)
        : std::invalid_argument("grid mismatch: " + what + " has " + std::to_string(got) +
                                " entries, grid has " + std::to_string(expected) + " nodes") {}
};

struct Trajectory {
    Grid grid;
    std::vector<StateVector> samples;
};

struct CostateTrajectory {
    Grid grid;
    std::vector<CostateVector> samples;
};

/// Forward sweep of the state system with the nodal control values:
/// explicit Euler predictor, Crank-Nicolson (trapezoidal) corrector.
/// The X1 component reduces to the exact cumulative trapezoid of the control.
Trajectory integrate_state(std::span<const double> control, const StateVector& initial,
                           const Grid& grid, const HarmonicSpec& harmonics, double diameter_floor);

/// Backward sweep of the (linear) adjoint system from the terminal value,
/// same predictor-corrector stencil, state and control read at the nodes.
CostateTrajectory integrate_costate(const Trajectory& trajectory, std::span<const double> control,
                                    const Coefficients& coeffs, const CostateVector& terminal,
                                    const HarmonicSpec& harmonics, const PhysicalParams& params);

/// Composite trapezoid sum of nodal values.
double quadrature(std::span<const double> values, const Grid& grid);

/// Integrates one Webster mode phi'' + 2(D'/D) phi' + k^2 phi = 0 with
/// phi(0) = 1, phi'(0) = 0 over a gridded profile, treating the diameter as
/// piecewise linear between nodes (D' is the exact interpolant slope).
/// Classic RK4 with `substeps` stages per interval; used by the spectral
/// solver, where fourth-order phase accuracy is needed.
std::pair<std::vector<double>, std::vector<double>> integrate_webster_mode(
    std::span<const double> diameter, double wave_number, const Grid& grid, int substeps = 2);

}  // namespace hornopt

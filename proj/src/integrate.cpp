#include "hornopt/integrate.hpp"

#include <cmath>

namespace hornopt {

Grid Grid::uniform(double length, int node_count) {
    if (node_count < 3) {
        throw std::invalid_argument("Grid: need at least 3 nodes, got " +
                                    std::to_string(node_count));
    }
    if (!(length > 0.0)) {
        throw std::invalid_argument("Grid: length must be positive, got " +
                                    std::to_string(length));
    }
    return Grid{node_count, length};
}

namespace {

StateVector axpy(const StateVector& x, double a, const StateVector& y) {
    StateVector out;
    out.diameter = x.diameter + a * y.diameter;
    out.modes.resize(x.modes.size());
    for (std::size_t n = 0; n < x.modes.size(); ++n) {
        out.modes[n].phi = x.modes[n].phi + a * y.modes[n].phi;
        out.modes[n].dphi = x.modes[n].dphi + a * y.modes[n].dphi;
    }
    return out;
}

// x + a*(y1 + y2), the trapezoidal corrector combination
StateVector corrector(const StateVector& x, double a, const StateVector& y1,
                      const StateVector& y2) {
    StateVector out;
    out.diameter = x.diameter + a * (y1.diameter + y2.diameter);
    out.modes.resize(x.modes.size());
    for (std::size_t n = 0; n < x.modes.size(); ++n) {
        out.modes[n].phi = x.modes[n].phi + a * (y1.modes[n].phi + y2.modes[n].phi);
        out.modes[n].dphi = x.modes[n].dphi + a * (y1.modes[n].dphi + y2.modes[n].dphi);
    }
    return out;
}

CostateVector axpy(const CostateVector& x, double a, const CostateVector& y) {
    CostateVector out;
    out.mu_diameter = x.mu_diameter + a * y.mu_diameter;
    out.modes.resize(x.modes.size());
    for (std::size_t n = 0; n < x.modes.size(); ++n) {
        out.modes[n].mu_phi = x.modes[n].mu_phi + a * y.modes[n].mu_phi;
        out.modes[n].mu_dphi = x.modes[n].mu_dphi + a * y.modes[n].mu_dphi;
    }
    return out;
}

CostateVector corrector(const CostateVector& x, double a, const CostateVector& y1,
                        const CostateVector& y2) {
    CostateVector out;
    out.mu_diameter = x.mu_diameter + a * (y1.mu_diameter + y2.mu_diameter);
    out.modes.resize(x.modes.size());
    for (std::size_t n = 0; n < x.modes.size(); ++n) {
        out.modes[n].mu_phi = x.modes[n].mu_phi + a * (y1.modes[n].mu_phi + y2.modes[n].mu_phi);
        out.modes[n].mu_dphi = x.modes[n].mu_dphi + a * (y1.modes[n].mu_dphi + y2.modes[n].mu_dphi);
    }
    return out;
}

}  // namespace

Trajectory integrate_state(std::span<const double> control, const StateVector& initial,
                           const Grid& grid, const HarmonicSpec& harmonics,
                           double diameter_floor) {
    const std::size_t m = static_cast<std::size_t>(grid.node_count);
    if (control.size() != m) throw GridMismatchError("control", control.size(), m);
    if (!(initial.diameter >= diameter_floor)) {
        throw InfeasibleTrajectoryError(0, initial.diameter, diameter_floor);
    }

    Trajectory trajectory;
    trajectory.grid = grid;
    trajectory.samples.reserve(m);
    trajectory.samples.push_back(initial);

    const double h = grid.spacing();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const StateVector& x = trajectory.samples[i];
        const StateVector f1 = webster_rhs(x, control[i], harmonics);
        const StateVector predicted = axpy(x, h, f1);
        if (!(predicted.diameter > 0.0)) {
            throw InfeasibleTrajectoryError(static_cast<int>(i + 1), predicted.diameter,
                                            diameter_floor);
        }
        const StateVector f2 = webster_rhs(predicted, control[i + 1], harmonics);
        StateVector next = corrector(x, 0.5 * h, f1, f2);
        if (!(next.diameter >= diameter_floor)) {
            throw InfeasibleTrajectoryError(static_cast<int>(i + 1), next.diameter,
                                            diameter_floor);
        }
        trajectory.samples.push_back(std::move(next));
    }
    return trajectory;
}

CostateTrajectory integrate_costate(const Trajectory& trajectory, std::span<const double> control,
                                    const Coefficients& coeffs, const CostateVector& terminal,
                                    const HarmonicSpec& harmonics, const PhysicalParams& params) {
    const std::size_t m = static_cast<std::size_t>(trajectory.grid.node_count);
    if (trajectory.samples.size() != m) {
        throw GridMismatchError("trajectory", trajectory.samples.size(), m);
    }
    if (control.size() != m) throw GridMismatchError("control", control.size(), m);

    CostateTrajectory costates;
    costates.grid = trajectory.grid;
    costates.samples.resize(m);
    costates.samples[m - 1] = terminal;

    const double h = trajectory.grid.spacing();
    for (std::size_t i = m - 1; i > 0; --i) {
        const CostateVector& mu = costates.samples[i];
        const CostateVector g1 =
            costate_rhs(mu, trajectory.samples[i], control[i], coeffs, harmonics, params);
        const CostateVector predicted = axpy(mu, -h, g1);
        const CostateVector g2 = costate_rhs(predicted, trajectory.samples[i - 1], control[i - 1],
                                             coeffs, harmonics, params);
        costates.samples[i - 1] = corrector(mu, -0.5 * h, g1, g2);
    }
    return costates;
}

double quadrature(std::span<const double> values, const Grid& grid) {
    const std::size_t m = static_cast<std::size_t>(grid.node_count);
    if (values.size() != m) throw GridMismatchError("values", values.size(), m);
    const double h = grid.spacing();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) sum += 0.5 * h * (values[i] + values[i + 1]);
    return sum;
}

std::pair<std::vector<double>, std::vector<double>> integrate_webster_mode(
    std::span<const double> diameter, double wave_number, const Grid& grid, int substeps) {
    const std::size_t m = static_cast<std::size_t>(grid.node_count);
    if (diameter.size() != m) throw GridMismatchError("diameter", diameter.size(), m);
    if (substeps < 1) throw std::invalid_argument("integrate_webster_mode: substeps must be >= 1");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(diameter[i] > 0.0)) throw SingularGeometryError(diameter[i]);
    }

    const double h = grid.spacing();
    const double hs = h / substeps;
    const double k2 = wave_number * wave_number;

    std::vector<double> phi(m), dphi(m);
    double y0 = 1.0;  // phi
    double y1 = 0.0;  // phi'
    phi[0] = y0;
    dphi[0] = y1;

    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double d0 = diameter[i];
        const double slope = (diameter[i + 1] - diameter[i]) / h;
        // q(t) = 2 D'/D along the linear piece, t in [0, 1]
        const auto q_at = [&](double t) { return 2.0 * slope / (d0 + slope * h * t); };
        for (int s = 0; s < substeps; ++s) {
            const double q0 = q_at(static_cast<double>(s) / substeps);
            const double qm = q_at((s + 0.5) / substeps);
            const double q1 = q_at(static_cast<double>(s + 1) / substeps);

            const double k1p = y1;
            const double k1d = -q0 * y1 - k2 * y0;
            const double k2p = y1 + 0.5 * hs * k1d;
            const double k2d = -qm * (y1 + 0.5 * hs * k1d) - k2 * (y0 + 0.5 * hs * k1p);
            const double k3p = y1 + 0.5 * hs * k2d;
            const double k3d = -qm * (y1 + 0.5 * hs * k2d) - k2 * (y0 + 0.5 * hs * k2p);
            const double k4p = y1 + hs * k3d;
            const double k4d = -q1 * (y1 + hs * k3d) - k2 * (y0 + hs * k3p);

            y0 += hs / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            y1 += hs / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        }
        phi[i + 1] = y0;
        dphi[i + 1] = y1;
    }
    return {std::move(phi), std::move(dphi)};
}

}  // namespace hornopt

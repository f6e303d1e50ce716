#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hornopt {

struct Grid;  // integrate.hpp

/// Raised by the pointwise model functions whenever the duct diameter is
/// not strictly positive (the Webster system is singular at D = 0).
class SingularGeometryError : public std::runtime_error {
public:
    explicit SingularGeometryError(double diameter)
        : std::runtime_error("singular geometry: diameter = " + std::to_string(diameter) +
                             " (must be > 0)") {}
};

/// Medium and duct constants: density rho0, sound speed c, fundamental
/// frequency f0 and duct length L.
struct PhysicalParams {
    double density = 1.0;        // rho0 [kg/m^3]
    double sound_speed = 340.0;  // c [m/s]
    double fundamental = 440.0;  // f0 [Hz]
    double length = 0.772;       // L [m]

    /// k0 = 2*pi*f0/c
    double base_wave_number() const { return 2.0 * M_PI * fundamental / sound_speed; }

    void validate() const;
};

/// The harmonic content of the oscillation regime: strictly increasing
/// integer multipliers j_n of the fundamental, and k_n = j_n * k0.
struct HarmonicSpec {
    std::vector<int> multipliers;
    std::vector<double> wave_numbers;

    static HarmonicSpec from_multipliers(std::vector<int> multipliers,
                                         const PhysicalParams& params);

    int mode_count() const { return static_cast<int>(multipliers.size()); }
};

/// One modal pair (phi_n, phi_n').
struct ModeAmplitude {
    double phi = 0.0;
    double dphi = 0.0;
};

/// Full state of the controlled system: X1 = D plus N modal pairs,
/// 2N+1 components in total.
struct StateVector {
    double diameter = 0.0;
    std::vector<ModeAmplitude> modes;

    int size() const { return 1 + 2 * static_cast<int>(modes.size()); }
};

struct ModeCostate {
    double mu_phi = 0.0;
    double mu_dphi = 0.0;
};

/// Adjoint multipliers, one per state component.
struct CostateVector {
    double mu_diameter = 0.0;
    std::vector<ModeCostate> modes;

    int size() const { return 1 + 2 * static_cast<int>(modes.size()); }

    static CostateVector zero(int mode_count) {
        CostateVector mu;
        mu.modes.resize(static_cast<std::size_t>(mode_count));
        return mu;
    }
};

/// The constant modal weights c_n.
struct Coefficients {
    std::vector<double> weights;
};

/// Box bounds D1 <= D' <= D2 on the control and the diameter floor a.
struct ControlBounds {
    double lower = -0.2;
    double upper = 0.2;
    double diameter_floor = 1e-3;  // a [m]

    void validate() const;
};

/// Right-hand side of the controlled Webster system:
///   X1' = u,  X2n' = X2n+1,  X2n+1' = -2 (u/X1) X2n+1 - k_n^2 X2n.
StateVector webster_rhs(const StateVector& state, double control, const HarmonicSpec& harmonics);

/// Right-hand side of the adjoint system (mu' = -dH/dX componentwise).
CostateVector costate_rhs(const CostateVector& costate, const StateVector& state, double control,
                          const Coefficients& coeffs, const HarmonicSpec& harmonics,
                          const PhysicalParams& params);

/// H = (pi rho0/8) X1^2 sum c_n^2 (X2n+1^2 + k_n^2 X2n^2) + mu1 u
///     + sum (mu2n X2n+1 - mu2n+1 (2 (u/X1) X2n+1 + k_n^2 X2n)).
double hamiltonian(const StateVector& state, double control, const Coefficients& coeffs,
                   const CostateVector& costate, const HarmonicSpec& harmonics,
                   const PhysicalParams& params);

/// dH/dU = mu1 - (2/X1) sum mu2n+1 X2n+1.  Affine coefficient of H in the
/// control; its zeros/signs separate bang and singular arcs.
double switching_value(const StateVector& state, const CostateVector& costate);

/// (pi rho0/8) X1^2 sum c_n^2 (X2n+1^2 + k_n^2 X2n^2), the energy density
/// per unit length.  Nonnegative for any state with X1 > 0.
double energy_integrand(const StateVector& state, const Coefficients& coeffs,
                        const HarmonicSpec& harmonics, const PhysicalParams& params);

/// Plane-wave validity measure (1/2) int k_max (u/2)^2 dx.  The horn
/// equation is trustworthy while this stays well below 1.
double validity_functional(std::span<const double> control, double k_max, const Grid& grid);

/// Gradient of energy_integrand with respect to the state, in costate shape.
CostateVector energy_integrand_state_gradient(const StateVector& state, const Coefficients& coeffs,
                                              const HarmonicSpec& harmonics,
                                              const PhysicalParams& params);

/// Transposed Jacobian product lambda^T (d webster_rhs / d X), in costate shape.
CostateVector webster_rhs_state_vjp(const StateVector& state, double control,
                                    const HarmonicSpec& harmonics, const CostateVector& lambda);

namespace detail {
inline void require_positive_diameter(const StateVector& state) {
    if (!(state.diameter > 0.0)) throw SingularGeometryError(state.diameter);
}
}  // namespace detail

}  // namespace hornopt

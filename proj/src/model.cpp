#include "hornopt/model.hpp"

#include <algorithm>
#include <cmath>

#include "hornopt/integrate.hpp"

namespace hornopt {

void PhysicalParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                        " must be positive, got " + std::to_string(v));
        }
    };
    positive(density, "density");
    positive(sound_speed, "sound_speed");
    positive(fundamental, "fundamental");
    positive(length, "length");
}

void ControlBounds::validate() const {
    if (!(lower < upper)) {
        throw std::invalid_argument("ControlBounds: lower bound " + std::to_string(lower) +
                                    " must be below upper bound " + std::to_string(upper));
    }
    if (!(diameter_floor > 0.0)) {
        throw std::invalid_argument("ControlBounds: diameter floor must be positive, got " +
                                    std::to_string(diameter_floor));
    }
}

HarmonicSpec HarmonicSpec::from_multipliers(std::vector<int> multipliers,
                                            const PhysicalParams& params) {
    if (multipliers.empty()) {
        throw std::invalid_argument("HarmonicSpec: at least one multiplier required");
    }
    if (multipliers.front() < 1) {
        throw std::invalid_argument("HarmonicSpec: multipliers must be >= 1");
    }
    if (!std::is_sorted(multipliers.begin(), multipliers.end()) ||
        std::adjacent_find(multipliers.begin(), multipliers.end()) != multipliers.end()) {
        throw std::invalid_argument("HarmonicSpec: multipliers must be strictly increasing");
    }
    params.validate();
    HarmonicSpec spec;
    spec.multipliers = std::move(multipliers);
    spec.wave_numbers.reserve(spec.multipliers.size());
    const double k0 = params.base_wave_number();
    for (int j : spec.multipliers) spec.wave_numbers.push_back(j * k0);
    return spec;
}

namespace {

void require_mode_count(std::size_t got, std::size_t expected, const char* what) {
    if (got != expected) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                    " modes, got " + std::to_string(got));
    }
}

}  // namespace

StateVector webster_rhs(const StateVector& state, double control, const HarmonicSpec& harmonics) {
    detail::require_positive_diameter(state);
    require_mode_count(state.modes.size(), harmonics.wave_numbers.size(), "webster_rhs");

    StateVector out;
    out.diameter = control;
    out.modes.resize(state.modes.size());
    const double damping = 2.0 * control / state.diameter;
    for (std::size_t n = 0; n < state.modes.size(); ++n) {
        const double k = harmonics.wave_numbers[n];
        out.modes[n].phi = state.modes[n].dphi;
        out.modes[n].dphi = -damping * state.modes[n].dphi - k * k * state.modes[n].phi;
    }
    return out;
}

CostateVector costate_rhs(const CostateVector& costate, const StateVector& state, double control,
                          const Coefficients& coeffs, const HarmonicSpec& harmonics,
                          const PhysicalParams& params) {
    detail::require_positive_diameter(state);
    const std::size_t n_modes = harmonics.wave_numbers.size();
    require_mode_count(state.modes.size(), n_modes, "costate_rhs(state)");
    require_mode_count(costate.modes.size(), n_modes, "costate_rhs(costate)");
    require_mode_count(coeffs.weights.size(), n_modes, "costate_rhs(coeffs)");

    const double d = state.diameter;
    const double prefactor = M_PI * params.density / 4.0;

    double energy_sum = 0.0;  // sum c_n^2 (X2n+1^2 + k_n^2 X2n^2)
    double mu_sum = 0.0;      // sum mu2n+1 X2n+1
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        const double c2 = coeffs.weights[n] * coeffs.weights[n];
        energy_sum += c2 * (state.modes[n].dphi * state.modes[n].dphi +
                            k * k * state.modes[n].phi * state.modes[n].phi);
        mu_sum += costate.modes[n].mu_dphi * state.modes[n].dphi;
    }

    CostateVector out;
    out.modes.resize(n_modes);
    out.mu_diameter = -prefactor * d * energy_sum - 2.0 * control / (d * d) * mu_sum;
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        const double c2 = coeffs.weights[n] * coeffs.weights[n];
        out.modes[n].mu_phi =
            k * k * (costate.modes[n].mu_dphi - prefactor * c2 * d * d * state.modes[n].phi);
        out.modes[n].mu_dphi = 2.0 * control / d * costate.modes[n].mu_dphi -
                               costate.modes[n].mu_phi -
                               prefactor * c2 * d * d * state.modes[n].dphi;
    }
    return out;
}

double hamiltonian(const StateVector& state, double control, const Coefficients& coeffs,
                   const CostateVector& costate, const HarmonicSpec& harmonics,
                   const PhysicalParams& params) {
    detail::require_positive_diameter(state);
    const std::size_t n_modes = harmonics.wave_numbers.size();
    require_mode_count(state.modes.size(), n_modes, "hamiltonian(state)");
    require_mode_count(costate.modes.size(), n_modes, "hamiltonian(costate)");
    require_mode_count(coeffs.weights.size(), n_modes, "hamiltonian(coeffs)");

    // evaluated in control-affine form, H = H(0) + u * dH/dU, so the
    // affinity identity holds to a rounding of the final addition
    double base = energy_integrand(state, coeffs, harmonics, params);
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        base += costate.modes[n].mu_phi * state.modes[n].dphi -
                costate.modes[n].mu_dphi * k * k * state.modes[n].phi;
    }
    return base + control * switching_value(state, costate);
}

double switching_value(const StateVector& state, const CostateVector& costate) {
    detail::require_positive_diameter(state);
    require_mode_count(costate.modes.size(), state.modes.size(), "switching_value");
    double mu_sum = 0.0;
    for (std::size_t n = 0; n < state.modes.size(); ++n) {
        mu_sum += costate.modes[n].mu_dphi * state.modes[n].dphi;
    }
    return costate.mu_diameter - 2.0 / state.diameter * mu_sum;
}

double energy_integrand(const StateVector& state, const Coefficients& coeffs,
                        const HarmonicSpec& harmonics, const PhysicalParams& params) {
    detail::require_positive_diameter(state);
    const std::size_t n_modes = harmonics.wave_numbers.size();
    require_mode_count(state.modes.size(), n_modes, "energy_integrand(state)");
    require_mode_count(coeffs.weights.size(), n_modes, "energy_integrand(coeffs)");

    double mode_sum = 0.0;
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        const double c2 = coeffs.weights[n] * coeffs.weights[n];
        mode_sum += c2 * (state.modes[n].dphi * state.modes[n].dphi +
                          k * k * state.modes[n].phi * state.modes[n].phi);
    }
    return M_PI * params.density / 8.0 * state.diameter * state.diameter * mode_sum;
}

double validity_functional(std::span<const double> control, double k_max, const Grid& grid) {
    std::vector<double> integrand(control.size());
    for (std::size_t i = 0; i < control.size(); ++i) {
        const double radius_slope = control[i] / 2.0;
        integrand[i] = k_max * radius_slope * radius_slope;
    }
    return 0.5 * quadrature(integrand, grid);
}

CostateVector energy_integrand_state_gradient(const StateVector& state, const Coefficients& coeffs,
                                              const HarmonicSpec& harmonics,
                                              const PhysicalParams& params) {
    detail::require_positive_diameter(state);
    const std::size_t n_modes = harmonics.wave_numbers.size();
    const double d = state.diameter;
    const double pref = M_PI * params.density / 8.0;

    CostateVector grad;
    grad.modes.resize(n_modes);
    double mode_sum = 0.0;
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        const double c2 = coeffs.weights[n] * coeffs.weights[n];
        mode_sum += c2 * (state.modes[n].dphi * state.modes[n].dphi +
                          k * k * state.modes[n].phi * state.modes[n].phi);
        grad.modes[n].mu_phi = pref * d * d * c2 * 2.0 * k * k * state.modes[n].phi;
        grad.modes[n].mu_dphi = pref * d * d * c2 * 2.0 * state.modes[n].dphi;
    }
    grad.mu_diameter = pref * 2.0 * d * mode_sum;
    return grad;
}

CostateVector webster_rhs_state_vjp(const StateVector& state, double control,
                                    const HarmonicSpec& harmonics, const CostateVector& lambda) {
    detail::require_positive_diameter(state);
    const std::size_t n_modes = harmonics.wave_numbers.size();
    const double d = state.diameter;

    CostateVector out = CostateVector::zero(static_cast<int>(n_modes));
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double k = harmonics.wave_numbers[n];
        const double lam_dphi = lambda.modes[n].mu_dphi;
        // row X2n'   = X2n+1
        out.modes[n].mu_dphi += lambda.modes[n].mu_phi;
        // row X2n+1' = -2 (u/D) X2n+1 - k^2 X2n
        out.mu_diameter += lam_dphi * (2.0 * control / (d * d) * state.modes[n].dphi);
        out.modes[n].mu_phi += lam_dphi * (-k * k);
        out.modes[n].mu_dphi += lam_dphi * (-2.0 * control / d);
    }
    return out;
}

}  // namespace hornopt

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hornopt/integrate.hpp"
#include "hornopt/model.hpp"

namespace hornopt {

/// A bore profile sampled on a uniform grid.
struct BoreProfile {
    Grid grid;
    std::vector<double> diameter;

    void validate(double floor = 0.0) const;
};

/// One solution of the Sturm-Liouville problem (D^2 phi')' + k^2 D^2 phi = 0
/// with phi'(0) = 0, phi(L) = 0, normalized to phi(0) = 1.
struct EigenPair {
    double wave_number = 0.0;  // k_n
    double eigenvalue = 0.0;   // lambda_n = k_n^2
    std::vector<double> phi;
    std::vector<double> dphi;
};

class BracketFailureError : public std::runtime_error {
public:
    BracketFailureError(int found, int wanted, double ceiling)
        : std::runtime_error("eigen_solve: found " + std::to_string(found) + " of " +
                             std::to_string(wanted) + " eigenvalues below the sweep ceiling k = " +
                             std::to_string(ceiling)) {}
};

/// First n_modes eigenpairs by shooting on k: sweep-bracket the sign changes
/// of phi(L; k), then bisect each bracket to 1e-10 relative.  Eigenvalues
/// come out strictly increasing and eigenfunction n has n-1 interior zeros.
/// `max_wave_number` <= 0 picks a ceiling from n_modes and the duct length.
std::vector<EigenPair> eigen_solve(const BoreProfile& profile, int n_modes,
                                   double max_wave_number = 0.0);

/// max over m != n of |<phi_m, phi_n>_{D^2}| / (||phi_m|| ||phi_n||), the
/// inner product taken per interval with 5-point Gauss over the linear
/// diameter and cubic Hermite mode reconstruction.
double orthogonality_check(std::span<const EigenPair> pairs, const BoreProfile& profile);

enum class DuctKind { cylinder, cone };

/// Closed-form fixtures: cylinder k_n = (2n-1) pi / (2L), phi = cos(kx);
/// complete cone (apex at 0) k_n = n pi / L, phi = sin(kx)/(kx).
EigenPair analytic_oracle(DuctKind kind, const PhysicalParams& params, int n, const Grid& grid);

}  // namespace hornopt

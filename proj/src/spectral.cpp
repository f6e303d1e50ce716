#include "hornopt/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace hornopt {

void BoreProfile::validate(double floor) const {
    if (diameter.size() != static_cast<std::size_t>(grid.node_count)) {
        throw GridMismatchError("diameter", diameter.size(), grid.node_count);
    }
    for (std::size_t i = 0; i < diameter.size(); ++i) {
        if (!(diameter[i] > 0.0) || diameter[i] < floor) {
            throw std::invalid_argument("BoreProfile: diameter " + std::to_string(diameter[i]) +
                                        " at node " + std::to_string(i) + " below floor " +
                                        std::to_string(floor));
        }
    }
}

namespace {

constexpr int kSubsteps = 2;

double terminal_value(const BoreProfile& profile, double k) {
    auto [phi, dphi] = integrate_webster_mode(profile.diameter, k, profile.grid, kSubsteps);
    return phi.back();
}

// 5-point Gauss-Legendre on [0, 1]
constexpr double kGaussNode[5] = {0.5 - 0.9061798459386640 / 2.0, 0.5 - 0.5384693101056831 / 2.0,
                                  0.5, 0.5 + 0.5384693101056831 / 2.0,
                                  0.5 + 0.9061798459386640 / 2.0};
constexpr double kGaussWeight[5] = {0.2369268850561891 / 2.0, 0.4786286704993665 / 2.0,
                                    0.5688888888888889 / 2.0, 0.4786286704993665 / 2.0,
                                    0.2369268850561891 / 2.0};

double hermite(double p0, double m0, double p1, double m1, double t, double h) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * h * m0 +
           (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * h * m1;
}

// <phi_a, phi_b> with weight D^2: per-interval Gauss over the linear
// diameter and cubic Hermite reconstruction of the modes.
double weighted_inner(const EigenPair& a, const EigenPair& b, const BoreProfile& profile) {
    const double h = profile.grid.spacing();
    double total = 0.0;
    for (int seg = 0; seg + 1 < profile.grid.node_count; ++seg) {
        double acc = 0.0;
        for (int g = 0; g < 5; ++g) {
            const double t = kGaussNode[g];
            const double d =
                profile.diameter[seg] * (1.0 - t) + profile.diameter[seg + 1] * t;
            const double fa = hermite(a.phi[seg], a.dphi[seg], a.phi[seg + 1], a.dphi[seg + 1], t, h);
            const double fb = hermite(b.phi[seg], b.dphi[seg], b.phi[seg + 1], b.dphi[seg + 1], t, h);
            acc += kGaussWeight[g] * d * d * fa * fb;
        }
        total += acc * h;
    }
    return total;
}

}  // namespace

std::vector<EigenPair> eigen_solve(const BoreProfile& profile, int n_modes,
                                   double max_wave_number) {
    profile.validate();
    if (n_modes < 1) throw std::invalid_argument("eigen_solve: n_modes must be >= 1");

    const double length = profile.grid.length;
    const double ceiling =
        max_wave_number > 0.0 ? max_wave_number : 2.0 * (n_modes + 2) * M_PI / length;
    const double step = M_PI / (8.0 * length);

    std::vector<double> roots;
    double k_lo = 1e-9 * step;
    double f_lo = terminal_value(profile, k_lo);
    while (static_cast<int>(roots.size()) < n_modes && k_lo < ceiling) {
        const double k_hi = k_lo + step;
        const double f_hi = terminal_value(profile, k_hi);
        if (f_lo == 0.0) {
            roots.push_back(k_lo);
        } else if (f_lo * f_hi < 0.0) {
            double a = k_lo, b = k_hi, fa = f_lo;
            while (b - a > 1e-10 * b) {
                const double mid = 0.5 * (a + b);
                const double fm = terminal_value(profile, mid);
                if (fa * fm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        k_lo = k_hi;
        f_lo = f_hi;
    }
    if (static_cast<int>(roots.size()) < n_modes) {
        throw BracketFailureError(static_cast<int>(roots.size()), n_modes, ceiling);
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(roots.size());
    for (double k : roots) {
        auto [phi, dphi] = integrate_webster_mode(profile.diameter, k, profile.grid, kSubsteps);
        pairs.push_back(EigenPair{k, k * k, std::move(phi), std::move(dphi)});
    }
    return pairs;
}

double orthogonality_check(std::span<const EigenPair> pairs, const BoreProfile& profile) {
    profile.validate();
    std::vector<double> norms;
    norms.reserve(pairs.size());
    for (const EigenPair& p : pairs) norms.push_back(std::sqrt(weighted_inner(p, p, profile)));

    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const double off =
                std::abs(weighted_inner(pairs[i], pairs[j], profile)) / (norms[i] * norms[j]);
            worst = std::max(worst, off);
        }
    }
    return worst;
}

EigenPair analytic_oracle(DuctKind kind, const PhysicalParams& params, int n, const Grid& grid) {
    if (n < 1) throw std::invalid_argument("analytic_oracle: mode index must be >= 1");
    const double length = params.length;

    EigenPair pair;
    pair.phi.resize(grid.node_count);
    pair.dphi.resize(grid.node_count);

    if (kind == DuctKind::cylinder) {
        const double k = (2 * n - 1) * M_PI / (2.0 * length);
        pair.wave_number = k;
        for (int i = 0; i < grid.node_count; ++i) {
            const double x = grid.node(i);
            pair.phi[i] = std::cos(k * x);
            pair.dphi[i] = -k * std::sin(k * x);
        }
    } else {
        const double k = n * M_PI / length;
        pair.wave_number = k;
        for (int i = 0; i < grid.node_count; ++i) {
            const double u = k * grid.node(i);
            if (std::abs(u) < 1e-8) {
                pair.phi[i] = 1.0 - u * u / 6.0;
                pair.dphi[i] = -k * u / 3.0;
            } else {
                pair.phi[i] = std::sin(u) / u;
                pair.dphi[i] = k * (u * std::cos(u) - std::sin(u)) / (u * u);
            }
        }
    }
    pair.eigenvalue = pair.wave_number * pair.wave_number;
    return pair;
}

}  // namespace hornopt

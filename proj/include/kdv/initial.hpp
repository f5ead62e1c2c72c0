#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "kdv/model.hpp"
#include "kdv/rng.hpp"
#include "kdv/spectral.hpp"

namespace kdv {

/// Traveling-wave solution u = 3c sech^2(kappa x - omega t - x0) with
/// kappa = sqrt(eta c)/(2 mu), omega = c eta kappa.
inline double soliton_exact(double x, double t, double c, double x0, const KdvParams& p) {
    if (!(p.eta * c > 0.0))
        throw ConfigError("soliton: eta*c must be positive for a real width");
    if (p.mu == 0.0) throw ConfigError("soliton: mu must be nonzero");
    const double kappa = std::sqrt(p.eta * c) / (2.0 * p.mu);
    const double omega = c * p.eta * kappa;
    const double sech = 1.0 / std::cosh(kappa * x - omega * t - x0);
    return 3.0 * c * sech * sech;
}

struct SolitonIC {
    double c = 1.0;
    double x0 = 0.0;
};

struct ThreeSolitonsIC {
    std::array<double, 3> kappa{0.3, 0.25, 0.2};
    std::array<double, 3> center{-60.0, -44.0, -26.0};
};

struct TwoSolitonIC {};

/// Random bimodal sea: sum of cosines with seeded phases and the two-peak
/// power spectrum S(k) = q1 exp(-(k-k1)^2/(2 w1^2)) + q2 exp(-(k-k2)^2/(2 w2^2)).
struct BimodalIC {
    double q1 = 1.0;
    double q2 = 0.5;
    double k1 = 1.0;
    double k2 = 0.5;
    double w1 = 0.1;
    double w2 = 0.05;
    double dk = 0.01;
};

using InitialCondition = std::variant<SolitonIC, ThreeSolitonsIC, TwoSolitonIC, BimodalIC>;

inline GridFunction init_soliton(const GridPtr& grid, const SolitonIC& ic, const KdvParams& p,
                                 double t = 0.0) {
    return GridFunction::sample(grid,
                                [&](double x) { return soliton_exact(x, t, ic.c, ic.x0, p); });
}

inline GridFunction init_three_solitons(const GridPtr& grid, const ThreeSolitonsIC& ic = {}) {
    if (grid->left() > -100.0 || grid->right() < 100.0)
        throw ConfigError("three-soliton data needs a domain covering [-100, 100]");
    return GridFunction::sample(grid, [&](double x) {
        double u = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double sech = 1.0 / std::cosh(ic.kappa[i] * (x - ic.center[i]));
            u += 12.0 * ic.kappa[i] * ic.kappa[i] * sech * sech;
        }
        return u;
    });
}

/// u0 = 12 (3 + 4 cosh 2x + cosh 4x) / (3 cosh x + cosh 3x)^2. Away from the
/// origin both cosh terms blow up, so the tails are evaluated with the common
/// exponential factored out.
inline double two_soliton_profile(double x) {
    const double t = std::abs(x);
    if (t <= 15.0) {
        const double num = 3.0 + 4.0 * std::cosh(2.0 * x) + std::cosh(4.0 * x);
        const double den = 3.0 * std::cosh(x) + std::cosh(3.0 * x);
        return 12.0 * num / (den * den);
    }
    // num * e^{-4t} and den * e^{-3t}, assembled from decaying exponentials.
    const double e2 = std::exp(-2.0 * t);
    const double e4 = e2 * e2;
    const double e6 = e4 * e2;
    const double e8 = e4 * e4;
    const double num = 3.0 * e4 + 2.0 * (e2 + e6) + 0.5 * (1.0 + e8);
    const double den = 1.5 * (e2 + e4) + 0.5 * (1.0 + e6);
    return 12.0 * e2 * num / (den * den);
}

inline GridFunction init_two_soliton(const GridPtr& grid, const TwoSolitonIC& = {}) {
    if (grid->left() > -20.0 || grid->right() < 20.0)
        throw ConfigError("two-soliton data needs a domain covering [-20, 20]");
    return GridFunction::sample(grid, [](double x) { return two_soliton_profile(x); });
}

inline double bimodal_spectrum(const BimodalIC& ic, double k) {
    const double d1 = (k - ic.k1) / ic.w1;
    const double d2 = (k - ic.k2) / ic.w2;
    return ic.q1 * std::exp(-0.5 * d1 * d1) + ic.q2 * std::exp(-0.5 * d2 * d2);
}

/// u(x,0) = sum_{j=1}^{N/2-1} sqrt(2 S(k_j) dk) cos(k_j x + psi_j) with
/// k_j = j dk and seeded phases psi_j ~ U(0, 2 pi). The k_j must coincide
/// with the grid wavenumbers, so dk has to equal 2 pi / (b - a); the sum is
/// then a single inverse transform with coefficients (A_j/2) e^{i psi_j}.
inline GridFunction init_bimodal(const SpectralOperator& op, const BimodalIC& ic,
                                 std::uint64_t seed) {
    const Grid& grid = op.grid();
    const double dtheta = 2.0 * std::numbers::pi / grid.length();
    if (std::abs(dtheta - ic.dk) > 1e-12 * ic.dk)
        throw ConfigError("bimodal: dk does not match the grid wavenumber spacing "
                          "2*pi/(b-a)");
    if (grid.left() != 0.0)
        throw ConfigError("bimodal: domain must start at x = 0 for the cosine lattice");
    SplitMix64 rng(seed);
    std::vector<std::complex<double>> spec(op.modes(), {0.0, 0.0});
    const int n = grid.size();
    for (int j = 1; j < n / 2; ++j) {
        const double kj = j * ic.dk;
        const double amp = std::sqrt(2.0 * bimodal_spectrum(ic, kj) * ic.dk);
        const double psi = rng.angle();
        // Unnormalized c2r convention: u_m = sum c_j e^{i theta_j x_m} + c.c.
        spec[j] = 0.5 * amp * std::complex<double>(std::cos(psi), std::sin(psi));
    }
    GridFunction u(op.grid_ptr());
    for (auto& s : spec) s *= static_cast<double>(n);  // cancel the 1/N of inverse()
    std::vector<std::complex<double>> scratch = spec;
    op.inverse(scratch.data(), u.data());
    return u;
}

/// Dispatch a tagged initial condition on a grid.
inline GridFunction make_initial(const SpectralOperator& op, const InitialCondition& ic,
                                 const KdvParams& p, std::uint64_t seed) {
    return std::visit(
        [&](const auto& spec) -> GridFunction {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, SolitonIC>)
                return init_soliton(op.grid_ptr(), spec, p);
            else if constexpr (std::is_same_v<T, ThreeSolitonsIC>)
                return init_three_solitons(op.grid_ptr(), spec);
            else if constexpr (std::is_same_v<T, TwoSolitonIC>)
                return init_two_soliton(op.grid_ptr(), spec);
            else
                return init_bimodal(op, spec, seed);
        },
        ic);
}

}  // namespace kdv

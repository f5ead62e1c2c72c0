#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "kdv/grid.hpp"
#include "kdv/rng.hpp"

namespace kdv::testing {

/// White-noise grid data in [-1, 1].
inline GridFunction random_noise(const GridPtr& grid, SplitMix64& rng) {
    GridFunction u(grid);
    for (int j = 0; j < u.size(); ++j) u[j] = 2.0 * rng.uniform01() - 1.0;
    return u;
}

/// Random real trigonometric polynomial with modes 1..kmax (< N/2) and
/// amplitudes ~ 1/(1+k^2); smooth, band-limited, zero mean.
inline GridFunction random_trig(const GridPtr& grid, SplitMix64& rng, int kmax) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> amp(kmax + 1), phase(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
        amp[k] = (2.0 * rng.uniform01() - 1.0) / (1.0 + k * k);
        phase[k] = rng.angle();
    }
    GridFunction u(grid);
    const double L = grid->length();
    for (int j = 0; j < u.size(); ++j) {
        const double x = grid->node(j) - grid->left();
        double v = 0.0;
        for (int k = 1; k <= kmax; ++k) v += amp[k] * std::cos(two_pi * k * x / L + phase[k]);
        u[j] = v;
    }
    return u;
}

/// Same polynomial class differentiated analytically, for exactness oracles.
struct TrigPoly {
    std::vector<double> amp, phase;  // index k
    double left, length;

    double eval(double x, int deriv) const {
        const double two_pi = 2.0 * std::numbers::pi;
        double v = 0.0;
        for (size_t k = 1; k < amp.size(); ++k) {
            const double w = two_pi * static_cast<double>(k) / length;
            const double arg = w * (x - left) + phase[k];
            double term = 0.0;
            switch (deriv % 4) {
                case 0: term = std::cos(arg); break;
                case 1: term = -std::sin(arg); break;
                case 2: term = -std::cos(arg); break;
                case 3: term = std::sin(arg); break;
            }
            v += amp[k] * std::pow(w, deriv) * term;
        }
        return v;
    }
};

inline TrigPoly random_trig_poly(const GridPtr& grid, SplitMix64& rng, int kmax) {
    TrigPoly p;
    p.left = grid->left();
    p.length = grid->length();
    p.amp.assign(kmax + 1, 0.0);
    p.phase.assign(kmax + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        p.amp[k] = (2.0 * rng.uniform01() - 1.0) / (1.0 + k);
        p.phase[k] = rng.angle();
    }
    return p;
}

inline GridFunction sample_poly(const GridPtr& grid, const TrigPoly& p, int deriv = 0) {
    return GridFunction::sample(grid, [&](double x) { return p.eval(x, deriv); });
}

}  // namespace kdv::testing

#pragma once

#include <cstdint>

#include "kdv/grid.hpp"
#include "kdv/spectral.hpp"

namespace kdv {

/// u_t + eta u u_x + mu^2 u_xxx = 0. Only mu^2 enters the equations.
struct KdvParams {
    double eta = 1.0;
    double mu = 1.0;
};

/// mass (u,1)_h
inline double mass_h(const GridFunction& u) {
    double acc = 0.0;
    for (int j = 0; j < u.size(); ++j) acc += u[j];
    return u.grid().spacing() * acc;
}

/// momentum (u,u)_h
inline double momentum_h(const GridFunction& u) { return inner_h(u, u); }

/// Original energy H[u] = -eta/6 (u^3,1)_h + mu^2/2 ||D1 u||_h^2.
inline double hamiltonian_h(const SpectralOperator& op, const GridFunction& u,
                            const KdvParams& p) {
    double cubic = 0.0;
    for (int j = 0; j < u.size(); ++j) cubic += u[j] * u[j] * u[j];
    cubic *= u.grid().spacing();
    const GridFunction ux = op.apply_d1(u, 1);
    return -(p.eta / 6.0) * cubic + 0.5 * p.mu * p.mu * inner_h(ux, ux);
}

/// Modified (quadratic) energy E[u,q] = -eta/6 (u,q)_h + mu^2/2 ||D1 u||_h^2.
/// Coincides with hamiltonian_h when q = u^2.
inline double modified_energy_h(const SpectralOperator& op, const GridFunction& u,
                                const GridFunction& q, const KdvParams& p) {
    require_same_grid(u, q, "modified_energy_h");
    double quad = 0.0;
    for (int j = 0; j < u.size(); ++j) quad += q[j] * u[j];
    quad *= u.grid().spacing();
    const GridFunction ux = op.apply_d1(u, 1);
    return -(p.eta / 6.0) * quad + 0.5 * p.mu * p.mu * inner_h(ux, ux);
}

/// Variational derivative dH/du[u] = -eta/2 u^2 - mu^2 D1^2 u.
inline GridFunction grad_h(const SpectralOperator& op, const GridFunction& u,
                           const KdvParams& p) {
    GridFunction g = op.apply_d1(u, 2);
    const double mu2 = p.mu * p.mu;
    for (int j = 0; j < u.size(); ++j) g[j] = -(p.eta / 2.0) * u[j] * u[j] - mu2 * g[j];
    return g;
}

/// Per-step invariant sample written to the CSV time series.
struct InvariantRecord {
    std::int64_t step = 0;
    double t = 0.0;
    double mass = 0.0;
    double momentum = 0.0;
    double energy_H = 0.0;
    double energy_E = 0.0;  // equals energy_H unless the auxiliary state is tracked
    int iterations = 0;
    bool converged = true;
    double lambda_eip = 0.0;  // 0 when the projection is off or was skipped
};

}  // namespace kdv

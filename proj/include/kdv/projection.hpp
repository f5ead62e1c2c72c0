#pragma once

#include <cmath>
#include <string>

#include "kdv/model.hpp"

namespace kdv {

/// Invariants of the discrete initial state that the projection pins.
struct ReferenceInvariants {
    double mass0 = 0.0;
    double energy0 = 0.0;
    double domain_length = 0.0;
};

inline ReferenceInvariants reference_invariants(const SpectralOperator& op,
                                                const GridFunction& u0,
                                                const KdvParams& p) {
    return {mass_h(u0), hamiltonian_h(op, u0, p), u0.grid().length()};
}

enum class ProjectionMode { one_step, full_newton };

struct ProjectionResult {
    GridFunction u;
    double lambda = 0.0;
    int newton_iterations = 0;
};

/// Mass-exact, energy-correcting projection. The mean shift restores the
/// reference mass exactly; the energy constraint is then a scalar equation in
/// lambda along the zero-mean gradient direction psi. The default resolves it
/// with a single Newton step from lambda = 0; full_newton iterates the same
/// update until |H - energy0| <= 1e-13 (1 + |energy0|) or 50 iterations, and
/// exists mainly as a test oracle.
///
/// Throws DegenerateProjectionError when the Newton denominator
/// (dH/du[phi], psi)_h is below 1e-14 (1 + ||psi||_h^2); callers are expected
/// to skip the correction for that step.
inline ProjectionResult project_eip(const SpectralOperator& op, const GridFunction& u_tilde,
                                    const ReferenceInvariants& ref, const KdvParams& p,
                                    ProjectionMode mode = ProjectionMode::one_step) {
    const double L = ref.domain_length;

    GridFunction phi = u_tilde;
    const double mean_shift = (ref.mass0 - mass_h(u_tilde)) / L;
    for (int j = 0; j < phi.size(); ++j) phi[j] += mean_shift;

    GridFunction psi = grad_h(op, u_tilde, p);
    const double psi_mean = mass_h(psi) / L;
    for (int j = 0; j < psi.size(); ++j) psi[j] -= psi_mean;

    const auto denominator = [&](const GridFunction& at) {
        return inner_h(grad_h(op, at, p), psi);
    };
    const auto degenerate = [&](double den) {
        return std::abs(den) < 1e-14 * (1.0 + inner_h(psi, psi));
    };

    if (mode == ProjectionMode::one_step) {
        const double den = denominator(phi);
        if (degenerate(den))
            throw DegenerateProjectionError("project_eip: gradient direction is degenerate");
        const double lambda = -(hamiltonian_h(op, phi, p) - ref.energy0) / den;
        GridFunction u = phi;
        axpy(u, lambda, psi);
        return {std::move(u), lambda, 1};
    }

    double lambda = 0.0;
    GridFunction u = phi;
    int it = 0;
    for (; it < 50; ++it) {
        const double gap = hamiltonian_h(op, u, p) - ref.energy0;
        if (std::abs(gap) <= 1e-13 * (1.0 + std::abs(ref.energy0))) break;
        const double den = denominator(u);
        if (degenerate(den))
            throw DegenerateProjectionError("project_eip: gradient direction is degenerate");
        lambda -= gap / den;
        u = phi;
        axpy(u, lambda, psi);
    }
    return {std::move(u), lambda, it};
}

}  // namespace kdv

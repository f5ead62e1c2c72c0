#pragma once

#include "kdv/integrator.hpp"

namespace kdv {

/// Averaged-vector-field step,
///   (u^{n+1}-u^n)/dt = D1(-eta/6 ((u^n)^2 + u^n u^{n+1} + (u^{n+1})^2)
///                         - mu^2 D1^2 (u^n+u^{n+1})/2),
/// solved with the same linear-implicit splitting and stopping rule as the
/// stage iteration: in slope form the dispersion matrix is the 1-stage Gauss
/// system, only the explicit part differs.
class AvfStepper : public OneStepIntegrator {
public:
    AvfStepper(const SpectralOperator& op, const KdvParams& par, const SolverConfig& cfg)
        : OneStepIntegrator(op, par, cfg), core_(op, gauss_tableau(1), par, cfg) {}

    StepDiagnostics advance(GridFunction& u) override {
        prepare_projection_reference(u);
        core_.begin(u.values());
        const double dt = cfg_.dt;
        const double eta = par_.eta;
        StepDiagnostics d = core_.iterate([dt, eta](detail::FixedPointCore& c) {
            const int n = c.grid_size();
            const double* un = c.u_n.data();
            const double* un2 = c.un2.data();
            const double* k = c.k[0].data();
            double* g = c.g[0].data();
            for (int x = 0; x < n; ++x) {
                const double up = un[x] + dt * k[x];
                g[x] = -(eta / 6.0) * (un2[x] + un[x] * up + up * up);
            }
        });
        core_.apply_update(u.values());
        project_if_enabled(u, d);
        return d;
    }

private:
    detail::FixedPointCore core_;
};

/// Classic implicit Gauss RK applied directly to the original
/// semi-discretization u_t = D1(-eta/2 u^2 - mu^2 D1^2 u). Symplectic, so it
/// conserves the quadratic invariants, but not the cubic energy. Shares the
/// stage solver so baseline timings isolate the formulation.
class GrkStepper : public OneStepIntegrator {
public:
    GrkStepper(const SpectralOperator& op, const ButcherTableau& tab, const KdvParams& par,
               const SolverConfig& cfg)
        : OneStepIntegrator(op, par, cfg), core_(op, tab, par, cfg) {
        if (symplectic_residual(tab) > 1e-12)
            throw ConfigError("grk: tableau violates the symplectic condition");
    }

    StepDiagnostics advance(GridFunction& u) override {
        prepare_projection_reference(u);
        core_.begin(u.values());
        const double eta = par_.eta;
        StepDiagnostics d = core_.iterate([eta](detail::FixedPointCore& c) {
            const int n = c.grid_size();
            for (int i = 0; i < c.stages(); ++i) {
                const double* Ui = c.U[i].data();
                double* gi = c.g[i].data();
                for (int x = 0; x < n; ++x) gi[x] = -(eta / 2.0) * Ui[x] * Ui[x];
            }
        });
        core_.apply_update(u.values());
        project_if_enabled(u, d);
        return d;
    }

private:
    detail::FixedPointCore core_;
};

inline std::pair<GridFunction, StepDiagnostics> avf_step(const SpectralOperator& op,
                                                         const GridFunction& u_n,
                                                         const KdvParams& p,
                                                         const SolverConfig& cfg) {
    AvfStepper stepper(op, p, cfg);
    GridFunction u = u_n;
    StepDiagnostics d = stepper.advance(u);
    return {std::move(u), d};
}

inline std::pair<GridFunction, StepDiagnostics> grk_step(const SpectralOperator& op,
                                                         const GridFunction& u_n,
                                                         const ButcherTableau& tab,
                                                         const KdvParams& p,
                                                         const SolverConfig& cfg) {
    GrkStepper stepper(op, tab, p, cfg);
    GridFunction u = u_n;
    StepDiagnostics d = stepper.advance(u);
    return {std::move(u), d};
}

}  // namespace kdv

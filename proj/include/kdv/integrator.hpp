#pragma once

#include <complex>
#include <cstring>
#include <optional>
#include <utility>
#include <vector>

#include "kdv/detail/small_linalg.hpp"
#include "kdv/model.hpp"
#include "kdv/projection.hpp"
#include "kdv/tableau.hpp"

namespace kdv {

struct SolverConfig {
    double dt = 0.1;
    double tol = 1e-14;                                      // stage iteration tolerance
    int max_iter = 100;                                      // stage iteration cap
    bool eip = false;                                        // post-step invariant projection
    ProjectionMode eip_mode = ProjectionMode::one_step;
    bool warm_start = false;                                 // reuse previous stage slopes
};

struct StepDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    double lambda_eip = 0.0;
    bool projection_skipped = false;
};

/// Converged intermediate values of one step.
struct StageSet {
    std::vector<GridFunction> states;      // U_i
    std::vector<GridFunction> aux;         // Q_i
    std::vector<GridFunction> slopes;      // k_i
    std::vector<GridFunction> aux_slopes;  // l_i = 2 U_i k_i (joint scheme only)
};

/// k = D1(-eta/6 Q - eta/3 U^2 - mu^2 D1^2 U). The result is a perfect
/// spatial derivative, so its discrete mean vanishes.
inline GridFunction stage_rhs(const SpectralOperator& op, const GridFunction& U,
                              const GridFunction& Q, const KdvParams& p) {
    require_same_grid(U, Q, "stage_rhs");
    GridFunction inner = op.apply_d1(U, 2);
    const double mu2 = p.mu * p.mu;
    for (int j = 0; j < U.size(); ++j)
        inner[j] = -(p.eta / 6.0) * Q[j] - (p.eta / 3.0) * U[j] * U[j] - mu2 * inner[j];
    return op.apply_d1(inner, 1);
}

namespace detail {

/// Per-Fourier-mode LU factors of C(theta) = I - i mu^2 dt theta^3 A. The
/// implicit part of the stage system couples stages only through the
/// constant-coefficient dispersion, so it decouples into an s x s complex
/// solve per wavenumber.
class StageLinearSolver {
public:
    static constexpr int kMaxStages = 16;

    StageLinearSolver(const SpectralOperator& op, const ButcherTableau& tab,
                      const KdvParams& par, double dt)
        : s_(tab.s), modes_(op.modes()),
          lu_(static_cast<size_t>(modes_) * s_ * s_),
          piv_(static_cast<size_t>(modes_) * s_) {
        if (s_ < 1 || s_ > kMaxStages)
            throw ConfigError("stage solver: unsupported stage count");
        const double mu2dt = par.mu * par.mu * dt;
        const auto& theta = op.wavenumbers();
        for (int m = 0; m < modes_; ++m) {
            const double t3 = theta[m] * theta[m] * theta[m];
            const std::complex<double> w(0.0, -mu2dt * t3);
            std::complex<double>* c = &lu_[static_cast<size_t>(m) * s_ * s_];
            for (int i = 0; i < s_; ++i)
                for (int j = 0; j < s_; ++j)
                    c[i * s_ + j] = (i == j ? 1.0 : 0.0) + w * tab.at(i, j);
            if (!lu_factor(c, s_, &piv_[static_cast<size_t>(m) * s_]))
                throw ConfigError("stage solver: singular implicit system");
        }
    }

    int stages() const { return s_; }

    /// Solve the per-mode systems in place; `spec[i]` is stage i's spectrum.
    void solve(std::complex<double>* const* spec) const {
        std::complex<double> x[kMaxStages];
        for (int m = 0; m < modes_; ++m) {
            for (int i = 0; i < s_; ++i) x[i] = spec[i][m];
            lu_solve(&lu_[static_cast<size_t>(m) * s_ * s_],
                     &piv_[static_cast<size_t>(m) * s_], s_, x);
            for (int i = 0; i < s_; ++i) spec[i][m] = x[i];
        }
    }

private:
    int s_;
    int modes_;
    std::vector<std::complex<double>> lu_;
    std::vector<int> piv_;
};

/// Workspace and fixed-point loop shared by the linear-implicit steppers.
/// One iteration forms the explicit nonlinear part g_i from the current
/// iterate and then solves
///     k_i + mu^2 dt sum_j a_ij D1^3 k_j = D1 g_i - mu^2 D1^3 u^n
/// for all stages jointly, which is exact in the dispersion term.
class FixedPointCore {
public:
    FixedPointCore(const SpectralOperator& op, const ButcherTableau& tab,
                   const KdvParams& par, const SolverConfig& cfg)
        : op_(op), tab_(tab), par_(par), cfg_(cfg), n_(op.size()), s_(tab.s),
          modes_(op.modes()), solver_(op, tab, par, cfg.dt) {
        if (!(cfg.dt != 0.0) || !std::isfinite(cfg.dt))
            throw ConfigError("solver: time step must be a nonzero finite number");
        if (!(cfg.tol > 0.0)) throw ConfigError("solver: tolerance must be positive");
        if (cfg.max_iter < 1) throw ConfigError("solver: iteration cap must be >= 1");
        u_n.resize(n_);
        un2.resize(n_);
        const auto field = std::vector<double>(n_, 0.0);
        U.assign(s_, field);
        k.assign(s_, field);
        k_prev.assign(s_, field);
        g.assign(s_, field);
        uk.assign(s_, field);
        spec_.assign(s_, std::vector<std::complex<double>>(modes_));
        spec_ptr_.resize(s_);
        u_hat_.resize(modes_);
        disp_hat_.resize(modes_);
    }

    const SpectralOperator& op() const { return op_; }
    const ButcherTableau& tableau() const { return tab_; }
    const KdvParams& params() const { return par_; }
    const SolverConfig& config() const { return cfg_; }
    int stages() const { return s_; }
    int grid_size() const { return n_; }

    /// Load the current state u^n: caches u^n, (u^n)^2 and mu^2 D1^3 u^n.
    void begin(const std::vector<double>& u) {
        u_n = u;
        for (int j = 0; j < n_; ++j) un2[j] = u[j] * u[j];
        op_.forward(u_n.data(), u_hat_.data());
        const double mu2 = par_.mu * par_.mu;
        const auto& theta = op_.wavenumbers();
        for (int m = 0; m < modes_; ++m) {
            const double t3 = theta[m] * theta[m] * theta[m];
            disp_hat_[m] = u_hat_[m] * std::complex<double>(0.0, -mu2 * t3);
        }
        if (!cfg_.warm_start) cold_ = true;
    }

    /// U_i = u^n + dt sum_j a_ij k_j from the current slope iterate.
    void form_stage_states() {
        for (int i = 0; i < s_; ++i) {
            std::memcpy(U[i].data(), u_n.data(), sizeof(double) * n_);
            for (int j = 0; j < s_; ++j) {
                const double w = cfg_.dt * tab_.at(i, j);
                if (w == 0.0) continue;
                const double* kj = k[j].data();
                double* ui = U[i].data();
                for (int x = 0; x < n_; ++x) ui[x] += w * kj[x];
            }
        }
    }

    /// Fixed-point loop; `fill_g` must populate g from U and k (iterate m).
    template <class FillG>
    StepDiagnostics iterate(const FillG& fill_g) {
        StepDiagnostics d;
        if (cold_) {
            for (auto& ki : k) std::fill(ki.begin(), ki.end(), 0.0);
            cold_ = false;
        }
        for (int m = 0; m < cfg_.max_iter; ++m) {
            form_stage_states();
            fill_g(*this);
            k.swap(k_prev);
            for (int i = 0; i < s_; ++i) {
                op_.forward(g[i].data(), spec_[i].data());
                const auto& theta = op_.wavenumbers();
                for (int mm = 0; mm < modes_; ++mm)
                    spec_[i][mm] = spec_[i][mm] * std::complex<double>(0.0, theta[mm]) -
                                   disp_hat_[mm];
                spec_ptr_[i] = spec_[i].data();
            }
            solver_.solve(spec_ptr_.data());
            for (int i = 0; i < s_; ++i) op_.inverse(spec_[i].data(), k[i].data());

            // Relative stopping rule, with an absolute fallback for zero
            // slopes. The guard sum propagates NaN/Inf (std::max would not).
            double res = 0.0;
            double guard = 0.0;
            for (int i = 0; i < s_; ++i) {
                double dmax = 0.0, nmax = 0.0;
                const double* kn = k[i].data();
                const double* ko = k_prev[i].data();
                for (int x = 0; x < n_; ++x) {
                    dmax = std::max(dmax, std::abs(kn[x] - ko[x]));
                    nmax = std::max(nmax, std::abs(kn[x]));
                    guard += kn[x];
                }
                res = std::max(res, nmax < 1e-30 ? dmax : dmax / nmax);
            }
            d.iterations = m + 1;
            d.final_residual = res;
            if (!std::isfinite(res) || !std::isfinite(guard))
                throw SolverDivergenceError("stage iteration produced non-finite values",
                                            m + 1);
            if (res < cfg_.tol) {
                d.converged = true;
                break;
            }
        }
        return d;
    }

    /// u <- u + dt sum_i b_i k_i
    void apply_update(std::vector<double>& u) const {
        for (int i = 0; i < s_; ++i) {
            const double w = cfg_.dt * tab_.b[i];
            const double* ki = k[i].data();
            for (int x = 0; x < n_; ++x) u[x] += w * ki[x];
        }
    }

    // Iteration buffers, exposed to the scheme-specific g builders.
    std::vector<double> u_n, un2;
    std::vector<std::vector<double>> U, k, k_prev, g, uk;

private:
    const SpectralOperator& op_;
    ButcherTableau tab_;
    KdvParams par_;
    SolverConfig cfg_;
    int n_, s_, modes_;
    StageLinearSolver solver_;
    std::vector<std::vector<std::complex<double>>> spec_;
    std::vector<std::complex<double>*> spec_ptr_;
    std::vector<std::complex<double>> u_hat_, disp_hat_;
    bool cold_ = true;
};

/// g_i = -eta/6 Q_i - eta/3 U_i^2 with Q_i = base + 2 dt sum_j a_ij U_j k_j.
/// `base` is (u^n)^2 for the reduced scheme and q^n for the joint scheme.
inline void fill_g_quadratic_aux(FixedPointCore& c, const std::vector<double>& base) {
    const int s = c.stages();
    const int n = c.grid_size();
    const double dt = c.config().dt;
    const double eta = c.params().eta;
    for (int j = 0; j < s; ++j) {
        const double* Uj = c.U[j].data();
        const double* kj = c.k[j].data();
        double* ukj = c.uk[j].data();
        for (int x = 0; x < n; ++x) ukj[x] = Uj[x] * kj[x];
    }
    for (int i = 0; i < s; ++i) {
        double* gi = c.g[i].data();
        std::memcpy(gi, base.data(), sizeof(double) * n);
        for (int j = 0; j < s; ++j) {
            const double w = 2.0 * dt * c.tableau().at(i, j);
            if (w == 0.0) continue;
            const double* ukj = c.uk[j].data();
            for (int x = 0; x < n; ++x) gi[x] += w * ukj[x];
        }
        const double* Ui = c.U[i].data();
        for (int x = 0; x < n; ++x)
            gi[x] = -(eta / 6.0) * gi[x] - (eta / 3.0) * Ui[x] * Ui[x];
    }
}

}  // namespace detail

/// Interface shared by the steppers that evolve a single field, plus the
/// optional post-step invariant projection. When the projection is on and no
/// reference was supplied, the first state handed to advance() defines it.
class OneStepIntegrator {
public:
    virtual ~OneStepIntegrator() = default;

    virtual StepDiagnostics advance(GridFunction& u) = 0;

    void enable_projection(const ReferenceInvariants& ref) { ref_ = ref; }
    const std::optional<ReferenceInvariants>& projection_reference() const { return ref_; }

protected:
    OneStepIntegrator(const SpectralOperator& op, const KdvParams& par,
                      const SolverConfig& cfg)
        : op_(op), par_(par), cfg_(cfg) {}

    void prepare_projection_reference(const GridFunction& u) {
        if (cfg_.eip && !ref_) ref_ = reference_invariants(op_, u, par_);
    }

    void project_if_enabled(GridFunction& u, StepDiagnostics& d) {
        if (!cfg_.eip) return;
        try {
            ProjectionResult r = project_eip(op_, u, *ref_, par_, cfg_.eip_mode);
            u = std::move(r.u);
            d.lambda_eip = r.lambda;
        } catch (const DegenerateProjectionError&) {
            d.projection_skipped = true;  // keep the uncorrected step
        }
    }

    const SpectralOperator& op_;
    KdvParams par_;
    SolverConfig cfg_;
    std::optional<ReferenceInvariants> ref_;
};

/// Energy-preserving RK step for u alone; the auxiliary variable is folded in
/// through Q_i = (u^n)^2 + 2 dt sum_j a_ij U_j k_j.
class QavEprkStepper : public OneStepIntegrator {
public:
    QavEprkStepper(const SpectralOperator& op, const ButcherTableau& tab,
                   const KdvParams& par, const SolverConfig& cfg)
        : OneStepIntegrator(op, par, cfg), core_(op, tab, par, cfg) {
        if (symplectic_residual(tab) > 1e-12)
            throw ConfigError("qav_eprk: tableau violates the symplectic condition");
    }

    StepDiagnostics advance(GridFunction& u) override {
        prepare_projection_reference(u);
        core_.begin(u.values());
        StepDiagnostics d = core_.iterate(
            [](detail::FixedPointCore& c) { detail::fill_g_quadratic_aux(c, c.un2); });
        core_.apply_update(u.values());
        project_if_enabled(u, d);
        return d;
    }

    /// Solve the stage system only; states and auxiliaries are rebuilt from
    /// the converged slopes.
    std::pair<StageSet, StepDiagnostics> solve_stages(const GridFunction& u) {
        core_.begin(u.values());
        StepDiagnostics d = core_.iterate(
            [](detail::FixedPointCore& c) { detail::fill_g_quadratic_aux(c, c.un2); });
        return {extract_stages(core_, core_.un2, u.grid_ptr()), d};
    }

    static StageSet extract_stages(detail::FixedPointCore& c, const std::vector<double>& base,
                                   const GridPtr& grid) {
        c.form_stage_states();
        StageSet set;
        const int s = c.stages();
        const int n = c.grid_size();
        const double dt = c.config().dt;
        for (int i = 0; i < s; ++i) {
            GridFunction Ui(grid), Qi(grid), ki(grid), li(grid);
            std::memcpy(Ui.data(), c.U[i].data(), sizeof(double) * n);
            std::memcpy(ki.data(), c.k[i].data(), sizeof(double) * n);
            for (int x = 0; x < n; ++x) Qi[x] = base[x];
            for (int j = 0; j < s; ++j) {
                const double w = 2.0 * dt * c.tableau().at(i, j);
                for (int x = 0; x < n; ++x) Qi[x] += w * c.U[j][x] * c.k[j][x];
            }
            for (int x = 0; x < n; ++x) li[x] = 2.0 * Ui[x] * ki[x];
            set.states.push_back(std::move(Ui));
            set.aux.push_back(std::move(Qi));
            set.slopes.push_back(std::move(ki));
            set.aux_slopes.push_back(std::move(li));
        }
        return set;
    }

private:
    detail::FixedPointCore core_;
};

/// RK step for the joint (u, q) system. With q^n = (u^n)^2 it reproduces the
/// reduced stepper; with an inconsistent q^n the defect q - u^2 is carried
/// along unchanged.
class QavRkWithQStepper {
public:
    QavRkWithQStepper(const SpectralOperator& op, const ButcherTableau& tab,
                      const KdvParams& par, const SolverConfig& cfg)
        : op_(op), par_(par), cfg_(cfg), core_(op, tab, par, cfg) {
        if (symplectic_residual(tab) > 1e-12)
            throw ConfigError("qav_rk: tableau violates the symplectic condition");
    }

    StepDiagnostics advance(GridFunction& u, GridFunction& q) {
        require_same_grid(u, q, "qav_rk_with_q");
        core_.begin(u.values());
        const std::vector<double>& qn = q.values();
        StepDiagnostics d = core_.iterate(
            [&qn](detail::FixedPointCore& c) { detail::fill_g_quadratic_aux(c, qn); });
        // q^{n+1} = q^n + dt sum_i b_i l_i with l_i = 2 U_i k_i at the
        // converged stages, then the u update.
        core_.form_stage_states();
        const int n = core_.grid_size();
        for (int i = 0; i < core_.stages(); ++i) {
            const double w = 2.0 * cfg_.dt * core_.tableau().b[i];
            const double* Ui = core_.U[i].data();
            const double* ki = core_.k[i].data();
            for (int x = 0; x < n; ++x) q[x] += w * Ui[x] * ki[x];
        }
        core_.apply_update(u.values());
        return d;
    }

    std::pair<StageSet, StepDiagnostics> solve_stages(const GridFunction& u,
                                                      const GridFunction& q) {
        core_.begin(u.values());
        const std::vector<double>& qn = q.values();
        StepDiagnostics d = core_.iterate(
            [&qn](detail::FixedPointCore& c) { detail::fill_g_quadratic_aux(c, qn); });
        return {QavEprkStepper::extract_stages(core_, q.values(), u.grid_ptr()), d};
    }

private:
    const SpectralOperator& op_;
    KdvParams par_;
    SolverConfig cfg_;
    detail::FixedPointCore core_;
};

inline std::pair<StageSet, StepDiagnostics> fixed_point_solve(
    const SpectralOperator& op, const GridFunction& u_n, const ButcherTableau& tab,
    const KdvParams& p, const SolverConfig& cfg) {
    QavEprkStepper stepper(op, tab, p, cfg);
    return stepper.solve_stages(u_n);
}

inline std::pair<GridFunction, StepDiagnostics> qav_eprk_step(
    const SpectralOperator& op, const GridFunction& u_n, const ButcherTableau& tab,
    const KdvParams& p, const SolverConfig& cfg) {
    QavEprkStepper stepper(op, tab, p, cfg);
    GridFunction u = u_n;
    StepDiagnostics d = stepper.advance(u);
    return {std::move(u), d};
}

inline std::tuple<GridFunction, GridFunction, StepDiagnostics> qav_rk_step_with_q(
    const SpectralOperator& op, const GridFunction& u_n, const GridFunction& q_n,
    const ButcherTableau& tab, const KdvParams& p, const SolverConfig& cfg) {
    QavRkWithQStepper stepper(op, tab, p, cfg);
    GridFunction u = u_n;
    GridFunction q = q_n;
    StepDiagnostics d = stepper.advance(u, q);
    return {std::move(u), std::move(q), d};
}

}  // namespace kdv

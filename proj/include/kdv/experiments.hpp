#pragma once

#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdv/baselines.hpp"
#include "kdv/initial.hpp"
#include "kdv/integrator.hpp"

namespace kdv {

enum class Scheme {
    qav_eprk_1,
    qav_eprk_2,
    qav_eprk_3,
    qav_rk_with_q,
    grk_2,
    grk_3,
    avf,
};

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::qav_eprk_1: return "qav_eprk_1";
        case Scheme::qav_eprk_2: return "qav_eprk_2";
        case Scheme::qav_eprk_3: return "qav_eprk_3";
        case Scheme::qav_rk_with_q: return "qav_rk_with_q";
        case Scheme::grk_2: return "grk_2";
        case Scheme::grk_3: return "grk_3";
        case Scheme::avf: return "avf";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::qav_eprk_1, Scheme::qav_eprk_2, Scheme::qav_eprk_3,
                     Scheme::qav_rk_with_q, Scheme::grk_2, Scheme::grk_3, Scheme::avf})
        if (name == scheme_name(s)) return s;
    throw ConfigError("unknown scheme '" + name + "'");
}

struct ExperimentConfig {
    Scheme scheme = Scheme::qav_eprk_2;
    double domain_a = -40.0;
    double domain_b = 40.0;
    int grid_n = 512;
    double dt = 0.1;
    double t_final = 1.0;
    KdvParams params{};
    SolverConfig solver{};  // solver.dt is ignored; `dt` above is authoritative
    InitialCondition initial = SolitonIC{};
    std::uint64_t seed = 0;
    std::string output_path;
    int record_every = 1;

    SolverConfig effective_solver() const {
        SolverConfig s = solver;
        s.dt = dt;
        return s;
    }
};

inline std::int64_t step_count(const ExperimentConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");
    if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
    const auto n = static_cast<std::int64_t>(std::llround(cfg.t_final / cfg.dt));
    if (std::abs(static_cast<double>(n) * cfg.dt - cfg.t_final) >
        1e-8 * std::max(1.0, std::abs(cfg.t_final)))
        throw ConfigError("t_final must be an integer multiple of dt");
    return n;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const std::vector<InvariantRecord>& records,
                      double mass0, double energy0) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << "step,t,mass,momentum,energy_H,energy_E,mass_err,energy_err,"
           "iterations,converged,lambda_eip\n";
    for (const auto& r : records) {
        out << r.step << ',' << format_g17(r.t) << ',' << format_g17(r.mass) << ','
            << format_g17(r.momentum) << ',' << format_g17(r.energy_H) << ','
            << format_g17(r.energy_E) << ',' << format_g17(r.mass - mass0) << ','
            << format_g17(r.energy_H - energy0) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << ',' << format_g17(r.lambda_eip) << '\n';
    }
}

inline std::unique_ptr<OneStepIntegrator> make_stepper(const SpectralOperator& op,
                                                       Scheme scheme, const KdvParams& par,
                                                       const SolverConfig& cfg) {
    switch (scheme) {
        case Scheme::qav_eprk_1:
            return std::make_unique<QavEprkStepper>(op, gauss_tableau(1), par, cfg);
        case Scheme::qav_eprk_2:
            return std::make_unique<QavEprkStepper>(op, gauss_tableau(2), par, cfg);
        case Scheme::qav_eprk_3:
            return std::make_unique<QavEprkStepper>(op, gauss_tableau(3), par, cfg);
        case Scheme::grk_2:
            return std::make_unique<GrkStepper>(op, gauss_tableau(2), par, cfg);
        case Scheme::grk_3:
            return std::make_unique<GrkStepper>(op, gauss_tableau(3), par, cfg);
        case Scheme::avf:
            return std::make_unique<AvfStepper>(op, par, cfg);
        case Scheme::qav_rk_with_q:
            throw ConfigError("qav_rk_with_q needs the joint-state driver");
    }
    throw ConfigError("unknown scheme");
}

struct SimulationResult {
    std::vector<InvariantRecord> records;
    GridFunction final_state;
    std::optional<GridFunction> final_q;
    ReferenceInvariants reference;
};

/// Step from t = 0 to t_final recording invariants every `record_every`
/// steps (plus the initial and final states) and optionally writing the CSV
/// time series. The joint (u,q) scheme starts from the consistent q0 = u0^2
/// and additionally records the modified energy; every other scheme reports
/// energy_E = energy_H.
inline SimulationResult simulate(const ExperimentConfig& cfg) {
    const std::int64_t n_steps = step_count(cfg);
    const GridPtr grid = make_grid(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    const SpectralOperator op(grid);
    const SolverConfig solver = cfg.effective_solver();

    GridFunction u = make_initial(op, cfg.initial, cfg.params, cfg.seed);
    const ReferenceInvariants ref = reference_invariants(op, u, cfg.params);

    const bool joint = cfg.scheme == Scheme::qav_rk_with_q;
    std::optional<GridFunction> q;
    std::unique_ptr<OneStepIntegrator> stepper;
    std::unique_ptr<QavRkWithQStepper> joint_stepper;
    if (joint) {
        q = squared(u);
        // The joint form exists to exercise the (u,q) invariants; it is
        // exposed with the 2-stage Gauss tableau.
        joint_stepper =
            std::make_unique<QavRkWithQStepper>(op, gauss_tableau(2), cfg.params, solver);
    } else {
        stepper = make_stepper(op, cfg.scheme, cfg.params, solver);
        stepper->enable_projection(ref);
    }

    std::vector<InvariantRecord> records;
    const auto record = [&](std::int64_t n, const StepDiagnostics& d) {
        InvariantRecord r;
        r.step = n;
        r.t = static_cast<double>(n) * cfg.dt;
        r.mass = mass_h(u);
        r.momentum = momentum_h(u);
        r.energy_H = hamiltonian_h(op, u, cfg.params);
        r.energy_E = q ? modified_energy_h(op, u, *q, cfg.params) : r.energy_H;
        r.iterations = d.iterations;
        r.converged = d.converged;
        r.lambda_eip = d.lambda_eip;
        records.push_back(r);
    };

    StepDiagnostics initial_diag;
    initial_diag.converged = true;
    record(0, initial_diag);

    for (std::int64_t n = 1; n <= n_steps; ++n) {
        StepDiagnostics d;
        try {
            if (joint) {
                d = joint_stepper->advance(u, *q);
                if (solver.eip) {
                    try {
                        ProjectionResult pr = project_eip(op, u, ref, cfg.params, solver.eip_mode);
                        u = std::move(pr.u);
                        d.lambda_eip = pr.lambda;
                    } catch (const DegenerateProjectionError&) {
                        d.projection_skipped = true;
                    }
                }
            } else {
                d = stepper->advance(u);
            }
        } catch (const SolverDivergenceError& e) {
            throw SolverDivergenceError(
                "simulation aborted at step " + std::to_string(n) + ": " + e.what(),
                e.iteration());
        }
        if (d.projection_skipped)
            std::fprintf(stderr, "kdv: projection skipped at step %lld (degenerate direction)\n",
                         static_cast<long long>(n));
        if (n % cfg.record_every == 0 || n == n_steps) record(n, d);
    }

    if (!cfg.output_path.empty()) write_csv(cfg.output_path, records, ref.mass0, ref.energy0);

    SimulationResult res{std::move(records), std::move(u), std::move(q), ref};
    return res;
}

inline std::vector<InvariantRecord> run_simulation(const ExperimentConfig& cfg) {
    return simulate(cfg).records;
}

enum class RefinementAxis { time, space };

struct RefinementRow {
    double resolution = 0.0;  // dt (time axis) or N (space axis)
    double l2_error = 0.0;
    double linf_error = 0.0;
    double order_l2 = 0.0;    // NaN in the first row
    double order_linf = 0.0;
};

namespace detail {

inline GridFunction exact_final_state(const ExperimentConfig& cfg, const GridPtr& grid) {
    const auto* sol = std::get_if<SolitonIC>(&cfg.initial);
    if (sol == nullptr)
        throw ConfigError("refinement study: no closed-form solution for this initial "
                          "condition; supply a reference configuration");
    return GridFunction::sample(grid, [&](double x) {
        return soliton_exact(x, cfg.t_final, sol->c, sol->x0, cfg.params);
    });
}

}  // namespace detail

/// Error-vs-resolution table at t_final. Errors are measured against the
/// closed-form soliton when available, otherwise against the supplied
/// (strictly finer) reference run on the same grid. Observed orders between
/// consecutive levels are log(e_i/e_{i+1}) / log(r_i/r_{i+1}) in the
/// respective resolution measure.
inline std::vector<RefinementRow> refinement_study(
    const ExperimentConfig& base, RefinementAxis axis, const std::vector<double>& levels,
    const std::optional<ExperimentConfig>& reference = std::nullopt) {
    if (levels.empty()) throw ConfigError("refinement study: no levels given");

    std::optional<GridFunction> ref_state;
    if (axis == RefinementAxis::time && reference) {
        for (double dt : levels)
            if (!(reference->dt < dt))
                throw ConfigError("refinement study: reference must be strictly finer "
                                  "than every level");
        if (reference->grid_n != base.grid_n || reference->domain_a != base.domain_a ||
            reference->domain_b != base.domain_b)
            throw ConfigError("refinement study: reference must use the same grid");
        ref_state = simulate(*reference).final_state;
    }

    std::vector<RefinementRow> rows;
    for (double level : levels) {
        ExperimentConfig cfg = base;
        cfg.output_path.clear();
        if (axis == RefinementAxis::time)
            cfg.dt = level;
        else
            cfg.grid_n = static_cast<int>(level);
        SimulationResult run = simulate(cfg);

        GridFunction diff = run.final_state;
        if (ref_state) {
            diff -= *ref_state;
        } else {
            diff -= detail::exact_final_state(cfg, run.final_state.grid_ptr());
        }
        RefinementRow row;
        row.resolution = level;
        row.l2_error = norm_h(diff);
        row.linf_error = max_abs(diff);
        row.order_l2 = row.order_linf = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    for (size_t i = 1; i < rows.size(); ++i) {
        const double ratio = (axis == RefinementAxis::time)
                                 ? std::log(rows[i - 1].resolution / rows[i].resolution)
                                 : std::log(rows[i].resolution / rows[i - 1].resolution);
        rows[i].order_l2 = std::log(rows[i - 1].l2_error / rows[i].l2_error) / ratio;
        rows[i].order_linf = std::log(rows[i - 1].linf_error / rows[i].linf_error) / ratio;
    }
    return rows;
}

}  // namespace kdv

// Command-line driver: runs the benchmark problems, free-form configuration
// files and the accuracy studies, and emits CSV / plot-ready data.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdv/kdv.hpp"

namespace {

struct CommonOpts {
    std::optional<std::string> scheme;
    std::optional<double> dt;
    std::optional<int> grid_n;
    std::optional<double> t_final;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::string> eip;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> record_every;
    std::string plot_prefix;
    bool gnuplot = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scheme", o.scheme,
                    "qav_eprk_1|qav_eprk_2|qav_eprk_3|qav_rk_with_q|grk_2|grk_3|avf");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--grid-n", o.grid_n, "number of grid nodes (even)");
    cmd->add_option("--t-final", o.t_final, "final time");
    cmd->add_option("--tol", o.tol, "stage iteration tolerance");
    cmd->add_option("--max-iter", o.max_iter, "stage iteration cap");
    cmd->add_option("--eip", o.eip, "invariant projection: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--seed", o.seed, "random seed (bimodal initial data)");
    cmd->add_option("--out", o.out, "CSV output path");
    cmd->add_option("--record-every", o.record_every, "record cadence in steps");
    cmd->add_option("--plot-data", o.plot_prefix, "write two-column plot files <prefix>.*.dat");
    cmd->add_flag("--gnuplot", o.gnuplot, "also write a gnuplot script next to the plot data");
}

void apply_common_options(const CommonOpts& o, kdv::ExperimentConfig& cfg) {
    if (o.scheme) cfg.scheme = kdv::parse_scheme(*o.scheme);
    if (o.dt) cfg.dt = *o.dt;
    if (o.grid_n) cfg.grid_n = *o.grid_n;
    if (o.t_final) cfg.t_final = *o.t_final;
    if (o.tol) cfg.solver.tol = *o.tol;
    if (o.max_iter) cfg.solver.max_iter = *o.max_iter;
    if (o.eip) cfg.solver.eip = (*o.eip == "on");
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_path = *o.out;
    if (o.record_every) cfg.record_every = *o.record_every;
}

void write_series(const std::string& path, const std::vector<double>& x,
                  const std::vector<double>& y) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw kdv::ConfigError("cannot open plot file '" + path + "'");
    for (size_t i = 0; i < x.size(); ++i)
        f << kdv::format_g17(x[i]) << ' ' << kdv::format_g17(y[i]) << '\n';
}

void emit_run_plots(const CommonOpts& o, const kdv::SimulationResult& res) {
    if (o.plot_prefix.empty()) return;
    const auto& rec = res.records;
    std::vector<double> t, eh, em, ep;
    const double h0 = res.reference.energy0;
    const double m0 = res.reference.mass0;
    const double p0 = rec.front().momentum;
    for (const auto& r : rec) {
        t.push_back(r.t);
        eh.push_back(std::abs(r.energy_H - h0) / (1.0 + std::abs(h0)));
        em.push_back(std::abs(r.mass - m0) / (1.0 + std::abs(m0)));
        ep.push_back(std::abs(r.momentum - p0) / (1.0 + std::abs(p0)));
    }
    write_series(o.plot_prefix + ".energy.dat", t, eh);
    write_series(o.plot_prefix + ".mass.dat", t, em);
    write_series(o.plot_prefix + ".momentum.dat", t, ep);
    {
        const auto& u = res.final_state;
        std::ofstream f(o.plot_prefix + ".solution.dat", std::ios::binary);
        for (int j = 0; j < u.size(); ++j)
            f << kdv::format_g17(u.grid().node(j)) << ' ' << kdv::format_g17(u[j]) << '\n';
    }
    if (o.gnuplot) {
        std::ofstream f(o.plot_prefix + ".gp");
        f << "set logscale y\nset xlabel 't'\nset ylabel 'relative drift'\n"
          << "plot '" << o.plot_prefix << ".energy.dat' w l t 'energy', '"
          << o.plot_prefix << ".mass.dat' w l t 'mass', '"
          << o.plot_prefix << ".momentum.dat' w l t 'momentum'\n";
    }
}

int run_and_report(const CommonOpts& o, const kdv::ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    kdv::SimulationResult res = kdv::simulate(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double h0 = res.reference.energy0;
    const double m0 = res.reference.mass0;
    double max_eh = 0.0, max_em = 0.0;
    int max_it = 0;
    long long not_converged = 0;
    for (const auto& r : res.records) {
        max_eh = std::max(max_eh, std::abs(r.energy_H - h0) / (1.0 + std::abs(h0)));
        max_em = std::max(max_em, std::abs(r.mass - m0) / (1.0 + std::abs(m0)));
        max_it = std::max(max_it, r.iterations);
        if (!r.converged && r.step > 0) ++not_converged;
    }
    std::printf("scheme          %s\n", kdv::scheme_name(cfg.scheme));
    std::printf("grid            [%g, %g), N = %d\n", cfg.domain_a, cfg.domain_b, cfg.grid_n);
    std::printf("dt, T           %g, %g  (%lld steps)\n", cfg.dt, cfg.t_final,
                static_cast<long long>(kdv::step_count(cfg)));
    std::printf("eip             %s (tol %g)\n", cfg.solver.eip ? "on" : "off", cfg.solver.tol);
    std::printf("mass0, H0       %.17g, %.17g\n", m0, h0);
    std::printf("max |dH|/(1+|H0|)    %.3e\n", max_eh);
    std::printf("max |dm|/(1+|m0|)    %.3e\n", max_em);
    std::printf("max iterations  %d; non-converged steps: %lld\n", max_it, not_converged);
    std::printf("wall time       %.2f s\n", secs);
    if (!cfg.output_path.empty()) std::printf("csv             %s\n", cfg.output_path.c_str());
    emit_run_plots(o, res);
    return 0;
}

int run_accuracy(const CommonOpts& o, const std::string& axis, std::vector<double> levels) {
    kdv::ExperimentConfig base;
    base.scheme = kdv::Scheme::qav_eprk_2;
    base.domain_a = -40.0;
    base.domain_b = 40.0;
    base.grid_n = 512;
    base.params = {1.0, 1.0};
    base.initial = kdv::SolitonIC{1.0, 0.0};

    kdv::RefinementAxis ax;
    if (axis == "time") {
        ax = kdv::RefinementAxis::time;
        base.t_final = 1.0;
        if (levels.empty()) levels = {0.1, 0.05, 0.025, 0.0125};
    } else {
        ax = kdv::RefinementAxis::space;
        base.scheme = kdv::Scheme::qav_eprk_3;
        base.dt = 1e-3;
        base.t_final = 0.1;
        if (levels.empty()) levels = {100, 150, 200, 250, 300};
    }
    apply_common_options(o, base);

    const auto rows = kdv::refinement_study(base, ax, levels);
    std::printf("# %s refinement, scheme %s\n", axis.c_str(), kdv::scheme_name(base.scheme));
    std::printf("%-12s %-14s %-14s %-9s %-9s\n", axis == "time" ? "dt" : "N", "L2", "Linf",
                "p(L2)", "p(Linf)");
    for (const auto& r : rows) {
        if (std::isnan(r.order_l2))
            std::printf("%-12g %-14.6e %-14.6e %-9s %-9s\n", r.resolution, r.l2_error,
                        r.linf_error, "--", "--");
        else
            std::printf("%-12g %-14.6e %-14.6e %-9.3f %-9.3f\n", r.resolution, r.l2_error,
                        r.linf_error, r.order_l2, r.order_linf);
    }
    if (o.out) {
        std::ofstream f(*o.out, std::ios::binary);
        f << "resolution,l2_error,linf_error,order_l2,order_linf\n";
        for (const auto& r : rows)
            f << kdv::format_g17(r.resolution) << ',' << kdv::format_g17(r.l2_error) << ','
              << kdv::format_g17(r.linf_error) << ',' << kdv::format_g17(r.order_l2) << ','
              << kdv::format_g17(r.order_linf) << '\n';
    }
    if (!o.plot_prefix.empty()) {
        std::vector<double> res, l2, linf;
        for (const auto& r : rows) {
            res.push_back(r.resolution);
            l2.push_back(r.l2_error);
            linf.push_back(r.linf_error);
        }
        write_series(o.plot_prefix + ".l2.dat", res, l2);
        write_series(o.plot_prefix + ".linf.dat", res, linf);
        if (o.gnuplot) {
            std::ofstream f(o.plot_prefix + ".gp");
            f << "set logscale y\n";
            if (axis == "time") f << "set logscale x\n";
            f << "plot '" << o.plot_prefix << ".l2.dat' w lp t 'L2', '" << o.plot_prefix
              << ".linf.dat' w lp t 'Linf'\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-preserving pseudo-spectral KdV solver"};
    app.require_subcommand(1);

    CommonOpts opts;

    std::string config_path;
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment from a config file");
    cmd_run->add_option("config", config_path, "config file")->required();
    add_common_options(cmd_run, opts);

    CLI::App* cmd_acc = app.add_subcommand("accuracy", "soliton refinement study");
    std::string axis = "time";
    std::vector<double> levels;
    cmd_acc->add_option("--axis", axis, "time|space")->check(CLI::IsMember({"time", "space"}));
    cmd_acc->add_option("--levels", levels, "resolution ladder (dt values or N values)");
    add_common_options(cmd_acc, opts);

    CLI::App* cmd_s3 = app.add_subcommand("solitons3", "three-soliton interaction benchmark");
    add_common_options(cmd_s3, opts);

    CLI::App* cmd_ts = app.add_subcommand("twosoliton", "convection-dominant benchmark");
    add_common_options(cmd_ts, opts);

    CLI::App* cmd_bm = app.add_subcommand("bimodal", "random bimodal wave benchmark");
    add_common_options(cmd_bm, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_run->parsed()) {
            kdv::ExperimentConfig cfg = kdv::parse_experiment_file(config_path);
            apply_common_options(opts, cfg);
            return run_and_report(opts, cfg);
        }
        if (cmd_acc->parsed()) return run_accuracy(opts, axis, levels);

        kdv::ExperimentConfig cfg;
        if (cmd_s3->parsed()) {
            cfg.scheme = kdv::Scheme::qav_eprk_2;
            cfg.domain_a = -100.0;
            cfg.domain_b = 100.0;
            cfg.grid_n = 512;
            cfg.dt = 0.1;
            cfg.t_final = 40.0;
            cfg.params = {1.0, 1.0};
            cfg.initial = kdv::ThreeSolitonsIC{};
        } else if (cmd_ts->parsed()) {
            cfg.scheme = kdv::Scheme::qav_eprk_2;
            cfg.domain_a = -20.0;
            cfg.domain_b = 20.0;
            cfg.grid_n = 256;
            cfg.dt = 0.005;
            cfg.t_final = 200.0;
            cfg.params = {6.0, 1.0};
            cfg.initial = kdv::TwoSolitonIC{};
            cfg.solver.eip = true;
            cfg.solver.tol = 1e-7;
            cfg.record_every = 100;
        } else if (cmd_bm->parsed()) {
            cfg.scheme = kdv::Scheme::qav_eprk_2;
            cfg.domain_a = 0.0;
            cfg.domain_b = 200.0 * std::numbers::pi;
            cfg.grid_n = 4096;
            cfg.dt = 0.01;
            cfg.t_final = 20.0;
            cfg.params = {1.0, std::sqrt(2.0 / 9.0)};
            cfg.initial = kdv::BimodalIC{};
            cfg.solver.eip = true;
            cfg.seed = 42;
            cfg.record_every = 10;
        }
        apply_common_options(opts, cfg);
        return run_and_report(opts, cfg);
    } catch (const kdv::SolverDivergenceError& e) {
        std::fprintf(stderr, "kdv: %s\n", e.what());
        return 3;
    } catch (const kdv::ConfigError& e) {
        std::fprintf(stderr, "kdv: %s\n", e.what());
        return 2;
    } catch (const kdv::GridMismatchError& e) {
        std::fprintf(stderr, "kdv: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "kdv: %s\n", e.what());
        return 1;
    }
}

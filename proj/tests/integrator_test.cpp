#include "kdv/integrator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kdv/baselines.hpp"
#include "kdv/initial.hpp"
#include "test_support.hpp"

using namespace kdv;
namespace kt = kdv::testing;

namespace {

GridFunction soliton_field(const GridPtr& g, const KdvParams& p, double c = 1.0) {
    return GridFunction::sample(g, [&](double x) { return soliton_exact(x, 0.0, c, 0.0, p); });
}

}  // namespace

TEST(StageRhs, ZeroInputs) {
    auto g = make_grid(0.0, 1.0, 16);
    SpectralOperator op(g);
    GridFunction zero(g);
    EXPECT_EQ(max_abs(stage_rhs(op, zero, zero, {1.0, 1.0})), 0.0);
    GridFunction qconst(g, 3.0);
    EXPECT_LE(max_abs(stage_rhs(op, zero, qconst, {1.0, 1.0})), 1e-13);
}

TEST(StageRhs, SineOracle) {
    auto g = make_grid(0.0, 2.0 * std::numbers::pi, 64);
    SpectralOperator op(g);
    auto U = GridFunction::sample(g, [](double x) { return std::sin(x); });
    auto Q = GridFunction::sample(g, [](double x) { return std::sin(x) * std::sin(x); });
    // d/dx(-1/6 sin^2 - 1/3 sin^2 + sin) = cos - sin(2x)/2, band-limited.
    auto exact = GridFunction::sample(
        g, [](double x) { return std::cos(x) - 0.5 * std::sin(2.0 * x); });
    EXPECT_LE(max_abs_diff(stage_rhs(op, U, Q, {1.0, 1.0}), exact), 1e-10);
}

TEST(StageRhs, ResultHasZeroMean) {
    auto g = make_grid(-7.0, 9.0, 64);
    SpectralOperator op(g);
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto U = kt::random_noise(g, rng);
        auto Q = kt::random_noise(g, rng);
        EXPECT_LE(std::abs(inner_h(stage_rhs(op, U, Q, {1.7, 0.6}), GridFunction(g, 1.0))),
                  1e-13);
    }
}

TEST(FixedPointSolve, ZeroStateConvergesImmediately) {
    auto g = make_grid(-40.0, 40.0, 64);
    SpectralOperator op(g);
    auto [stages, diag] =
        fixed_point_solve(op, GridFunction(g), gauss_tableau(2), {1.0, 1.0}, {0.01});
    EXPECT_TRUE(diag.converged);
    EXPECT_EQ(diag.iterations, 1);
    for (const auto& k : stages.slopes) EXPECT_EQ(max_abs(k), 0.0);
}

TEST(FixedPointSolve, StageEquationResidualOracle) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    auto u = soliton_field(g, p);
    SolverConfig cfg{0.01, 1e-14, 100};
    auto [stages, diag] = fixed_point_solve(op, u, gauss_tableau(2), p, cfg);
    ASSERT_TRUE(diag.converged);
    EXPECT_LE(diag.iterations, 100);
    for (int i = 0; i < 2; ++i) {
        // Substitute the converged stages back into the scheme's equations.
        auto rhs = stage_rhs(op, stages.states[i], stages.aux[i], p);
        EXPECT_LE(max_abs_diff(rhs, stages.slopes[i]), 1e-12);
        // Slopes are perfect derivatives: discrete mean vanishes.
        EXPECT_LE(std::abs(mass_h(stages.slopes[i])), 1e-13);
    }
}

TEST(FixedPointSolve, DispersionlessMatchesPlainPicard) {
    auto g = make_grid(0.0, 2.0 * std::numbers::pi, 32);
    SpectralOperator op(g);
    const KdvParams p{1.0, 0.0};  // mu = 0: the implicit solve degenerates to identity
    auto u = GridFunction::sample(g, [](double x) { return std::sin(x); });
    const auto tab = gauss_tableau(2);
    SolverConfig cfg{1e-4, 1e-14, 100};
    auto [stages, diag] = fixed_point_solve(op, u, tab, p, cfg);
    ASSERT_TRUE(diag.converged);

    // Plain Picard iteration on the explicit map, same stopping rule.
    std::vector<GridFunction> k(2, GridFunction(g)), kprev;
    auto u2 = squared(u);
    for (int m = 0; m < cfg.max_iter; ++m) {
        std::vector<GridFunction> U, Q;
        for (int i = 0; i < 2; ++i) {
            GridFunction Ui = u;
            for (int j = 0; j < 2; ++j) axpy(Ui, cfg.dt * tab.at(i, j), k[j]);
            U.push_back(Ui);
        }
        for (int i = 0; i < 2; ++i) {
            GridFunction Qi = u2;
            for (int j = 0; j < 2; ++j) {
                auto uk = pointwise_mul(U[j], k[j]);
                axpy(Qi, 2.0 * cfg.dt * tab.at(i, j), uk);
            }
            Q.push_back(Qi);
        }
        kprev = k;
        for (int i = 0; i < 2; ++i) k[i] = stage_rhs(op, U[i], Q[i], p);
        double res = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double d = max_abs_diff(k[i], kprev[i]);
            const double n = max_abs(k[i]);
            res = std::max(res, n < 1e-30 ? d : d / n);
        }
        if (res < cfg.tol) break;
    }
    for (int i = 0; i < 2; ++i) EXPECT_LE(max_abs_diff(k[i], stages.slopes[i]), 1e-13);
}

TEST(QavEprkStep, ZeroStateStaysZero) {
    auto g = make_grid(-1.0, 1.0, 32);
    SpectralOperator op(g);
    auto [u, diag] = qav_eprk_step(op, GridFunction(g), gauss_tableau(2), {1.0, 1.0}, {0.1});
    EXPECT_TRUE(diag.converged);
    EXPECT_EQ(max_abs(u), 0.0);
}

TEST(QavEprkStep, OneStageEqualsAvf) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    auto u = soliton_field(g, p);
    SolverConfig cfg{0.01, 1e-14, 100};
    auto [ue, de] = qav_eprk_step(op, u, gauss_tableau(1), p, cfg);
    auto [ua, da] = avf_step(op, u, p, cfg);
    ASSERT_TRUE(de.converged);
    ASSERT_TRUE(da.converged);
    EXPECT_LE(max_abs_diff(ue, ua), 1e-12);
}

TEST(QavEprkStep, TimeSymmetry) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    auto u0 = soliton_field(g, p);
    for (int s = 1; s <= 3; ++s) {
        SolverConfig fwd{0.01, 1e-14, 100};
        SolverConfig bwd{-0.01, 1e-14, 100};
        auto [u1, d1] = qav_eprk_step(op, u0, gauss_tableau(s), p, fwd);
        auto [u2, d2] = qav_eprk_step(op, u1, gauss_tableau(s), p, bwd);
        ASSERT_TRUE(d1.converged && d2.converged);
        EXPECT_LE(max_abs_diff(u2, u0), 1e-10) << "stages " << s;
    }
}

TEST(QavEprkStep, MassAndEnergyConservationPerStep) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    QavEprkStepper stepper(op, gauss_tableau(2), p, {0.01, 1e-14, 100});
    GridFunction u = soliton_field(g, p);
    const double h0 = hamiltonian_h(op, u, p);
    double mass_prev = mass_h(u);
    for (int n = 0; n < 100; ++n) {
        auto d = stepper.advance(u);
        ASSERT_TRUE(d.converged);
        const double mass = mass_h(u);
        EXPECT_LE(std::abs(mass - mass_prev), 1e-12 * (1.0 + std::abs(mass_prev)));
        mass_prev = mass;
        EXPECT_LE(std::abs(hamiltonian_h(op, u, p) - h0), 1e-10 * (1.0 + std::abs(h0)));
    }
}

TEST(QavEprkStep, RejectsNonSymplecticTableau) {
    auto g = make_grid(-1.0, 1.0, 16);
    SpectralOperator op(g);
    ButcherTableau euler;
    euler.s = 1;
    euler.a = {0.0};
    euler.b = {1.0};
    euler.c = {0.0};
    EXPECT_THROW(qav_eprk_step(op, GridFunction(g), euler, {1.0, 1.0}, {0.1}), ConfigError);
}

TEST(QavRkWithQ, MatchesReducedSchemeUnderConsistentStart) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    SolverConfig cfg{0.01, 1e-14, 100};
    QavEprkStepper reduced(op, gauss_tableau(2), p, cfg);
    QavRkWithQStepper joint(op, gauss_tableau(2), p, cfg);
    GridFunction u4 = soliton_field(g, p);
    GridFunction u3 = u4;
    GridFunction q3 = squared(u3);
    for (int n = 0; n < 10; ++n) {
        reduced.advance(u4);
        joint.advance(u3, q3);
        EXPECT_LE(max_abs_diff(u4, u3), 1e-12);
        // q - u^2 stays at its initial value (zero here) pointwise.
        auto defect = q3;
        defect -= squared(u3);
        EXPECT_LE(max_abs(defect), 1e-11);
    }
}

TEST(QavRkWithQ, PreservesInconsistentOffset) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    QavRkWithQStepper joint(op, gauss_tableau(2), p, {0.01, 1e-14, 100});
    GridFunction u = soliton_field(g, p);
    GridFunction q = squared(u);
    for (int j = 0; j < q.size(); ++j) q[j] += 1.0;  // defect = 1 everywhere
    for (int n = 0; n < 10; ++n) {
        joint.advance(u, q);
        auto defect = q;
        defect -= squared(u);
        for (int j = 0; j < defect.size(); ++j)
            EXPECT_LE(std::abs(defect[j] - 1.0), 1e-11);
    }
}

TEST(QavRkWithQ, ModifiedEnergyConservedPerStep) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    QavRkWithQStepper joint(op, gauss_tableau(2), p, {0.01, 1e-14, 100});
    GridFunction u = soliton_field(g, p);
    GridFunction q = squared(u);
    for (int j = 0; j < q.size(); ++j) q[j] += 0.5;  // inconsistent start on purpose
    double e_prev = modified_energy_h(op, u, q, p);
    const double e0 = e_prev;
    for (int n = 0; n < 20; ++n) {
        joint.advance(u, q);
        const double e = modified_energy_h(op, u, q, p);
        EXPECT_LE(std::abs(e - e_prev), 1e-11 * (1.0 + std::abs(e0)));
        e_prev = e;
    }
}

TEST(QavRkWithQ, ZeroStateStaysZero) {
    auto g = make_grid(-1.0, 1.0, 32);
    SpectralOperator op(g);
    auto [u, q, d] = qav_rk_step_with_q(op, GridFunction(g), GridFunction(g),
                                        gauss_tableau(2), {1.0, 1.0}, {0.1});
    EXPECT_EQ(max_abs(u), 0.0);
    EXPECT_EQ(max_abs(q), 0.0);
}

TEST(StageLinearSolver, MatchesDenseDirectSolve) {
    auto g = make_grid(-1.0, 1.0, 32);
    SpectralOperator op(g);
    const KdvParams p{1.0, 0.7};
    const double dt = 0.13;
    const auto tab = gauss_tableau(2);
    const int n = g->size();
    const int s = tab.s;

    SplitMix64 rng(99);
    std::vector<GridFunction> rhs;
    for (int i = 0; i < s; ++i) rhs.push_back(kt::random_trig(g, rng, 10));

    // Spectral route through the per-mode factorizations.
    detail::StageLinearSolver solver(op, tab, p, dt);
    std::vector<std::vector<std::complex<double>>> spec(
        s, std::vector<std::complex<double>>(op.modes()));
    std::vector<std::complex<double>*> ptrs(s);
    for (int i = 0; i < s; ++i) {
        op.forward(rhs[i].data(), spec[i].data());
        ptrs[i] = spec[i].data();
    }
    solver.solve(ptrs.data());
    std::vector<GridFunction> k_spectral(s, GridFunction(g));
    for (int i = 0; i < s; ++i) op.inverse(spec[i].data(), k_spectral[i].data());

    // Dense route: (I + mu^2 dt A (x) D1^3) k = rhs, all unknowns at once.
    const auto d3 = op.dense_matrix(3);
    const int dim = s * n;
    std::vector<double> big(static_cast<size_t>(dim) * dim, 0.0);
    std::vector<double> x(dim);
    const double mu2dt = p.mu * p.mu * dt;
    for (int i = 0; i < s; ++i) {
        for (int r = 0; r < n; ++r) {
            big[static_cast<size_t>(i * n + r) * dim + i * n + r] += 1.0;
            x[i * n + r] = rhs[i][r];
            for (int j = 0; j < s; ++j)
                for (int cidx = 0; cidx < n; ++cidx)
                    big[static_cast<size_t>(i * n + r) * dim + j * n + cidx] +=
                        mu2dt * tab.at(i, j) * d3[static_cast<size_t>(r) * n + cidx];
        }
    }
    ASSERT_TRUE(detail::solve_dense(big, x, dim));
    for (int i = 0; i < s; ++i)
        for (int r = 0; r < n; ++r)
            EXPECT_LE(std::abs(k_spectral[i][r] - x[i * n + r]), 1e-12);
}

TEST(FixedPointSolve, DivergenceRaises) {
    auto g = make_grid(-40.0, 40.0, 128);
    SpectralOperator op(g);
    // Dispersionless and far beyond the contraction regime: the quadratic
    // auxiliary update blows up superexponentially.
    const KdvParams p{1.0, 0.0};
    auto u = GridFunction::sample(g, [](double x) {
        return 3.0 * std::sin(2.0 * std::numbers::pi * 8.0 * (x + 40.0) / 80.0);
    });
    EXPECT_THROW(fixed_point_solve(op, u, gauss_tableau(2), p, {1e4, 1e-14, 100}),
                 SolverDivergenceError);
}

TEST(FixedPointSolve, IterationCapFlagsNonConvergence) {
    auto g = make_grid(-40.0, 40.0, 128);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    auto u = soliton_field(g, p);
    auto [stages, diag] = fixed_point_solve(op, u, gauss_tableau(2), p, {0.01, 1e-14, 3});
    EXPECT_FALSE(diag.converged);
    EXPECT_EQ(diag.iterations, 3);
    for (const auto& k : stages.slopes) EXPECT_TRUE(all_finite(k));
}

TEST(FixedPointSolve, WarmStartReducesIterations) {
    auto g = make_grid(-40.0, 40.0, 256);
    SpectralOperator op(g);
    const KdvParams p{1.0, 1.0};
    SolverConfig cold{0.01, 1e-14, 100};
    SolverConfig warm = cold;
    warm.warm_start = true;

    QavEprkStepper cold_stepper(op, gauss_tableau(2), p, cold);
    QavEprkStepper warm_stepper(op, gauss_tableau(2), p, warm);
    GridFunction uc = soliton_field(g, p);
    GridFunction uw = uc;
    cold_stepper.advance(uc);
    warm_stepper.advance(uw);
    const auto dc = cold_stepper.advance(uc);
    const auto dw = warm_stepper.advance(uw);
    EXPECT_LE(dw.iterations, dc.iterations);
}

TEST(SolverConfigValidation, Rejected) {
    auto g = make_grid(-1.0, 1.0, 16);
    SpectralOperator op(g);
    GridFunction u(g);
    EXPECT_THROW(qav_eprk_step(op, u, gauss_tableau(1), {1.0, 1.0}, {0.0}), ConfigError);
    EXPECT_THROW(qav_eprk_step(op, u, gauss_tableau(1), {1.0, 1.0}, {0.1, -1.0}), ConfigError);
    EXPECT_THROW(qav_eprk_step(op, u, gauss_tableau(1), {1.0, 1.0}, {0.1, 1e-14, 0}),
                 ConfigError);
}

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kdv/detail/small_linalg.hpp"
#include "kdv/errors.hpp"

namespace kdv {

/// Runge-Kutta coefficients (a_ij, b_i, c_i), row-major a.
struct ButcherTableau {
    int s = 0;
    std::vector<double> a;  // s*s
    std::vector<double> b;  // s
    std::vector<double> c;  // s

    double at(int i, int j) const { return a[static_cast<size_t>(i) * s + j]; }
};

/// max_{i,j} |b_i a_ij + b_j a_ji - b_i b_j|. Zero for methods that conserve
/// all quadratic invariants.
inline double symplectic_residual(const ButcherTableau& t) {
    double worst = 0.0;
    for (int i = 0; i < t.s; ++i)
        for (int j = 0; j < t.s; ++j)
            worst = std::max(worst,
                             std::abs(t.b[i] * t.at(i, j) + t.b[j] * t.at(j, i) - t.b[i] * t.b[j]));
    return worst;
}

namespace detail {

/// Shifted Legendre polynomial P_s(2x-1) and derivative, for the general
/// Gauss constructor.
inline void shifted_legendre(int s, double x, double& value, double& deriv) {
    const double t = 2.0 * x - 1.0;
    double pm1 = 1.0, p = t, dm1 = 0.0, d = 1.0;
    if (s == 0) {
        value = 1.0;
        deriv = 0.0;
        return;
    }
    for (int k = 2; k <= s; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p - (k - 1.0) * pm1) / k;
        const double dk = dm1 + (2.0 * k - 1.0) * p;
        pm1 = p;
        p = pk;
        dm1 = d;
        d = dk;
    }
    value = p;
    deriv = 2.0 * d;  // chain rule for the shift
}

inline ButcherTableau gauss_from_roots(int s) {
    ButcherTableau t;
    t.s = s;
    t.c.resize(s);
    // Newton from Chebyshev-like initial guesses; the roots are simple and
    // well separated, a handful of iterations reaches round-off.
    for (int i = 0; i < s; ++i) {
        double x = 0.5 * (1.0 - std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * s)));
        for (int it = 0; it < 100; ++it) {
            double v, d;
            shifted_legendre(s, x, v, d);
            const double step = v / d;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        t.c[i] = x;
    }
    // Interpolatory weights and stage coefficients from the quadrature
    // conditions sum_j b_j c_j^{k-1} = 1/k and sum_j a_ij c_j^{k-1} = c_i^k/k.
    std::vector<double> vandermonde(static_cast<size_t>(s) * s);
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j) vandermonde[static_cast<size_t>(k) * s + j] = std::pow(t.c[j], k);
    {
        std::vector<double> m = vandermonde;
        std::vector<double> rhs(s);
        for (int k = 0; k < s; ++k) rhs[k] = 1.0 / (k + 1.0);
        if (!kdv::detail::solve_dense(m, rhs, s))
            throw ConfigError("gauss_tableau: singular weight system");
        t.b = rhs;
    }
    t.a.resize(static_cast<size_t>(s) * s);
    for (int i = 0; i < s; ++i) {
        std::vector<double> m = vandermonde;
        std::vector<double> rhs(s);
        for (int k = 0; k < s; ++k) rhs[k] = std::pow(t.c[i], k + 1) / (k + 1.0);
        if (!kdv::detail::solve_dense(m, rhs, s))
            throw ConfigError("gauss_tableau: singular stage system");
        for (int j = 0; j < s; ++j) t.a[static_cast<size_t>(i) * s + j] = rhs[j];
    }
    return t;
}

}  // namespace detail

/// Gauss-Legendre collocation tableau of order 2s. The coefficients for
/// s <= 3 are hard closed forms so the symplectic residual sits at round-off;
/// larger s falls back to the root-finding constructor.
inline ButcherTableau gauss_tableau(int s) {
    if (s < 1) throw ConfigError("gauss_tableau: stage count must be >= 1");
    ButcherTableau t;
    t.s = s;
    switch (s) {
        case 1:
            t.a = {0.5};
            t.b = {1.0};
            t.c = {0.5};
            return t;
        case 2: {
            const double r = std::sqrt(3.0) / 6.0;
            t.a = {0.25, 0.25 - r, 0.25 + r, 0.25};
            t.b = {0.5, 0.5};
            t.c = {0.5 - r, 0.5 + r};
            return t;
        }
        case 3: {
            const double q = std::sqrt(15.0);
            t.a = {5.0 / 36.0,            2.0 / 9.0 - q / 15.0, 5.0 / 36.0 - q / 30.0,
                   5.0 / 36.0 + q / 24.0, 2.0 / 9.0,            5.0 / 36.0 - q / 24.0,
                   5.0 / 36.0 + q / 30.0, 2.0 / 9.0 + q / 15.0, 5.0 / 36.0};
            t.b = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};
            t.c = {0.5 - q / 10.0, 0.5, 0.5 + q / 10.0};
            return t;
        }
        default:
            return detail::gauss_from_roots(s);
    }
}

}  // namespace kdv

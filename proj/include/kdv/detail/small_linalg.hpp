#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace kdv::detail {

inline double mag(double x) { return std::abs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }

/// In-place LU factorization with partial pivoting of a row-major n x n
/// matrix. Returns false if a pivot underflows to zero.
template <class T>
bool lu_factor(T* a, int n, int* piv) {
    for (int c = 0; c < n; ++c) {
        int p = c;
        double best = mag(a[c * n + c]);
        for (int r = c + 1; r < n; ++r) {
            const double m = mag(a[r * n + c]);
            if (m > best) {
                best = m;
                p = r;
            }
        }
        if (best == 0.0) return false;
        piv[c] = p;
        if (p != c)
            for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[p * n + j]);
        const T inv_pivot = T(1.0) / a[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const T f = a[r * n + c] * inv_pivot;
            a[r * n + c] = f;
            for (int j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
        }
    }
    return true;
}

/// Solve with factors from lu_factor; x is overwritten by the solution.
template <class T>
void lu_solve(const T* lu, const int* piv, int n, T* x) {
    for (int c = 0; c < n; ++c)
        if (piv[c] != c) std::swap(x[c], x[piv[c]]);
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < r; ++c) x[r] -= lu[r * n + c] * x[c];
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) x[r] -= lu[r * n + c] * x[c];
        x[r] /= lu[r * n + r];
    }
}

/// One-shot dense solve (clobbers the matrix).
template <class T>
bool solve_dense(std::vector<T>& a, std::vector<T>& x, int n) {
    std::vector<int> piv(n);
    if (!lu_factor(a.data(), n, piv.data())) return false;
    lu_solve(a.data(), piv.data(), n, x.data());
    return true;
}

}  // namespace kdv::detail

#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "kdv/errors.hpp"

namespace kdv {

/// Uniform periodic grid on [a,b). Nodes are x_j = a + j h with h = (b-a)/N;
/// the right endpoint is identified with the left one and carries no node.
class Grid {
public:
    Grid(double a, double b, int n) : a_(a), b_(b), n_(n) {
        if (!(b > a)) throw ConfigError("grid: right endpoint must exceed left endpoint");
        if (n < 4 || n % 2 != 0)
            throw ConfigError("grid: node count must be an even integer >= 4, got " +
                              std::to_string(n));
        h_ = (b - a) / n;
        nodes_.resize(n);
        for (int j = 0; j < n; ++j) nodes_[j] = a + j * h_;
    }

    double left() const { return a_; }
    double right() const { return b_; }
    int size() const { return n_; }
    double spacing() const { return h_; }
    double length() const { return b_ - a_; }
    double node(int j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const { return nodes_; }

    friend bool operator==(const Grid& l, const Grid& r) {
        return l.a_ == r.a_ && l.b_ == r.b_ && l.n_ == r.n_;
    }

private:
    double a_;
    double b_;
    int n_;
    double h_;
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double a, double b, int n) {
    return std::make_shared<const Grid>(a, b, n);
}

/// Real-valued grid function (an element of V_h). Value semantics; keeps a
/// shared handle to its grid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid, double fill = 0.0)
        : grid_(std::move(grid)), values_(grid_->size(), fill) {}

    template <class F>
    static GridFunction sample(GridPtr grid, F&& f) {
        GridFunction u(grid);
        for (int j = 0; j < u.size(); ++j) u[j] = f(u.grid().node(j));
        return u;
    }

    int size() const { return static_cast<int>(values_.size()); }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& operator[](int j) { return values_[j]; }
    double operator[](int j) const { return values_[j]; }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    GridFunction& operator+=(const GridFunction& o) {
        for (int j = 0; j < size(); ++j) values_[j] += o.values_[j];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        for (int j = 0; j < size(); ++j) values_[j] -= o.values_[j];
        return *this;
    }
    GridFunction& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const GridFunction& u, const GridFunction& v,
                              const char* where) {
    if (u.grid_ptr() == v.grid_ptr()) return;
    if (!(u.grid() == v.grid()))
        throw GridMismatchError(std::string(where) + ": operands live on different grids");
}

/// Discrete inner product (u,v)_h = h sum_j u_j v_j.
inline double inner_h(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v, "inner_h");
    double acc = 0.0;
    for (int j = 0; j < u.size(); ++j) acc += u[j] * v[j];
    return u.grid().spacing() * acc;
}

inline double norm_h(const GridFunction& u) { return std::sqrt(inner_h(u, u)); }

inline double max_abs(const GridFunction& u) {
    double m = 0.0;
    for (int j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u[j]));
    return m;
}

inline double max_abs_diff(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v, "max_abs_diff");
    double m = 0.0;
    for (int j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u[j] - v[j]));
    return m;
}

/// y += alpha * x
inline void axpy(GridFunction& y, double alpha, const GridFunction& x) {
    require_same_grid(y, x, "axpy");
    double* yp = y.data();
    const double* xp = x.data();
    for (int j = 0; j < y.size(); ++j) yp[j] += alpha * xp[j];
}

inline GridFunction pointwise_mul(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v, "pointwise_mul");
    GridFunction w(u.grid_ptr());
    for (int j = 0; j < u.size(); ++j) w[j] = u[j] * v[j];
    return w;
}

inline GridFunction squared(const GridFunction& u) { return pointwise_mul(u, u); }

inline bool all_finite(const GridFunction& u) {
    for (int j = 0; j < u.size(); ++j)
        if (!std::isfinite(u[j])) return false;
    return true;
}

}  // namespace kdv

#pragma once

#include <stdexcept>
#include <string>

namespace kdv {

/// Invalid grid, tableau, scheme or experiment parameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Two grid functions that must live on the same grid do not.
class GridMismatchError : public std::runtime_error {
public:
    explicit GridMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// The stage iteration produced non-finite values.
class SolverDivergenceError : public std::runtime_error {
public:
    SolverDivergenceError(const std::string& what, int iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// The search direction of the invariant projection is (numerically) zero.
class DegenerateProjectionError : public std::runtime_error {
public:
    explicit DegenerateProjectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kdv

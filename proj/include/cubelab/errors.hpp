#pragma once

#include <stdexcept>
#include <string>

namespace cubelab {

// Domain/precondition violations use std::domain_error or
// std::invalid_argument directly (CLI exit code 2). The types below cover
// the other two failure classes the tools distinguish.

// Two independent computations of the same quantity disagreed (exit code 3).
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// A configured budget or refinement limit was exhausted (exit code 4).
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature failed to converge within its subdivision limit, or an internal
// self-consistency probe of the grid failed.
struct QuadratureError : BudgetError {
    explicit QuadratureError(const std::string& what) : BudgetError(what) {}
};

}  // namespace cubelab

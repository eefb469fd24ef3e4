#pragma once

#include <vector>

#include "cubelab/report.hpp"

namespace cubelab {

// Runs the orthogonal-polynomial identity suite (Hermite, Laguerre,
// Krawtchouk families plus the packet factorization and the numerical
// scaling-law fits). Exact checks compare rationals/radicals for equality;
// real-valued checks use a 1e-10 tolerance.
std::vector<Check> run_identity_suite();

}  // namespace cubelab

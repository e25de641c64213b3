#pragma once

#include <utility>
#include <vector>

#include "carpet/dirichlet.hpp"

namespace carpet {

/// Reference implementations for tests. Deliberately slow and deliberately
/// independent: no code is shared with build_graph or solve_dirichlet beyond
/// the plain data types.
namespace oracle {

struct OracleConfig {
  double step_tolerance = 1e-10;  // stop when a full sweep gains less
  int max_vertices = 50;          // cap on the free-vertex count
  int max_sweeps = 200000;
  bool extended_precision = false;  // run the descent in long double
};

/// Exact coordinate descent: every one-dimensional subproblem is solved by
/// bisection on the (strictly increasing) derivative. Free vertices without
/// a path to a fixed vertex stay at 0.
ConductanceResult brute_solve(const DirichletProblem& problem,
                              const OracleConfig& config = {});

/// O(V^2) pairwise adjacency over an independently (recursively) constructed
/// cell list, decided by closed-box interval overlap. Canonical edge order.
std::vector<std::pair<VertexId, VertexId>> exhaustive_adjacency(
    const FractalSpec& spec, int level, AdjacencyMode mode);

}  // namespace oracle
}  // namespace carpet

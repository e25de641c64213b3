#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "carpet/cell_graph.hpp"

namespace carpet {

/// A p-energy minimization with pinned vertex values.
struct DirichletProblem {
  const SparseGraph* graph = nullptr;
  std::vector<std::pair<VertexId, double>> fixed;  // vertex -> value
  double p = 2.0;
};

enum class QuadBackend { Direct, ConjugateGradient };
enum class GeneralBackend { Irls, DampedNewton };

struct SolverConfig {
  /// Convergence threshold on both the relative energy decrease and the
  /// scaled gradient norm ||grad||_inf / (1 + energy).
  double rel_tolerance = 1e-8;
  int max_iterations = 10000;  // outer iterations for p != 2
  QuadBackend p2_backend = QuadBackend::Direct;
  GeneralBackend general_backend = GeneralBackend::Irls;
  /// Optional warm start; must span all vertices when nonempty. Fixed
  /// entries are overwritten.
  Eigen::VectorXd initial_guess;
};

struct ConductanceResult {
  double value = 0.0;        // minimized p-energy
  Eigen::VectorXd solution;  // one value per vertex
  int iterations = 0;
  /// Scaled first-order optimality ||grad||_inf / (1 + energy) at return
  /// (for p = 2 with the iterative backend: the linear solver's relative
  /// residual).
  double residual = 0.0;
  bool converged = false;
  /// True when some free vertices live in components with no fixed vertex;
  /// those are set to 0 by convention.
  bool floating_free_vertices = false;
  std::string backend;
};

/// Minimizes the p-energy over functions agreeing with the fixed values.
/// p = 2 solves the reduced Laplacian system; p != 2 runs the configured
/// convex scheme. Throws std::invalid_argument on malformed problems;
/// non-convergence is reported via converged = false, never thrown.
ConductanceResult solve_dirichlet(const DirichletProblem& problem,
                                  const SolverConfig& config = {});

/// Vertex pins for the conductance between two disjoint level-n cell sets
/// on a level-(n+m) graph: descendants of a1 pinned to 1, of a2 to 0.
std::vector<std::pair<VertexId, double>> conductance_boundary(
    const CellGraph& graph, const CellSet& a1, const CellSet& a2,
    std::size_t budget = kDefaultCellBudget);

/// Effective p-conductance between cell sets a1 and a2 at subdivision depth
/// m: builds the level-(n+m) graph, pins descendants, minimizes.
ConductanceResult effective_conductance(
    const FractalSpec& spec, int n, const CellSet& a1, const CellSet& a2,
    int m, double p, AdjacencyMode mode = AdjacencyMode::NonemptyIntersection,
    const SolverConfig& config = {},
    std::size_t budget = kDefaultCellBudget);

/// As above, but on a prebuilt graph at level a1.level() + m.
ConductanceResult effective_conductance(const CellGraph& graph,
                                        const CellSet& a1, const CellSet& a2,
                                        double p,
                                        const SolverConfig& config = {},
                                        std::size_t budget = kDefaultCellBudget);

}  // namespace carpet

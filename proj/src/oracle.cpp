#include "carpet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace carpet {
namespace oracle {

namespace {

template <typename Scalar>
Scalar edge_term(Scalar d, Scalar p) {
  using std::abs;
  using std::pow;
  return pow(abs(d), p);
}

// d/dx |x - a|^p, p > 1; continuous, zero at x = a.
template <typename Scalar>
Scalar edge_term_derivative(Scalar x, Scalar a, Scalar p) {
  using std::abs;
  using std::pow;
  const Scalar d = x - a;
  if (d == Scalar(0)) return Scalar(0);
  return (d > Scalar(0) ? p : -p) * pow(abs(d), p - Scalar(1));
}

template <typename Scalar>
struct DescentState {
  std::vector<Scalar> x;            // all vertices
  std::vector<VertexId> free;      // movable vertices
  const SparseGraph* graph;
  Scalar p;

  Scalar total_energy() const {
    Scalar total(0);
    for (auto [u, v] : graph->edges) total += edge_term(x[u] - x[v], p);
    return total;
  }

  // Minimize the energy in coordinate v with all others held: bisection on
  // the monotone derivative over the hull of the neighbor values.
  void relax(VertexId v) {
    auto nbrs = graph->neighbors(v);
    if (nbrs.empty()) return;
    Scalar lo = std::numeric_limits<Scalar>::max();
    Scalar hi = std::numeric_limits<Scalar>::lowest();
    for (VertexId u : nbrs) {
      lo = std::min(lo, x[u]);
      hi = std::max(hi, x[u]);
    }
    if (lo == hi) {
      x[v] = lo;
      return;
    }
    auto deriv = [&](Scalar t) {
      Scalar s(0);
      for (VertexId u : nbrs) s += edge_term_derivative(t, x[u], p);
      return s;
    };
    for (int k = 0; k < 200; ++k) {
      const Scalar mid = (lo + hi) / Scalar(2);
      if (mid <= lo || mid >= hi) break;
      if (deriv(mid) < Scalar(0))
        lo = mid;
      else
        hi = mid;
    }
    x[v] = (lo + hi) / Scalar(2);
  }
};

template <typename Scalar>
ConductanceResult run_descent(const DirichletProblem& problem,
                              const OracleConfig& config) {
  const SparseGraph& g = *problem.graph;
  DescentState<Scalar> state;
  state.graph = &g;
  state.p = static_cast<Scalar>(problem.p);
  state.x.assign(g.num_vertices, Scalar(0));

  std::vector<char> fixed(g.num_vertices, 0);
  for (auto [v, val] : problem.fixed) {
    fixed[v] = 1;
    state.x[v] = static_cast<Scalar>(val);
  }
  // Mark vertices reachable from the fixed set; the rest stay at 0.
  std::vector<char> reach(g.num_vertices, 0);
  std::deque<VertexId> queue;
  for (auto [v, val] : problem.fixed) {
    (void)val;
    if (!reach[v]) {
      reach[v] = 1;
      queue.push_back(v);
    }
  }
  bool floating = false;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (VertexId u : g.neighbors(v))
      if (!reach[u]) {
        reach[u] = 1;
        queue.push_back(u);
      }
  }
  for (VertexId v = 0; v < g.num_vertices; ++v) {
    if (fixed[v]) continue;
    if (!reach[v]) {
      floating = true;
      continue;
    }
    state.free.push_back(v);
  }
  if (static_cast<int>(state.free.size()) > config.max_vertices)
    throw BudgetError("oracle free-vertex cap exceeded");

  ConductanceResult result;
  result.floating_free_vertices = floating;
  result.backend = "oracle";

  Scalar e_prev = state.total_energy();
  int sweep = 0;
  Scalar gain(0);
  for (; sweep < config.max_sweeps; ++sweep) {
    for (VertexId v : state.free) state.relax(v);
    const Scalar e = state.total_energy();
    gain = e_prev - e;
    e_prev = e;
    if (gain < static_cast<Scalar>(config.step_tolerance)) break;
  }

  result.solution.resize(g.num_vertices);
  for (VertexId v = 0; v < g.num_vertices; ++v)
    result.solution[v] = static_cast<double>(state.x[v]);
  result.value = static_cast<double>(e_prev);
  result.iterations = sweep + 1;
  result.residual = static_cast<double>(gain);
  result.converged = sweep < config.max_sweeps;
  return result;
}

}  // namespace

ConductanceResult brute_solve(const DirichletProblem& problem,
                              const OracleConfig& config) {
  if (problem.graph == nullptr)
    throw std::invalid_argument("problem has no graph");
  if (!(problem.p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (problem.fixed.empty())
    throw std::invalid_argument("fixed vertex set is empty");
  return config.extended_precision ? run_descent<long double>(problem, config)
                                   : run_descent<double>(problem, config);
}

std::vector<std::pair<VertexId, VertexId>> exhaustive_adjacency(
    const FractalSpec& spec, int level, AdjacencyMode mode) {
  const int d = spec.dimension();
  // Top-down recursive construction: keep the retained children of every
  // kept cell, one subdivision step at a time.
  std::vector<std::vector<Index>> cells = {std::vector<Index>(d, 1)};
  const auto patterns = spec.patterns();
  for (int k = 0; k < level; ++k) {
    std::vector<std::vector<Index>> next;
    next.reserve(cells.size() * patterns.size());
    for (const auto& q : cells)
      for (const auto& r : patterns) {
        std::vector<Index> child(d);
        for (int ax = 0; ax < d; ++ax) child[ax] = 5 * (q[ax] - 1) + r[ax];
        next.push_back(std::move(child));
      }
    cells = std::move(next);
  }
  if (cells.size() > 10'000)
    throw BudgetError("exhaustive adjacency size cap exceeded");
  std::sort(cells.begin(), cells.end());

  // Closed boxes [l-1, l] per axis (units of 5^-level): count the axes where
  // the intervals overlap in a segment vs. a single point.
  auto related = [&](const std::vector<Index>& a,
                     const std::vector<Index>& b) {
    int segment_axes = 0;
    for (int ax = 0; ax < d; ++ax) {
      const Index lo = std::max(a[ax] - 1, b[ax] - 1);
      const Index hi = std::min(a[ax], b[ax]);
      if (lo > hi) return false;  // boxes disjoint
      if (lo < hi) ++segment_axes;
    }
    switch (mode) {
      case AdjacencyMode::NonemptyIntersection:
        return true;
      case AdjacencyMode::SharedAtLeastEdge:
        return segment_axes >= 1;
      case AdjacencyMode::SharedFace:
        return segment_axes == d - 1;
    }
    return false;
  };

  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (related(cells[i], cells[j]))
        edges.emplace_back(static_cast<VertexId>(i),
                           static_cast<VertexId>(j));
  return edges;
}

}  // namespace oracle
}  // namespace carpet

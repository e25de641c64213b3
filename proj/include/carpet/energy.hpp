#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "carpet/cell_graph.hpp"

namespace carpet {

/// Discrete p-energy: the sum of |f(u) - f(v)|^p over the graph's edges
/// (each unordered adjacent pair once). Requires p > 1 and a value for
/// every vertex.
template <typename Derived>
typename Derived::Scalar energy(const SparseGraph& graph,
                                const Eigen::MatrixBase<Derived>& f,
                                typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  if (f.size() != graph.num_vertices)
    throw std::invalid_argument("vertex value vector has wrong size");
  if (!(p > Scalar(1))) throw std::invalid_argument("p must be > 1");

  using std::abs;
  using std::pow;
  Scalar total(0);
  if (p == Scalar(2)) {
    for (auto [u, v] : graph.edges) {
      const Scalar d = f[u] - f[v];
      total += d * d;
    }
  } else {
    for (auto [u, v] : graph.edges) total += pow(abs(f[u] - f[v]), p);
  }
  return total;
}

/// Gradient of the p-energy: d/df(u) = sum_v p |f(u)-f(v)|^{p-1} sign(f(u)-f(v)).
/// Well defined for p > 1 (the per-edge term vanishes as the difference does).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> energy_gradient(
    const SparseGraph& graph, const Eigen::MatrixBase<Derived>& f,
    typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  if (f.size() != graph.num_vertices)
    throw std::invalid_argument("vertex value vector has wrong size");
  if (!(p > Scalar(1))) throw std::invalid_argument("p must be > 1");

  using std::abs;
  using std::pow;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(graph.num_vertices);
  for (auto [u, v] : graph.edges) {
    const Scalar d = f[u] - f[v];
    if (d == Scalar(0)) continue;
    const Scalar g = (d > Scalar(0) ? p : -p) * pow(abs(d), p - Scalar(1));
    grad[u] += g;
    grad[v] -= g;
  }
  return grad;
}

}  // namespace carpet

#include "carpet/dirichlet.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>

#include "carpet/energy.hpp"

namespace carpet {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kEpsStart = 1e-2;
constexpr double kEpsFloor = 1e-8;
constexpr double kEpsDecay = 0.3;
constexpr double kArmijo = 1e-4;

struct ActiveEdge {
  std::int32_t lu, lv;  // local unknown ids; -1 when that endpoint is fixed
  VertexId gu, gv;
};

// Dirichlet reduction: unknown = free vertex reachable from a fixed one.
// Free vertices in fixed-free components are pinned to 0 and excluded.
struct Reduced {
  std::vector<VertexId> unknowns;
  std::vector<ActiveEdge> active;   // edges touching at least one unknown
  double const_energy = 0.0;        // contribution of fixed-fixed edges
  bool floating = false;
};

Reduced reduce(const SparseGraph& g,
               const std::vector<std::pair<VertexId, double>>& fixed,
               Eigen::VectorXd& x, double p) {
  const VertexId n = g.num_vertices;
  std::vector<char> is_fixed(n, 0);
  for (auto [v, val] : fixed) {
    is_fixed[v] = 1;
    x[v] = val;
  }
  std::vector<char> reach(n, 0);
  std::deque<VertexId> queue;
  for (auto [v, val] : fixed) {
    (void)val;
    if (!reach[v]) {
      reach[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (VertexId u : g.neighbors(v))
      if (!reach[u]) {
        reach[u] = 1;
        queue.push_back(u);
      }
  }

  Reduced r;
  std::vector<std::int32_t> local(n, -1);
  for (VertexId v = 0; v < n; ++v) {
    if (is_fixed[v]) continue;
    if (!reach[v]) {
      r.floating = true;
      x[v] = 0.0;
      continue;
    }
    local[v] = static_cast<std::int32_t>(r.unknowns.size());
    r.unknowns.push_back(v);
  }
  for (auto [u, v] : g.edges) {
    const bool fu = is_fixed[u], fv = is_fixed[v];
    if (fu && fv) {
      r.const_energy += std::pow(std::abs(x[u] - x[v]), p);
      continue;
    }
    const std::int32_t lu = fu ? -1 : local[u];
    const std::int32_t lv = fv ? -1 : local[v];
    if (lu < 0 && lv < 0) continue;  // both endpoints float; stay at 0
    r.active.push_back({lu, lv, u, v});
  }
  return r;
}

// Reduced weighted Laplacian over the unknowns. When `rhs` is non-null the
// fixed-endpoint terms are accumulated there (weighted harmonic system);
// otherwise they only contribute to the diagonal (Hessian assembly).
void assemble(const Reduced& r, const Eigen::VectorXd& x,
              const std::vector<double>& w, SpMat& a, Eigen::VectorXd* rhs) {
  const auto nf = static_cast<Eigen::Index>(r.unknowns.size());
  if (rhs) rhs->setZero(nf);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(r.active.size() * 4);
  for (std::size_t i = 0; i < r.active.size(); ++i) {
    const ActiveEdge& e = r.active[i];
    const double we = w[i];
    if (e.lu >= 0 && e.lv >= 0) {
      trip.emplace_back(e.lu, e.lu, we);
      trip.emplace_back(e.lv, e.lv, we);
      trip.emplace_back(e.lu, e.lv, -we);
      trip.emplace_back(e.lv, e.lu, -we);
    } else if (e.lu >= 0) {
      trip.emplace_back(e.lu, e.lu, we);
      if (rhs) (*rhs)[e.lu] += we * x[e.gv];
    } else {
      trip.emplace_back(e.lv, e.lv, we);
      if (rhs) (*rhs)[e.lv] += we * x[e.gu];
    }
  }
  a.resize(nf, nf);
  a.setFromTriplets(trip.begin(), trip.end());
}

// Linear solver with a cached symbolic factorization (the sparsity pattern
// is constant across reweighting iterations).
class InnerSolver {
 public:
  InnerSolver(QuadBackend backend, double tolerance)
      : backend_(backend), tolerance_(tolerance) {}

  Eigen::VectorXd solve(const SpMat& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& guess, bool& ok) {
    if (backend_ == QuadBackend::Direct) {
      if (!analyzed_) {
        ldlt_.analyzePattern(a);
        analyzed_ = true;
      }
      ldlt_.factorize(a);
      ok = ldlt_.info() == Eigen::Success;
      return ok ? Eigen::VectorXd(ldlt_.solve(b))
                : Eigen::VectorXd(Eigen::VectorXd::Zero(b.size()));
    }
    cg_.setTolerance(tolerance_);
    cg_.setMaxIterations(10 * b.size() + 1000);
    cg_.compute(a);
    Eigen::VectorXd y = cg_.solveWithGuess(b, guess);
    ok = cg_.info() == Eigen::Success;
    linear_iterations += static_cast<int>(cg_.iterations());
    return y;
  }

  int linear_iterations = 0;

 private:
  QuadBackend backend_;
  double tolerance_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg_;
};

double true_active_energy(const Reduced& r, const Eigen::VectorXd& x,
                          double p) {
  double total = 0.0;
  for (const ActiveEdge& e : r.active)
    total += std::pow(std::abs(x[e.gu] - x[e.gv]), p);
  return total;
}

double smoothed_active_energy(const Reduced& r, const Eigen::VectorXd& x,
                              double p, double eps) {
  double total = 0.0;
  for (const ActiveEdge& e : r.active) {
    const double d = x[e.gu] - x[e.gv];
    total += std::pow(d * d + eps * eps, p / 2.0);
  }
  return total;
}

// Infinity norm of the smoothed-energy gradient over the unknowns. With
// eps -> 0 this is the true gradient; a small positive eps makes it a usable
// first-order optimality surrogate at the kinks of p < 2 (where the exact
// |d|^{p-1} slope never vanishes numerically).
double grad_inf_norm(const Reduced& r, const Eigen::VectorXd& x, double p,
                     double eps) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(r.unknowns.size()));
  for (const ActiveEdge& e : r.active) {
    const double d = x[e.gu] - x[e.gv];
    if (d == 0.0) continue;
    const double g = p * d * std::pow(d * d + eps * eps, (p - 2.0) / 2.0);
    if (e.lu >= 0) grad[e.lu] += g;
    if (e.lv >= 0) grad[e.lv] -= g;
  }
  return r.unknowns.empty() ? 0.0 : grad.lpNorm<Eigen::Infinity>();
}

void validate(const DirichletProblem& problem, const SolverConfig& config) {
  if (problem.graph == nullptr)
    throw std::invalid_argument("problem has no graph");
  if (!(problem.p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (problem.fixed.empty())
    throw std::invalid_argument("fixed vertex set is empty");
  std::vector<std::pair<VertexId, double>> fixed = problem.fixed;
  std::sort(fixed.begin(), fixed.end());
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    auto [v, val] = fixed[i];
    if (v < 0 || v >= problem.graph->num_vertices)
      throw std::invalid_argument("fixed vertex out of range");
    if (!std::isfinite(val))
      throw std::invalid_argument("fixed value not finite");
    if (i > 0 && fixed[i - 1].first == v && fixed[i - 1].second != val)
      throw std::invalid_argument("conflicting fixed values for a vertex");
  }
  if (config.initial_guess.size() != 0 &&
      config.initial_guess.size() != problem.graph->num_vertices)
    throw std::invalid_argument("initial guess has wrong size");
  if (!(config.rel_tolerance > 0) || config.max_iterations <= 0)
    throw std::invalid_argument("bad solver config");
}

struct GeneralWeights {
  // IRLS: quadratic majorization weight w = (d^2+eps^2)^{(p-2)/2}; the
  // smoothed gradient per edge is p*w*d.
  // Newton: second derivative p (d^2+eps^2)^{(p-4)/2} ((p-1) d^2 + eps^2).
  static double irls(double d, double p, double eps) {
    return std::pow(d * d + eps * eps, (p - 2.0) / 2.0);
  }
  static double hessian(double d, double p, double eps) {
    const double s = d * d + eps * eps;
    return p * std::pow(s, (p - 4.0) / 2.0) * ((p - 1.0) * d * d + eps * eps);
  }
};

}  // namespace

ConductanceResult solve_dirichlet(const DirichletProblem& problem,
                                  const SolverConfig& config) {
  validate(problem, config);
  const SparseGraph& g = *problem.graph;
  const double p = problem.p;

  ConductanceResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.num_vertices);
  if (config.initial_guess.size() == g.num_vertices) x = config.initial_guess;

  Reduced r = reduce(g, problem.fixed, x, p);
  result.floating_free_vertices = r.floating;
  const auto nf = static_cast<Eigen::Index>(r.unknowns.size());

  if (nf == 0) {
    result.solution = x;
    result.value = energy(g, x, p);
    result.converged = true;
    result.backend = "none";
    return result;
  }

  const double lin_tol = std::min(1e-12, config.rel_tolerance * 1e-4);
  InnerSolver inner(config.p2_backend, lin_tol);

  auto gather = [&](Eigen::VectorXd& xf) {
    xf.resize(nf);
    for (Eigen::Index j = 0; j < nf; ++j) xf[j] = x[r.unknowns[j]];
  };
  auto scatter = [&](const Eigen::VectorXd& xf) {
    for (Eigen::Index j = 0; j < nf; ++j) x[r.unknowns[j]] = xf[j];
  };

  SpMat a;
  Eigen::VectorXd b;
  std::vector<double> w(r.active.size(), 1.0);

  // p = 2 initialization (also the final answer when p == 2).
  Eigen::VectorXd xf;
  gather(xf);
  if (config.initial_guess.size() == 0 || p == 2.0) {
    assemble(r, x, w, a, &b);
    bool ok = false;
    Eigen::VectorXd y = inner.solve(a, b, xf, ok);
    if (ok) {
      xf = y;
      scatter(xf);
    } else if (p == 2.0) {
      result.solution = x;
      result.value = energy(g, x, p);
      result.converged = false;
      result.backend = config.p2_backend == QuadBackend::Direct ? "direct" : "cg";
      return result;
    }
  }

  if (p == 2.0) {
    result.solution = x;
    result.value = energy(g, x, p);
    const double opt = grad_inf_norm(r, x, p, 0.0) / (1.0 + result.value);
    result.residual = opt;
    result.iterations = config.p2_backend == QuadBackend::Direct
                            ? 1
                            : inner.linear_iterations;
    result.converged = opt <= config.rel_tolerance;
    result.backend = config.p2_backend == QuadBackend::Direct ? "direct" : "cg";
    return result;
  }

  // General exponent: epsilon-smoothed convex minimization, either IRLS
  // (reweighted harmonic solves) or damped Newton, both with a backtracking
  // line search and a decreasing smoothing parameter.
  const bool newton = config.general_backend == GeneralBackend::DampedNewton;
  const std::string backend_name =
      std::string(newton ? "newton" : "irls") +
      (config.p2_backend == QuadBackend::Direct ? "-direct" : "-cg");

  double eps = kEpsStart;
  double e_true = r.const_energy + true_active_energy(r, x, p);
  double opt = grad_inf_norm(r, x, p, kEpsFloor) / (1.0 + e_true);
  int it = 0;
  bool converged = opt <= 0.5 * config.rel_tolerance;
  int stall = 0;

  Eigen::VectorXd d(nf), xf_trial(nf);
  Eigen::VectorXd x_trial = x;

  while (!converged && it < config.max_iterations) {
    ++it;
    Eigen::VectorXd grad_s = Eigen::VectorXd::Zero(nf);
    for (std::size_t i = 0; i < r.active.size(); ++i) {
      const ActiveEdge& e = r.active[i];
      const double delta = x[e.gu] - x[e.gv];
      const double wi = GeneralWeights::irls(delta, p, eps);
      const double gs = p * wi * delta;
      if (e.lu >= 0) grad_s[e.lu] += gs;
      if (e.lv >= 0) grad_s[e.lv] -= gs;
      w[i] = newton ? GeneralWeights::hessian(delta, p, eps) : wi;
    }

    bool ok = false;
    if (newton) {
      assemble(r, x, w, a, nullptr);
      d = inner.solve(a, -grad_s, Eigen::VectorXd::Zero(nf), ok);
    } else {
      assemble(r, x, w, a, &b);
      Eigen::VectorXd y = inner.solve(a, b, xf, ok);
      d = y - xf;
    }
    if (!ok) break;

    const double gd = grad_s.dot(d);
    if (gd >= 0) {
      // Not a descent direction (numerically degenerate); treat as a stall.
      ++stall;
    } else {
      const double es0 = smoothed_active_energy(r, x, p, eps);
      double t = 1.0;
      bool accepted = false;
      for (int k = 0; k < 60; ++k) {
        xf_trial = xf + t * d;
        for (Eigen::Index j = 0; j < nf; ++j)
          x_trial[r.unknowns[j]] = xf_trial[j];
        if (smoothed_active_energy(r, x_trial, p, eps) <=
            es0 + kArmijo * t * gd) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (accepted) {
        xf = xf_trial;
        scatter(xf);
      } else {
        ++stall;
      }
    }

    const double e_new = r.const_energy + true_active_energy(r, x, p);
    opt = grad_inf_norm(r, x, p, eps) / (1.0 + e_new);
    const bool at_floor = eps <= kEpsFloor * (1.0 + 1e-9);
    const double decrease = std::abs(e_true - e_new) / (1.0 + e_new);
    if (decrease <= 1e-14) ++stall; else stall = 0;
    e_true = e_new;

    if (at_floor && decrease <= config.rel_tolerance) {
      if (opt <= 0.5 * config.rel_tolerance) converged = true;
      else if (opt <= config.rel_tolerance && stall >= 3) converged = true;
    }
    if (at_floor && stall >= 8) break;
    eps = std::max(kEpsFloor, eps * kEpsDecay);
  }

  result.solution = x;
  result.value = energy(g, x, p);
  result.iterations = it;
  result.residual = grad_inf_norm(r, x, p, kEpsFloor) / (1.0 + result.value);
  result.converged = converged;
  result.backend = backend_name;
  return result;
}

std::vector<std::pair<VertexId, double>> conductance_boundary(
    const CellGraph& graph, const CellSet& a1, const CellSet& a2,
    std::size_t budget) {
  if (a1.level() != a2.level())
    throw std::invalid_argument("cell sets at different levels");
  if (a1.empty() || a2.empty())
    throw std::invalid_argument("boundary cell set is empty");
  if (a1.dimension() != graph.spec.dimension())
    throw std::invalid_argument("cell set dimension does not match graph");
  const int m = graph.level - a1.level();
  if (m < 0) throw std::invalid_argument("cell sets are below the graph level");
  for (std::size_t i = 0; i < a1.size(); ++i)
    if (a2.contains(a1.coords(i)))
      throw std::invalid_argument("boundary cell sets overlap");

  std::vector<std::pair<VertexId, double>> pins;
  for (auto [set, value] : {std::pair<const CellSet*, double>{&a1, 1.0},
                            std::pair<const CellSet*, double>{&a2, 0.0}}) {
    const CellSet s = subdivide(graph.spec, *set, m, budget);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto id = graph.vertices.find(s.coords(i));
      if (!id) throw std::logic_error("descendant cell missing from graph");
      pins.emplace_back(static_cast<VertexId>(*id), value);
    }
  }
  std::sort(pins.begin(), pins.end());
  return pins;
}

ConductanceResult effective_conductance(const CellGraph& graph,
                                        const CellSet& a1, const CellSet& a2,
                                        double p, const SolverConfig& config,
                                        std::size_t budget) {
  DirichletProblem problem{&graph.topology,
                           conductance_boundary(graph, a1, a2, budget), p};
  return solve_dirichlet(problem, config);
}

ConductanceResult effective_conductance(const FractalSpec& spec, int n,
                                        const CellSet& a1, const CellSet& a2,
                                        int m, double p, AdjacencyMode mode,
                                        const SolverConfig& config,
                                        std::size_t budget) {
  if (a1.level() != n || a2.level() != n)
    throw std::invalid_argument("cell sets not at level n");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const CellGraph graph = build_graph(spec, n + m, mode, budget);
  return effective_conductance(graph, a1, a2, p, config, budget);
}

}  // namespace carpet

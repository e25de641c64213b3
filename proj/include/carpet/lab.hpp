#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "carpet/dirichlet.hpp"

namespace carpet {

/// One cell-vs-surroundings conductance with the analytic corner/center
/// bounds attached when they apply.
struct BoundReport {
  int d = 0;
  double p = 0.0;
  int m = 0;
  CellIndex cell;
  double computed = 0.0;
  std::optional<double> lower;  // corner-cell analytic floor
  std::optional<double> upper;  // center-cell analytic cap
  bool lower_ok = true;
  bool upper_ok = true;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct ScalingSample {
  int m = 0;
  double value = 0.0;
};

/// Least-squares decay fit: value(m) ~ C * sigma^{-m}.
struct ScalingFit {
  double p = 0.0;
  std::vector<ScalingSample> samples;
  double sigma = 0.0;
  double slope_stderr = 0.0;
};

struct CriticalPBracket {
  double p_low = 0.0;
  double p_high = 0.0;
  int m_max = 0;
  CellSet cells;
  bool found = false;  // false when sigma never crosses 1 on [p_lo, p_hi]
  double sigma_low = 0.0;
  double sigma_high = 0.0;
};

struct RatioRow {
  int d = 0;
  double p = 0.0;
  int m = 0;
  double corner = 0.0;  // conductance of the corner cell vs its surroundings
  double center = 0.0;  // same for the center cell
  double ratio = 0.0;
  double floor = 0.0;  // analytic corner floor / center cap
};

struct SubgraphRow {
  int m = 0;
  double p = 0.0;
  double full_value = 0.0;     // corner conductance on F2
  double subgraph_value = 0.0; // corner conductance on tildeF2
};

struct LabConfig {
  SolverConfig solver;
  std::size_t budget = kDefaultCellBudget;
  int threads = 0;         // 0 = hardware concurrency; grid scans only
  bool allow_slow = false; // lifts the default m caps (d=2: 3, d=3: 2)
};

/// Caches built graphs and conductance values keyed by
/// (spec, level, mode, cell, m, p); also keeps last solutions for warm
/// starts across nearby exponents. Thread-safe.
class LabCache;
std::shared_ptr<LabCache> make_lab_cache();

/// Analytic floor for the corner cell [0,1/5]^d vs. everything not touching
/// it: 2^m (5^m+1)^{1-p} in the plane, 16^m (5^m+1)^{1-p} in space.
double corner_lower_bound(int d, double p, int m);

/// Analytic cap for the center cell [2/5,3/5]^d: 4 in the plane (any m >= 1),
/// 7(12*5^m - 16) in space.
double center_upper_bound(int d, int m);

/// Number of level-(m+1) cells of G^(d-1) inside the corner fifth
/// [0,1/5]^{d-1}, counted by enumeration. Equals 2^m (d=2) and 16^m (d=3).
std::int64_t boundary_strip_count(int d, int m,
                                  std::size_t budget = kDefaultCellBudget);

/// Conductance of Q against the complement of its neighborhood at
/// subdivision depth m, with the analytic bounds attached for the exact
/// corner/center cells of F2/F3 at n = 1, m >= 1.
BoundReport cell_conductance(const FractalSpec& spec, int n,
                             const CellIndex& q, int m, double p,
                             AdjacencyMode mode = AdjacencyMode::NonemptyIntersection,
                             const LabConfig& config = {},
                             LabCache* cache = nullptr);

/// Corner vs. center conductances and their ratio over a range of m,
/// on F2 (d=2) or F3 (d=3) at n = 1.
std::vector<RatioRow> ratio_scan(int d, double p, const std::vector<int>& ms,
                                 const LabConfig& config = {},
                                 LabCache* cache = nullptr);

/// Fits log(value) against m by ordinary least squares;
/// sigma = exp(-slope). Throws std::domain_error on nonpositive values
/// (a disconnected configuration) and std::invalid_argument on fewer than
/// two distinct m.
ScalingFit fit_decay(double p, std::vector<ScalingSample> samples);

/// Decay fit of the measured conductances of Q over the given m range.
ScalingFit scaling_fit(const FractalSpec& spec, int n, const CellIndex& q,
                       double p, const std::vector<int>& ms,
                       AdjacencyMode mode = AdjacencyMode::NonemptyIntersection,
                       const LabConfig& config = {},
                       LabCache* cache = nullptr);

/// Default representative cells (one per symmetry class that the analytic
/// picture distinguishes): corner, edge/face centers, center, at n = 1.
CellSet default_representative_cells(const FractalSpec& spec);

/// Bisects p for the point where the fitted decay factor of
/// max-over-cells conductance crosses 1. The fit uses m = 1..m_max.
CriticalPBracket critical_p_bracket(const FractalSpec& spec, int n,
                                    const CellSet& representative_cells,
                                    int m_max, double p_lo, double p_hi,
                                    const LabConfig& config = {},
                                    LabCache* cache = nullptr);

/// Same bisection, driven by an arbitrary sigma(p) (used by tests and by
/// the solver-backed overload above).
CriticalPBracket critical_p_bracket_core(
    const std::function<double(double)>& sigma_of_p, double p_lo, double p_hi,
    double width = 0.05);

/// Corner-cell conductance on F2 next to the same quantity on the
/// sub-carpet tildeF2 (whose cell set is a subset of F2's); the full-carpet
/// value can never be smaller.
std::vector<SubgraphRow> subgraph_comparison(const std::vector<int>& ms,
                                             double p,
                                             const LabConfig& config = {},
                                             LabCache* cache = nullptr);

/// CSV with header `d,p,m,cell,computed,lower_bound,upper_bound,iterations,
/// converged`; cell coordinates joined by ':'.
std::string report_csv(const std::vector<BoundReport>& rows);
std::string report_json(const std::vector<BoundReport>& rows);

}  // namespace carpet

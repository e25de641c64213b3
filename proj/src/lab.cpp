#include "carpet/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace carpet {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string coords_key(std::span<const Index> c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ':';
    s += std::to_string(c[i]);
  }
  return s;
}

}  // namespace

class LabCache {
 public:
  const CellGraph& graph(const FractalSpec& spec, int level,
                         AdjacencyMode mode, std::size_t budget) {
    const std::string key =
        to_text(spec) + "|" + std::to_string(level) + "|" + to_string(mode);
    std::lock_guard lock(mu_);
    auto it = graphs_.find(key);
    if (it == graphs_.end()) {
      auto built =
          std::make_unique<CellGraph>(build_graph(spec, level, mode, budget));
      it = graphs_.emplace(key, std::move(built)).first;
    }
    return *it->second;
  }

  std::optional<double> value(const std::string& key) {
    std::lock_guard lock(mu_);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  void store_value(const std::string& key, double v) {
    std::lock_guard lock(mu_);
    values_[key] = v;
  }

  Eigen::VectorXd warm_start(const std::string& key) {
    std::lock_guard lock(mu_);
    auto it = warm_.find(key);
    return it == warm_.end() ? Eigen::VectorXd() : it->second;
  }
  void store_warm(const std::string& key, const Eigen::VectorXd& x) {
    std::lock_guard lock(mu_);
    warm_[key] = x;
  }

  std::optional<ConductanceResult> result(const std::string& key) {
    std::lock_guard lock(mu_);
    auto it = results_.find(key);
    if (it == results_.end()) return std::nullopt;
    return it->second;
  }
  void store_result(const std::string& key, ConductanceResult r) {
    std::lock_guard lock(mu_);
    r.solution.resize(0);  // keep the cache small; warm_ has the solution
    results_[key] = std::move(r);
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<CellGraph>> graphs_;
  std::map<std::string, double> values_;
  std::map<std::string, ConductanceResult> results_;
  std::map<std::string, Eigen::VectorXd> warm_;
};

std::shared_ptr<LabCache> make_lab_cache() {
  return std::make_shared<LabCache>();
}

double corner_lower_bound(int d, double p, int m) {
  if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  const double strips = std::pow(d == 2 ? 2.0 : 16.0, m);
  return strips * std::pow(static_cast<double>(pow5(m)) + 1.0, 1.0 - p);
}

double center_upper_bound(int d, int m) {
  if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (d == 2) return 4.0;
  return 7.0 * (12.0 * static_cast<double>(pow5(m)) - 16.0);
}

std::int64_t boundary_strip_count(int d, int m, std::size_t budget) {
  if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const FractalSpec strip = builtin_spec(d == 2 ? "G1" : "G2");
  const CellSet cells = cells_at_level(strip, m + 1, budget);
  const Index corner_hi = pow5(m);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto c = cells.coords(i);
    bool inside = true;
    for (Index v : c) inside = inside && v <= corner_hi;
    count += inside;
  }
  return count;
}

namespace {

bool all_coords_equal(const CellIndex& q, Index value) {
  for (Index c : q.coords)
    if (c != value) return false;
  return !q.coords.empty();
}

ConductanceResult solve_cell(const FractalSpec& spec, int n,
                             const CellIndex& q, int m, double p,
                             AdjacencyMode mode, const LabConfig& config,
                             LabCache* cache) {
  std::shared_ptr<LabCache> local;
  if (cache == nullptr) {
    local = make_lab_cache();
    cache = local.get();
  }
  const std::string base_key = to_text(spec) + "|" + std::to_string(n) + "|" +
                               coords_key(q.coords) + "|" +
                               std::to_string(m) + "|" + to_string(mode);
  const std::string result_key = base_key + "|p=" + fmt(p);
  if (auto hit = cache->result(result_key)) return *hit;

  const CellGraph& small = cache->graph(spec, n, mode, config.budget);
  const CellSet a1 =
      CellSet::from_cells(spec.dimension(), n,
                          std::vector<Index>(q.coords.begin(), q.coords.end()));
  const CellSet a2 = gamma_complement(small, q);

  const CellGraph& big = cache->graph(spec, n + m, mode, config.budget);
  SolverConfig solver = config.solver;
  Eigen::VectorXd warm = cache->warm_start(base_key);
  if (warm.size() == big.topology.num_vertices) solver.initial_guess = warm;

  ConductanceResult res =
      effective_conductance(big, a1, a2, p, solver, config.budget);
  cache->store_warm(base_key, res.solution);
  cache->store_result(result_key, res);
  return res;
}

}  // namespace

BoundReport cell_conductance(const FractalSpec& spec, int n,
                             const CellIndex& q, int m, double p,
                             AdjacencyMode mode, const LabConfig& config,
                             LabCache* cache) {
  if (q.level != n) throw std::invalid_argument("cell not at level n");
  if (!contains_cell(spec, q))
    throw std::invalid_argument("cell not in the fractal");

  const ConductanceResult res =
      solve_cell(spec, n, q, m, p, mode, config, cache);

  BoundReport report;
  report.d = spec.dimension();
  report.p = p;
  report.m = m;
  report.cell = q;
  report.computed = res.value;
  report.iterations = res.iterations;
  report.residual = res.residual;
  report.converged = res.converged;

  const bool analytic_family = spec.name() == "F2" || spec.name() == "F3";
  if (analytic_family && n == 1 && m >= 1) {
    const double tol =
        1e-9 + config.solver.rel_tolerance * (1.0 + std::abs(res.value));
    if (all_coords_equal(q, 1)) {
      report.lower = corner_lower_bound(report.d, p, m);
      report.lower_ok = res.value >= *report.lower - tol;
    } else if (all_coords_equal(q, 3)) {
      report.upper = center_upper_bound(report.d, m);
      report.upper_ok = res.value <= *report.upper + tol;
    }
  }
  return report;
}

namespace {

void check_scan_budget(int d, int m, const LabConfig& config) {
  const int cap = d == 2 ? 3 : 2;
  if (!config.allow_slow && m > cap)
    throw BudgetError("m beyond the default budget for d=" +
                      std::to_string(d) + "; enable the slow mode");
}

}  // namespace

std::vector<RatioRow> ratio_scan(int d, double p, const std::vector<int>& ms,
                                 const LabConfig& config, LabCache* cache) {
  if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (ms.empty()) throw std::invalid_argument("empty m range");
  std::shared_ptr<LabCache> local;
  if (cache == nullptr) {
    local = make_lab_cache();
    cache = local.get();
  }

  const FractalSpec spec = builtin_spec(d == 2 ? "F2" : "F3");
  const CellIndex corner{1, std::vector<Index>(d, 1)};
  const CellIndex center{1, std::vector<Index>(d, 3)};

  std::vector<RatioRow> rows;
  for (int m : ms) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    check_scan_budget(d, m, config);
    RatioRow row;
    row.d = d;
    row.p = p;
    row.m = m;
    row.corner = cell_conductance(spec, 1, corner, m, p,
                                  AdjacencyMode::NonemptyIntersection, config,
                                  cache)
                     .computed;
    row.center = cell_conductance(spec, 1, center, m, p,
                                  AdjacencyMode::NonemptyIntersection, config,
                                  cache)
                     .computed;
    row.ratio = row.center > 0 ? row.corner / row.center : 0.0;
    row.floor = corner_lower_bound(d, p, m) / center_upper_bound(d, m);
    rows.push_back(row);
  }
  return rows;
}

ScalingFit fit_decay(double p, std::vector<ScalingSample> samples) {
  std::vector<int> ms;
  for (const auto& s : samples) {
    if (!(s.value > 0.0))
      throw std::domain_error(
          "nonpositive conductance in decay fit (disconnected configuration)");
    ms.push_back(s.m);
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.size() < 2)
    throw std::invalid_argument("decay fit needs at least two distinct m");

  const double n = static_cast<double>(samples.size());
  double mean_m = 0.0, mean_y = 0.0;
  for (const auto& s : samples) {
    mean_m += s.m;
    mean_y += std::log(s.value);
  }
  mean_m /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double dm = s.m - mean_m;
    sxx += dm * dm;
    sxy += dm * (std::log(s.value) - mean_y);
  }
  const double slope = sxy / sxx;

  double ssr = 0.0;
  for (const auto& s : samples) {
    const double r =
        std::log(s.value) - (mean_y + slope * (s.m - mean_m));
    ssr += r * r;
  }
  ScalingFit fit;
  fit.p = p;
  fit.samples = std::move(samples);
  fit.sigma = std::exp(-slope);
  fit.slope_stderr =
      fit.samples.size() > 2
          ? std::sqrt(ssr / (n - 2.0) / sxx)
          : 0.0;
  return fit;
}

ScalingFit scaling_fit(const FractalSpec& spec, int n, const CellIndex& q,
                       double p, const std::vector<int>& ms,
                       AdjacencyMode mode, const LabConfig& config,
                       LabCache* cache) {
  if (ms.size() < 2)
    throw std::invalid_argument("decay fit needs at least two m values");
  std::shared_ptr<LabCache> local;
  if (cache == nullptr) {
    local = make_lab_cache();
    cache = local.get();
  }
  std::vector<ScalingSample> samples;
  for (int m : ms) {
    check_scan_budget(spec.dimension(), m, config);
    const BoundReport r = cell_conductance(spec, n, q, m, p, mode, config, cache);
    samples.push_back({m, r.computed});
  }
  return fit_decay(p, std::move(samples));
}

CellSet default_representative_cells(const FractalSpec& spec) {
  const int d = spec.dimension();
  std::vector<std::vector<Index>> candidates;
  candidates.push_back(std::vector<Index>(d, 1));  // corner
  for (int k = 1; k < d; ++k) {
    // k leading 3s: edge center, then face center, ..., then body center
    std::vector<Index> c(d, 1);
    for (int i = 0; i < k; ++i) c[i] = 3;
    candidates.push_back(c);
  }
  candidates.push_back(std::vector<Index>(d, 3));  // center

  std::vector<Index> flat;
  for (const auto& c : candidates) {
    CellIndex cell{1, c};
    if (contains_cell(spec, cell)) flat.insert(flat.end(), c.begin(), c.end());
  }
  if (flat.empty())
    throw std::invalid_argument("no representative cells in the fractal");
  return CellSet::from_cells(d, 1, std::move(flat));
}

CriticalPBracket critical_p_bracket_core(
    const std::function<double(double)>& sigma_of_p, double p_lo, double p_hi,
    double width) {
  if (!(p_lo < p_hi)) throw std::invalid_argument("need p_lo < p_hi");
  CriticalPBracket out;
  out.p_low = p_lo;
  out.p_high = p_hi;
  out.sigma_low = sigma_of_p(p_lo);
  out.sigma_high = sigma_of_p(p_hi);
  if (!(out.sigma_low < 1.0 && out.sigma_high > 1.0)) {
    out.found = false;
    return out;
  }
  while (out.p_high - out.p_low > width) {
    const double mid = 0.5 * (out.p_low + out.p_high);
    const double sigma = sigma_of_p(mid);
    if (sigma < 1.0) {
      out.p_low = mid;
      out.sigma_low = sigma;
    } else {
      out.p_high = mid;
      out.sigma_high = sigma;
    }
  }
  out.found = true;
  return out;
}

CriticalPBracket critical_p_bracket(const FractalSpec& spec, int n,
                                    const CellSet& representative_cells,
                                    int m_max, double p_lo, double p_hi,
                                    const LabConfig& config, LabCache* cache) {
  if (representative_cells.empty())
    throw std::invalid_argument("representative cell set is empty");
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  std::shared_ptr<LabCache> local;
  if (cache == nullptr) {
    local = make_lab_cache();
    cache = local.get();
  }

  auto sigma_of_p = [&](double p) {
    std::vector<ScalingSample> samples;
    for (int m = 1; m <= m_max; ++m) {
      check_scan_budget(spec.dimension(), m, config);
      double worst = 0.0;
      for (std::size_t i = 0; i < representative_cells.size(); ++i) {
        const BoundReport r =
            cell_conductance(spec, n, representative_cells.cell(i), m, p,
                             AdjacencyMode::NonemptyIntersection, config, cache);
        worst = std::max(worst, r.computed);
      }
      samples.push_back({m, worst});
    }
    return fit_decay(p, std::move(samples)).sigma;
  };

  CriticalPBracket out = critical_p_bracket_core(sigma_of_p, p_lo, p_hi);
  out.m_max = m_max;
  out.cells = representative_cells;
  return out;
}

std::vector<SubgraphRow> subgraph_comparison(const std::vector<int>& ms,
                                             double p, const LabConfig& config,
                                             LabCache* cache) {
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (ms.empty()) throw std::invalid_argument("empty m range");
  std::shared_ptr<LabCache> local;
  if (cache == nullptr) {
    local = make_lab_cache();
    cache = local.get();
  }
  const FractalSpec full = builtin_spec("F2");
  const FractalSpec sub = builtin_spec("tildeF2");
  const CellIndex corner{1, {1, 1}};

  std::vector<SubgraphRow> rows;
  for (int m : ms) {
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    if (!config.allow_slow && m > 2)
      throw BudgetError("m beyond the default budget; enable the slow mode");
    SubgraphRow row;
    row.m = m;
    row.p = p;
    row.full_value = cell_conductance(full, 1, corner, m, p,
                                      AdjacencyMode::NonemptyIntersection,
                                      config, cache)
                         .computed;
    row.subgraph_value = cell_conductance(sub, 1, corner, m, p,
                                          AdjacencyMode::NonemptyIntersection,
                                          config, cache)
                             .computed;
    rows.push_back(row);
  }
  return rows;
}

std::string report_csv(const std::vector<BoundReport>& rows) {
  std::ostringstream os;
  os << "d,p,m,cell,computed,lower_bound,upper_bound,iterations,converged\n";
  for (const auto& r : rows) {
    os << r.d << ',' << fmt(r.p) << ',' << r.m << ',' << coords_key(r.cell.coords)
       << ',' << fmt(r.computed) << ','
       << (r.lower ? fmt(*r.lower) : std::string()) << ','
       << (r.upper ? fmt(*r.upper) : std::string()) << ',' << r.iterations
       << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string report_json(const std::vector<BoundReport>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["d"] = r.d;
    row["p"] = r.p;
    row["m"] = r.m;
    row["cell"] = coords_key(r.cell.coords);
    row["computed"] = r.computed;
    row["lower_bound"] = r.lower ? nlohmann::json(*r.lower) : nlohmann::json();
    row["upper_bound"] = r.upper ? nlohmann::json(*r.upper) : nlohmann::json();
    row["lower_ok"] = r.lower_ok;
    row["upper_ok"] = r.upper_ok;
    row["iterations"] = r.iterations;
    row["residual"] = r.residual;
    row["converged"] = r.converged;
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

}  // namespace carpet

#include "carpet/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace carpet {

namespace {

void check_level(int level) {
  if (level < 0 || level > kMaxLevel)
    throw std::invalid_argument("level must be in [0, " +
                                std::to_string(kMaxLevel) + "]");
}

bool lex_less(std::span<const Index> a, std::span<const Index> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Index pow5(int n) {
  check_level(n);
  Index v = 1;
  for (int i = 0; i < n; ++i) v *= kBase;
  return v;
}

FractalSpec::FractalSpec(int dimension, std::vector<std::vector<int>> retained,
                         std::string name)
    : dim_(dimension), name_(std::move(name)) {
  if (dim_ < 1 || dim_ > 12)
    throw std::invalid_argument("dimension must be in [1, 12]");
  if (retained.empty())
    throw std::invalid_argument("retained pattern set is empty");

  std::vector<std::int32_t> keys;
  keys.reserve(retained.size());
  for (const auto& tuple : retained) {
    if (static_cast<int>(tuple.size()) != dim_)
      throw std::invalid_argument("retained tuple arity != dimension");
    std::int32_t key = 0;
    for (int c : tuple) {
      if (c < 1 || c > kBase)
        throw std::invalid_argument("retained entry outside {1,...,5}");
      key = key * kBase + (c - 1);
    }
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  keys_ = std::move(keys);

  digits_.resize(keys_.size() * dim_);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    std::int32_t key = keys_[i];
    for (int ax = dim_ - 1; ax >= 0; --ax) {
      digits_[i * dim_ + ax] = static_cast<std::int8_t>(key % kBase);
      key /= kBase;
    }
  }
}

std::vector<std::vector<int>> FractalSpec::patterns() const {
  std::vector<std::vector<int>> out(pattern_size());
  for (std::size_t i = 0; i < pattern_size(); ++i) {
    out[i].resize(dim_);
    for (int ax = 0; ax < dim_; ++ax)
      out[i][ax] = static_cast<int>(digits_[i * dim_ + ax]) + 1;
  }
  return out;
}

bool FractalSpec::has_key(std::int32_t key) const {
  return std::binary_search(keys_.begin(), keys_.end(), key);
}

CellSet::CellSet(int dimension, int level) : dim_(dimension), level_(level) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  check_level(level);
}

CellSet CellSet::from_cells(int dimension, int level,
                            std::vector<Index> flat) {
  CellSet set(dimension, level);
  if (flat.size() % static_cast<std::size_t>(dimension) != 0)
    throw std::invalid_argument("flat coordinate size not a multiple of d");
  const Index hi = pow5(level);
  for (Index c : flat)
    if (c < 1 || c > hi)
      throw std::invalid_argument("cell coordinate out of range for level");

  const std::size_t n = flat.size() / dimension;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t i) {
    return std::span<const Index>(flat.data() + i * dimension,
                                  static_cast<std::size_t>(dimension));
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(row(a), row(b)); });

  std::vector<Index> sorted;
  sorted.reserve(flat.size());
  for (std::size_t k = 0; k < n; ++k) {
    auto r = row(order[k]);
    if (k > 0) {
      std::span<const Index> prev(sorted.data() + sorted.size() - dimension,
                                  static_cast<std::size_t>(dimension));
      if (std::equal(prev.begin(), prev.end(), r.begin())) continue;
    }
    sorted.insert(sorted.end(), r.begin(), r.end());
  }
  set.flat_ = std::move(sorted);
  return set;
}

CellIndex CellSet::cell(std::size_t i) const {
  auto c = coords(i);
  return CellIndex{level_, {c.begin(), c.end()}};
}

std::optional<std::size_t> CellSet::find(std::span<const Index> coords) const {
  if (coords.size() != static_cast<std::size_t>(dim_)) return std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    auto r = this->coords(mid);
    if (lex_less(r, coords))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size()) {
    auto r = this->coords(lo);
    if (std::equal(r.begin(), r.end(), coords.begin())) return lo;
  }
  return std::nullopt;
}

namespace {

std::vector<std::vector<int>> all_tuples_except(
    int d, const std::vector<std::vector<int>>& removed) {
  auto is_removed = [&](const std::vector<int>& t) {
    return std::find(removed.begin(), removed.end(), t) != removed.end();
  };
  std::vector<std::vector<int>> out;
  std::vector<int> t(d, 1);
  for (;;) {
    if (!is_removed(t)) out.push_back(t);
    int ax = d - 1;
    while (ax >= 0 && t[ax] == kBase) t[ax--] = 1;
    if (ax < 0) break;
    ++t[ax];
  }
  return out;
}

// The 2d level-1 cells sharing a (d-1)-face with the center cell (3,...,3).
std::vector<std::vector<int>> center_face_neighbors(int d) {
  std::vector<std::vector<int>> removed;
  for (int ax = 0; ax < d; ++ax) {
    for (int delta : {-1, +1}) {
      std::vector<int> t(d, 3);
      t[ax] += delta;
      removed.push_back(t);
    }
  }
  return removed;
}

}  // namespace

FractalSpec builtin_spec(std::string_view name) {
  if (name == "F2" || name == "F3") {
    const int d = (name == "F2") ? 2 : 3;
    return FractalSpec(d, all_tuples_except(d, center_face_neighbors(d)),
                       std::string(name));
  }
  if (name == "tildeF2") {
    // Plus-shaped cross: the center cell and its two vertical and two
    // horizontal arm cells.
    std::vector<std::vector<int>> removed = {
        {3, 2}, {3, 3}, {3, 4}, {2, 3}, {4, 3}};
    return FractalSpec(2, all_tuples_except(2, removed), "tildeF2");
  }
  if (name == "G1" || name == "G2") {
    const int d = (name == "G1") ? 1 : 2;
    // Boundary-touching cells of F1^(d): kept cells with some coordinate
    // equal to 1 or 5.
    auto f1 = all_tuples_except(d, center_face_neighbors(d));
    std::vector<std::vector<int>> kept;
    for (const auto& t : f1) {
      bool touches = false;
      for (int c : t) touches = touches || c == 1 || c == kBase;
      if (touches) kept.push_back(t);
    }
    return FractalSpec(d, kept, std::string(name));
  }
  throw std::invalid_argument("unknown fractal spec: " + std::string(name));
}

bool contains_cell(const FractalSpec& spec, const CellIndex& cell) {
  const int d = spec.dimension();
  if (static_cast<int>(cell.coords.size()) != d)
    throw std::invalid_argument("cell dimension does not match spec");
  check_level(cell.level);
  const Index hi = pow5(cell.level);
  for (Index c : cell.coords)
    if (c < 1 || c > hi)
      throw std::invalid_argument("cell coordinate out of range for level");

  Index div = cell.level > 0 ? pow5(cell.level - 1) : 1;
  for (int k = 0; k < cell.level; ++k) {
    std::int32_t key = 0;
    for (int ax = 0; ax < d; ++ax)
      key = key * kBase +
            static_cast<std::int32_t>(((cell.coords[ax] - 1) / div) % kBase);
    if (!spec.has_key(key)) return false;
    div /= kBase;
  }
  return true;
}

CellSet cells_at_level(const FractalSpec& spec, int level, std::size_t budget) {
  check_level(level);
  const int d = spec.dimension();
  const std::size_t npat = spec.pattern_size();

  std::size_t count = 1;
  for (int k = 0; k < level; ++k) {
    if (count > budget / npat + 1) throw BudgetError("cell budget exceeded");
    count *= npat;
  }
  if (count > budget) throw BudgetError("cell budget exceeded");

  const auto& digits = spec.pattern_digits();
  std::vector<Index> flat;
  flat.reserve(count * d);
  std::vector<Index> partial(static_cast<std::size_t>(d) * (level + 1), 0);

  // Depth-first over digit levels; canonical order is restored by the sort
  // inside from_cells.
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == level) {
      for (int ax = 0; ax < d; ++ax)
        flat.push_back(partial[depth * d + ax] + 1);
      return;
    }
    for (std::size_t c = 0; c < npat; ++c) {
      for (int ax = 0; ax < d; ++ax)
        partial[(depth + 1) * d + ax] =
            partial[depth * d + ax] * kBase + digits[c * d + ax];
      self(self, depth + 1);
    }
  };
  rec(rec, 0);

  return CellSet::from_cells(d, level, std::move(flat));
}

CellSet subdivide(const FractalSpec& spec, const CellSet& a, int m,
                  std::size_t budget) {
  if (a.dimension() != spec.dimension())
    throw std::invalid_argument("cell set dimension does not match spec");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  check_level(a.level() + m);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!contains_cell(spec, a.cell(i)))
      throw std::invalid_argument("cell set member not in fractal");
  if (m == 0) return a;

  const int d = spec.dimension();
  const CellSet w = cells_at_level(spec, m, budget);
  if (a.size() > 0 && w.size() > budget / a.size())
    throw BudgetError("cell budget exceeded");

  const Index scale = pow5(m);
  std::vector<Index> flat;
  flat.reserve(a.size() * w.size() * d);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto q = a.coords(i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto sub = w.coords(j);
      for (int ax = 0; ax < d; ++ax)
        flat.push_back((q[ax] - 1) * scale + sub[ax]);
    }
  }
  return CellSet::from_cells(d, a.level() + m, std::move(flat));
}

double hausdorff_dimension(const FractalSpec& spec) {
  return std::log(static_cast<double>(spec.pattern_size())) /
         std::log(static_cast<double>(kBase));
}

std::string to_text(const FractalSpec& spec) {
  std::ostringstream os;
  os << "dimension=" << spec.dimension() << "; base=" << kBase
     << "; retained=";
  const auto pats = spec.patterns();
  for (std::size_t i = 0; i < pats.size(); ++i) {
    if (i > 0) os << ';';
    for (std::size_t ax = 0; ax < pats[i].size(); ++ax) {
      if (ax > 0) os << ',';
      os << pats[i][ax];
    }
  }
  return os.str();
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

FractalSpec spec_from_text(std::string_view text, std::string name) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(';', pos);
    if (next == std::string_view::npos) next = text.size();
    std::string tok = trim(text.substr(pos, next - pos));
    if (!tok.empty()) tokens.push_back(tok);
    pos = next + 1;
  }
  int dimension = -1;
  bool saw_base = false;
  std::vector<std::vector<int>> retained;
  bool in_retained = false;
  for (std::string tok : tokens) {
    if (!in_retained) {
      std::size_t eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("malformed spec text near '" + tok + "'");
      std::string field = trim(tok.substr(0, eq));
      std::string value = trim(tok.substr(eq + 1));
      if (field == "dimension") {
        dimension = std::stoi(value);
      } else if (field == "base") {
        if (std::stoi(value) != kBase)
          throw std::invalid_argument("base must be 5");
        saw_base = true;
      } else if (field == "retained") {
        in_retained = true;
        tok = value;  // first tuple follows the '='
      } else {
        throw std::invalid_argument("unknown spec field: " + field);
      }
    }
    if (in_retained) {
      std::vector<int> tuple;
      std::istringstream is(tok);
      std::string part;
      while (std::getline(is, part, ','))
        tuple.push_back(std::stoi(trim(part)));
      retained.push_back(std::move(tuple));
    }
  }
  if (dimension < 1) throw std::invalid_argument("missing dimension field");
  if (!saw_base) throw std::invalid_argument("missing base field");
  if (retained.empty()) throw std::invalid_argument("missing retained field");
  return FractalSpec(dimension, std::move(retained), std::move(name));
}

}  // namespace carpet

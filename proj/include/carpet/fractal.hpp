#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carpet {

using Index = std::int64_t;

inline constexpr int kBase = 5;
// 5^27 is the largest power of five representable in Index.
inline constexpr int kMaxLevel = 27;
inline constexpr std::size_t kDefaultCellBudget = 10'000'000;

/// Thrown when an enumeration would exceed the configured cell budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 5^n for n in [0, kMaxLevel].
Index pow5(int n);

/// A level-n cell of the 5-adic partition of [0,1]^d: the closed box
/// prod_i [(l_i-1)/5^n, l_i/5^n] with 1-based coordinates l_i in {1,...,5^n}.
struct CellIndex {
  int level = 0;
  std::vector<Index> coords;

  bool operator==(const CellIndex&) const = default;
};

/// A self-similar subset of [0,1]^d, base 5, defined by the set of level-1
/// cells kept at every subdivision step. A level-n cell belongs to the set
/// iff each of its n base-5 digit tuples (most significant first) is a kept
/// level-1 cell.
class FractalSpec {
 public:
  /// `retained` holds 1-based level-1 cell tuples with entries in {1,...,5}.
  FractalSpec(int dimension, std::vector<std::vector<int>> retained,
              std::string name);

  int dimension() const { return dim_; }
  const std::string& name() const { return name_; }
  std::size_t pattern_size() const { return keys_.size(); }

  /// Kept level-1 cells as 1-based tuples, in canonical order.
  std::vector<std::vector<int>> patterns() const;

  /// Membership of a single packed digit tuple (0-based digits, axis 0 most
  /// significant). Used by the digit test.
  bool has_key(std::int32_t key) const;

  /// 0-based digit tuples, flat with stride dimension(), canonical order.
  const std::vector<std::int8_t>& pattern_digits() const { return digits_; }

  bool operator==(const FractalSpec& other) const {
    return dim_ == other.dim_ && keys_ == other.keys_;
  }

 private:
  int dim_ = 0;
  std::string name_;
  std::vector<std::int8_t> digits_;   // 0-based, flat, sorted by tuple
  std::vector<std::int32_t> keys_;    // packed tuples, sorted
};

/// An ordered collection of same-level cells, kept in canonical
/// (lexicographic) coordinate order with no duplicates.
class CellSet {
 public:
  CellSet() = default;
  CellSet(int dimension, int level);

  /// Builds a set from flat coordinates (size must be a multiple of
  /// `dimension`); sorts, deduplicates and range-checks.
  static CellSet from_cells(int dimension, int level, std::vector<Index> flat);

  int dimension() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  bool empty() const { return flat_.empty(); }

  std::span<const Index> coords(std::size_t i) const {
    return {flat_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  CellIndex cell(std::size_t i) const;

  /// Binary search; std::nullopt when absent.
  std::optional<std::size_t> find(std::span<const Index> coords) const;
  bool contains(std::span<const Index> coords) const {
    return find(coords).has_value();
  }

  const std::vector<Index>& flat() const { return flat_; }

  bool operator==(const CellSet&) const = default;

 private:
  int dim_ = 0;
  int level_ = 0;
  std::vector<Index> flat_;
};

/// Built-in specs: F2, F3, tildeF2, G1, G2. Throws std::invalid_argument on
/// any other name.
FractalSpec builtin_spec(std::string_view name);

/// Digit test: true iff every base-5 digit tuple of (coords - 1), most
/// significant first, is a kept pattern of `spec`.
bool contains_cell(const FractalSpec& spec, const CellIndex& cell);

/// All level-n cells of the fractal in canonical order;
/// size is pattern_size()^n. Throws BudgetError past `budget` cells.
CellSet cells_at_level(const FractalSpec& spec, int level,
                       std::size_t budget = kDefaultCellBudget);

/// Level (A.level + m) cells of the fractal contained in some member of A.
/// m = 0 returns A unchanged.
CellSet subdivide(const FractalSpec& spec, const CellSet& a, int m,
                  std::size_t budget = kDefaultCellBudget);

/// log(pattern count) / log 5.
double hausdorff_dimension(const FractalSpec& spec);

/// Text form: `dimension=<d>; base=5; retained=<t1>;<t2>;...` with each
/// tuple comma-separated, canonical order.
std::string to_text(const FractalSpec& spec);
FractalSpec spec_from_text(std::string_view text, std::string name = "custom");

}  // namespace carpet

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "carpet/fractal.hpp"

using namespace carpet;

namespace {

// Independent top-down construction: keep the retained children of every
// kept cell, one subdivision at a time.
std::set<std::vector<Index>> recursive_cells(const FractalSpec& spec, int n) {
  std::set<std::vector<Index>> cells = {std::vector<Index>(spec.dimension(), 1)};
  const auto patterns = spec.patterns();
  for (int k = 0; k < n; ++k) {
    std::set<std::vector<Index>> next;
    for (const auto& q : cells)
      for (const auto& r : patterns) {
        std::vector<Index> child(spec.dimension());
        for (int ax = 0; ax < spec.dimension(); ++ax)
          child[ax] = 5 * (q[ax] - 1) + r[ax];
        next.insert(std::move(child));
      }
    cells = std::move(next);
  }
  return cells;
}

// Full symmetry group of the discrete cube: axis permutations composed with
// per-axis reflections l -> hi + 1 - l.
std::vector<std::vector<Index>> cube_group_images(std::vector<Index> cell,
                                                  Index hi) {
  const int d = static_cast<int>(cell.size());
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  std::vector<std::vector<Index>> images;
  do {
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<Index> img(d);
      for (int i = 0; i < d; ++i) {
        Index v = cell[perm[i]];
        if (mask & (1 << i)) v = hi + 1 - v;
        img[i] = v;
      }
      images.push_back(std::move(img));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return images;
}

}  // namespace

TEST_CASE("built-in specs have the advertised pattern counts") {
  CHECK(builtin_spec("F2").pattern_size() == 21);
  CHECK(builtin_spec("F3").pattern_size() == 119);
  CHECK(builtin_spec("tildeF2").pattern_size() == 20);
  CHECK(builtin_spec("G1").pattern_size() == 2);
  CHECK(builtin_spec("G2").pattern_size() == 16);
  CHECK_THROWS_AS(builtin_spec("F4"), std::invalid_argument);
}

TEST_CASE("G1 keeps exactly the endpoint cells") {
  const auto pats = builtin_spec("G1").patterns();
  REQUIRE(pats.size() == 2);
  CHECK(pats[0] == std::vector<int>{1});
  CHECK(pats[1] == std::vector<int>{5});
}

TEST_CASE("membership follows the digit test") {
  const FractalSpec f2 = builtin_spec("F2");
  CHECK(contains_cell(f2, {1, {3, 3}}));        // center survives
  CHECK_FALSE(contains_cell(f2, {1, {3, 2}}));  // face neighbor removed
  CHECK(contains_cell(f2, {2, {12, 12}}));      // digits (3,3),(2,2)
  CHECK(contains_cell(f2, {0, {1, 1}}));
  CHECK_THROWS_AS(contains_cell(f2, {1, {3}}), std::invalid_argument);
  CHECK_THROWS_AS(contains_cell(f2, {1, {6, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(contains_cell(f2, {1, {0, 1}}), std::invalid_argument);
}

TEST_CASE("cell counts are pattern_size^n") {
  const FractalSpec f2 = builtin_spec("F2");
  CHECK(cells_at_level(f2, 0).size() == 1);
  CHECK(cells_at_level(f2, 1).size() == 21);
  CHECK(cells_at_level(f2, 2).size() == 441);
  CHECK(cells_at_level(f2, 3).size() == 9261);
  const FractalSpec f3 = builtin_spec("F3");
  CHECK(cells_at_level(f3, 1).size() == 119);
  CHECK(cells_at_level(f3, 2).size() == 14161);
  CHECK(cells_at_level(builtin_spec("G1"), 2).size() == 4);
}

TEST_CASE("enumeration agrees with the recursive construction") {
  for (const char* name : {"F2", "tildeF2", "G1", "G2"}) {
    const FractalSpec spec = builtin_spec(name);
    for (int n = 0; n <= 3; ++n) {
      const auto expected = recursive_cells(spec, n);
      const CellSet got = cells_at_level(spec, n);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        auto c = got.coords(i);
        CHECK(expected.count(std::vector<Index>(c.begin(), c.end())) == 1);
      }
    }
  }
  const FractalSpec f3 = builtin_spec("F3");
  const auto expected = recursive_cells(f3, 2);
  const CellSet got = cells_at_level(f3, 2);
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    auto c = got.coords(i);
    CHECK(expected.count(std::vector<Index>(c.begin(), c.end())) == 1);
  }
}

TEST_CASE("digit test agrees with set membership over the full grid") {
  const FractalSpec f3 = builtin_spec("F3");
  const auto cells = recursive_cells(f3, 2);
  Index hits = 0;
  for (Index x = 1; x <= 25; ++x)
    for (Index y = 1; y <= 25; ++y)
      for (Index z = 1; z <= 25; ++z) {
        const bool in = contains_cell(f3, {2, {x, y, z}});
        CHECK(in == (cells.count({x, y, z}) == 1));
        hits += in;
      }
  CHECK(hits == 14161);
}

TEST_CASE("cell sets are canonically ordered and deduplicated") {
  const CellSet set = CellSet::from_cells(2, 1, {3, 3, 1, 2, 1, 2, 5, 1});
  REQUIRE(set.size() == 3);
  CHECK(set.cell(0).coords == std::vector<Index>{1, 2});
  CHECK(set.cell(1).coords == std::vector<Index>{3, 3});
  CHECK(set.cell(2).coords == std::vector<Index>{5, 1});
  CHECK(set.find(std::vector<Index>{3, 3}).value() == 1);
  CHECK_FALSE(set.find(std::vector<Index>{2, 2}).has_value());
  CHECK_THROWS_AS(CellSet::from_cells(2, 1, {0, 1}), std::invalid_argument);
}

TEST_CASE("enumeration order is lexicographic") {
  const CellSet cells = cells_at_level(builtin_spec("F2"), 2);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    auto a = cells.coords(i - 1);
    auto b = cells.coords(i);
    CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST_CASE("subdivision composes with enumeration") {
  const FractalSpec f2 = builtin_spec("F2");
  const CellSet level1 = cells_at_level(f2, 1);
  CHECK(subdivide(f2, level1, 0) == level1);
  CHECK(subdivide(f2, level1, 2) == cells_at_level(f2, 3));

  const CellSet center = CellSet::from_cells(2, 1, {3, 3});
  CHECK(subdivide(f2, center, 1).size() == 21);
  const CellSet corner = CellSet::from_cells(2, 1, {1, 1});
  const CellSet grand = subdivide(f2, corner, 2);
  CHECK(grand.size() == 441);
  for (std::size_t i = 0; i < grand.size(); ++i) {
    auto c = grand.coords(i);
    CHECK(c[0] <= 25);
    CHECK(c[1] <= 25);
    CHECK(contains_cell(f2, grand.cell(i)));
  }
  const CellSet not_in = CellSet::from_cells(2, 1, {3, 2});
  CHECK_THROWS_AS(subdivide(f2, not_in, 1), std::invalid_argument);
}

TEST_CASE("enumeration budget is enforced") {
  const FractalSpec f2 = builtin_spec("F2");
  CHECK_THROWS_AS(cells_at_level(f2, 3, 1000), BudgetError);
  CHECK_THROWS_AS(cells_at_level(f2, 6), BudgetError);  // 21^6 > 10^7
}

TEST_CASE("hausdorff dimensions") {
  CHECK(hausdorff_dimension(builtin_spec("F2")) ==
        doctest::Approx(std::log(21.0) / std::log(5.0)).epsilon(1e-12));
  CHECK(hausdorff_dimension(builtin_spec("F2")) == doctest::Approx(1.8917).epsilon(1e-4));
  CHECK(hausdorff_dimension(builtin_spec("F3")) == doctest::Approx(2.9694).epsilon(1e-4));
  CHECK(hausdorff_dimension(builtin_spec("tildeF2")) == doctest::Approx(1.8614).epsilon(1e-4));
}

TEST_CASE("retained sets are invariant under the cube symmetry group") {
  for (const char* name : {"F2", "F3", "tildeF2", "G1", "G2"}) {
    const FractalSpec spec = builtin_spec(name);
    const auto pats = spec.patterns();
    std::set<std::vector<Index>> retained;
    for (const auto& t : pats)
      retained.insert(std::vector<Index>(t.begin(), t.end()));
    for (const auto& t : pats) {
      for (const auto& img :
           cube_group_images(std::vector<Index>(t.begin(), t.end()), 5))
        CHECK(retained.count(img) == 1);
    }
  }
}

TEST_CASE("spec text round-trips") {
  const FractalSpec f2 = builtin_spec("F2");
  const std::string text = to_text(f2);
  CHECK(text.starts_with("dimension=2; base=5; retained="));
  const FractalSpec back = spec_from_text(text, "F2copy");
  CHECK(back == f2);
  CHECK(back.name() == "F2copy");

  const FractalSpec tiny = spec_from_text("dimension=1; base=5; retained=1;5");
  CHECK(tiny == builtin_spec("G1"));

  CHECK_THROWS_AS(spec_from_text("dimension=2; retained=1,1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(spec_from_text("dimension=2; base=4; retained=1,1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(spec_from_text("dimension=2; base=5; retained=6,1"),
                  std::invalid_argument);
  CHECK_THROWS_AS(spec_from_text("dimension=2; base=5"),
                  std::invalid_argument);
}

TEST_CASE("spec constructor validates the pattern set") {
  CHECK_THROWS_AS(FractalSpec(2, {}, "empty"), std::invalid_argument);
  CHECK_THROWS_AS(FractalSpec(2, {{1}}, "arity"), std::invalid_argument);
  CHECK_THROWS_AS(FractalSpec(0, {{1}}, "dim"), std::invalid_argument);
}

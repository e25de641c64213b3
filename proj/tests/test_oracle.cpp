#include <doctest.h>

#include <cmath>

#include "carpet/oracle.hpp"
#include "test_util.hpp"

using namespace carpet;
using namespace carpet::testing;

TEST_CASE("three-vertex path splits evenly for every exponent") {
  const SparseGraph g = make_path(2);
  for (double p : {1.1, 1.5, 2.0, 3.0}) {
    const DirichletProblem problem{&g, {{0, 1.0}, {2, 0.0}}, p};
    const ConductanceResult r = oracle::brute_solve(problem);
    CHECK(r.converged);
    CHECK(r.solution[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.value == doctest::Approx(2.0 * std::pow(0.5, p)).epsilon(1e-9));
  }
}

TEST_CASE("star with one hot leaf") {
  const SparseGraph g = make_star(6);
  // Leaves 1..6; leaf 1 pinned to 1, the rest to 0; hub free.
  DirichletProblem problem{&g, {{1, 1.0}}, 2.0};
  for (int leaf = 2; leaf <= 6; ++leaf) problem.fixed.emplace_back(leaf, 0.0);
  const ConductanceResult r = oracle::brute_solve(problem);
  CHECK(r.converged);
  CHECK(r.solution[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(r.value == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("single free vertex between two pins, cubic energy") {
  const SparseGraph g = make_path(2);
  const DirichletProblem problem{&g, {{0, 1.0}, {2, 0.0}}, 3.0};
  const ConductanceResult r = oracle::brute_solve(problem);
  CHECK(r.solution[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("extended precision descent matches the double run") {
  const SparseGraph g = make_star(4);
  DirichletProblem problem{&g, {{1, 1.0}, {2, 0.0}, {3, 0.25}}, 1.5};
  oracle::OracleConfig wide;
  wide.extended_precision = true;
  const double a = oracle::brute_solve(problem).value;
  const double b = oracle::brute_solve(problem, wide).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("free-vertex cap is enforced") {
  const SparseGraph g = make_path(60);
  const DirichletProblem problem{&g, {{0, 1.0}, {60, 0.0}}, 2.0};
  CHECK_THROWS_AS(oracle::brute_solve(problem), BudgetError);
  oracle::OracleConfig roomy;
  roomy.max_vertices = 100;
  CHECK(oracle::brute_solve(problem, roomy).converged);
}

TEST_CASE("floating free vertices stay at zero") {
  // Two components; the second has no pins.
  const SparseGraph g = SparseGraph::from_edges(4, {{0, 1}, {2, 3}});
  const DirichletProblem problem{&g, {{0, 1.0}, {1, 0.25}}, 2.0};
  const ConductanceResult r = oracle::brute_solve(problem);
  CHECK(r.floating_free_vertices);
  CHECK(r.solution[2] == 0.0);
  CHECK(r.solution[3] == 0.0);
  CHECK(r.value == doctest::Approx(0.75 * 0.75));
}

TEST_CASE("exhaustive adjacency reproduces the hand-counted F2 graphs") {
  const FractalSpec f2 = builtin_spec("F2");
  const auto any =
      oracle::exhaustive_adjacency(f2, 1, AdjacencyMode::NonemptyIntersection);
  CHECK(any.size() == 44);
  const auto face =
      oracle::exhaustive_adjacency(f2, 1, AdjacencyMode::SharedFace);
  CHECK(face.size() == 24);
  for (auto e : face)
    CHECK(std::find(any.begin(), any.end(), e) != any.end());

  CHECK(oracle::exhaustive_adjacency(builtin_spec("G1"), 1,
                                     AdjacencyMode::NonemptyIntersection)
            .empty());
}

TEST_CASE("exhaustive adjacency size cap") {
  CHECK_THROWS_AS(oracle::exhaustive_adjacency(
                      builtin_spec("F3"), 2, AdjacencyMode::NonemptyIntersection),
                  BudgetError);
}

TEST_CASE("oracle rejects malformed problems") {
  const SparseGraph g = make_path(2);
  CHECK_THROWS_AS(
      oracle::brute_solve(DirichletProblem{&g, {{0, 1.0}}, 1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(oracle::brute_solve(DirichletProblem{&g, {}, 2.0}),
                  std::invalid_argument);
}

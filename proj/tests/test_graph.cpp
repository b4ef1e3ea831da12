#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "multiscale/formulas.hpp"
#include "multiscale/graph.hpp"

using namespace multiscale;

namespace {

constexpr double kLogInv03 = 1.2039728043259361;   // log(1/0.3)
constexpr double kLogInv07 = 0.35667494393873245;  // log(1/0.7)

MetricGraph doubled_weights(MetricGraph g) {
  for (GraphEdge& e : g.edges) e.weight *= 2.0;
  return g;
}

}  // namespace

TEST_CASE("edges carry lengths and the two weightings") {
  RandomSubstitutionSystem sys = load_example("sys-a.json");
  MetricGraph gp = build_graph(sys, Weighting::probability);
  REQUIRE(gp.vertex_count == 1);
  REQUIRE(gp.edges.size() == 2);
  CHECK(gp.edges[0].length == doctest::Approx(kLogInv03).epsilon(1e-15));
  CHECK(gp.edges[1].length == doctest::Approx(kLogInv07).epsilon(1e-15));
  CHECK(gp.edges[0].weight == 1.0);
  CHECK(gp.edges[1].weight == 1.0);
  CHECK(gp.edges[0].rule_index == 0);
  CHECK(gp.edges[0].tile_position == 0);
  CHECK(gp.edges[1].tile_position == 1);

  MetricGraph gv = build_graph(sys, Weighting::probability_times_volume);
  CHECK(gv.edges[0].weight == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(gv.edges[1].weight == doctest::Approx(0.7).epsilon(1e-15));

  // rule probabilities scale the weights
  RandomSubstitutionSystem sysc = load_example("sys-c.json");
  MetricGraph gcp = build_graph(sysc, Weighting::probability);
  REQUIRE(gcp.edges.size() == 4);
  CHECK(gcp.edges[0].weight == 0.5);
  CHECK(gcp.edges[2].weight == 0.5);
  CHECK(gcp.edges[2].rule_index == 1);
}

TEST_CASE("matrix samples reproduce the count, volume, and entropy matrices") {
  for (const char* name : {"sys-a.json", "sys-b.json", "sys-c.json"}) {
    RandomSubstitutionSystem sys = load_example(name);
    SystemMatrices m = system_matrices(sys);
    MetricGraph g = build_graph(sys, Weighting::probability);
    GraphMatrixSample at0 = matrix_at(g, 0.0);
    GraphMatrixSample at1 = matrix_at(g, 1.0);
    for (int i = 0; i < m.n; ++i)
      for (int j = 0; j < m.n; ++j) {
        CHECK(at0.M(i, j) == doctest::Approx(m.S(i, j)).epsilon(1e-14));
        CHECK(at1.M(i, j) == doctest::Approx(m.V(i, j)).epsilon(1e-14));
        // H = -M'(1): entropy matrix from the derivative sample
        CHECK(-at1.M_prime(i, j) == doctest::Approx(m.H(i, j)).epsilon(1e-13));
      }
  }
}

TEST_CASE("the natural weightings put the root at 1 and 0") {
  RandomSubstitutionSystem sys = load_example("sys-b.json");
  MetricGraph gp = build_graph(sys, Weighting::probability);
  CHECK(std::abs(solve_lambda(gp) - 1.0) <= 1e-10);
  MetricGraph gv = build_graph(sys, Weighting::probability_times_volume);
  CHECK(std::abs(solve_lambda(gv)) <= 1e-10);
}

TEST_CASE("doubling the weights moves the root to the known transcendental") {
  RandomSubstitutionSystem sys = load_example("sys-a.json");
  MetricGraph g2 = doubled_weights(build_graph(sys, Weighting::probability));
  double lambda = solve_lambda(g2);
  CHECK(lambda == doctest::Approx(2.3129213471939485).epsilon(1e-10));
  // the defining identity directly: 2(0.3^lambda + 0.7^lambda) = 1
  double check = 2.0 * (std::pow(0.3, lambda) + std::pow(0.7, lambda));
  CHECK(std::abs(check - 1.0) <= 1e-12);
}

TEST_CASE("Q is rank one with the predicted rows, for both weightings") {
  for (const char* name : {"sys-a.json", "sys-b.json", "sys-c.json"}) {
    RandomSubstitutionSystem sys = load_example(name);
    SystemMatrices m = system_matrices(sys);
    for (Weighting w : {Weighting::probability, Weighting::probability_times_volume}) {
      MetricGraph g = build_graph(sys, w);
      Mat q = compute_Q(g);
      REQUIRE(q.rows == m.n);
      for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
          CHECK(q(i, j) ==
                doctest::Approx(m.left_eigenvector[j] / m.entropy_total).epsilon(1e-10));
    }
  }
}

TEST_CASE("single-type Q equals the inverse entropy") {
  RandomSubstitutionSystem sys = load_example("sys-a.json");
  Mat q = compute_Q(build_graph(sys, Weighting::probability));
  REQUIRE(q.rows == 1);
  CHECK(q(0, 0) == doctest::Approx(1.6370247805217761).epsilon(1e-10));
}

TEST_CASE("perron data at the root") {
  RandomSubstitutionSystem sys = load_example("sys-b.json");
  PerronData p = perron_data(build_graph(sys, Weighting::probability));
  CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p.spectral_radius_at_lambda - 1.0) <= 1e-11);
  CHECK(p.left_eigenvector[0] == doctest::Approx(5.0 / 12.0).epsilon(1e-10));
  CHECK(p.left_eigenvector[1] == doctest::Approx(7.0 / 12.0).epsilon(1e-10));
  CHECK(p.right_eigenvector[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.right_eigenvector[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("walk sums: strict interval, early times, and known totals") {
  RandomSubstitutionSystem sys = load_example("sys-a.json");
  MetricGraph g = build_graph(sys, Weighting::probability);

  // t = 0: the interval (l(gamma) + delta, ...] is strict, so nothing counts
  CHECK(brute_force_walk_sum(g, 0, 0, 0.0, g.edges[0].length, 0.0) == 0.0);
  CHECK(brute_force_walk_sum(g, 0, 1, 0.0, g.edges[1].length, 0.0) == 0.0);

  // small positive t: only the two children of the start tile are alive
  CHECK(brute_force_walk_sum(g, 0, 0, 0.0, g.edges[0].length, 0.2) == 1.0);
  CHECK(brute_force_walk_sum(g, 0, 1, 0.0, g.edges[1].length, 0.2) == 1.0);
  CHECK(brute_force_total_count(g, 0, 0.2) == 2.0);

  // non-random system: totals are exact integers
  CHECK(brute_force_total_count(g, 0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(brute_force_total_count(g, 0, 4.0) == doctest::Approx(89.0).epsilon(1e-12));
  CHECK(brute_force_total_count(g, 0, 8.0) == doctest::Approx(4655.0).epsilon(1e-12));

  RandomSubstitutionSystem sysb = load_example("sys-b.json");
  MetricGraph gb = build_graph(sysb, Weighting::probability);
  CHECK(brute_force_total_count(gb, 0, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(brute_force_total_count(gb, 0, 4.0) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(brute_force_total_count(gb, 0, 8.0) == doctest::Approx(4605.0).epsilon(1e-12));
}

TEST_CASE("walk sums are additive over a split interval") {
  RandomSubstitutionSystem sys = load_example("sys-b.json");
  MetricGraph g = build_graph(sys, Weighting::probability);
  const double t = 6.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    double l = g.edges[e].length;
    double mid = l / 3.0;
    double whole = brute_force_walk_sum(g, 0, static_cast<int>(e), 0.0, l, t);
    double left = brute_force_walk_sum(g, 0, static_cast<int>(e), 0.0, mid, t);
    double right = brute_force_walk_sum(g, 0, static_cast<int>(e), mid, l, t);
    CHECK(std::abs(whole - (left + right)) <= 1e-12 * std::max(1.0, std::abs(whole)));
  }
}

TEST_CASE("walk sums validate input and respect the budget") {
  RandomSubstitutionSystem sys = load_example("sys-a.json");
  MetricGraph g = build_graph(sys, Weighting::probability);
  CHECK_THROWS_AS(brute_force_walk_sum(g, 0, 0, 0.5, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_walk_sum(g, 5, 0, 0.0, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_walk_sum(g, 0, 7, 0.0, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_total_count(g, 0, 8.0, 10), std::runtime_error);
}

TEST_CASE("strong connectivity") {
  CHECK(strongly_connected(build_graph(load_example("sys-b.json"), Weighting::probability)));
  std::string reducible = R"({
    "name": "x", "dimension": 1, "prototiles": ["a", "b"],
    "rules": {"a": [{"tiles": [{"type": "a", "volume": 0.5},
                               {"type": "a", "volume": 0.5}]}],
              "b": [{"tiles": [{"type": "a", "volume": 0.5},
                               {"type": "b", "volume": 0.5}]}]}
  })";
  CHECK_FALSE(strongly_connected(build_graph(parse_system(reducible),
                                             Weighting::probability)));
}

TEST_CASE("cycle length classification") {
  CHECK(check_incommensurable(build_graph(load_example("sys-a.json"),
                                          Weighting::probability)) ==
        Commensurability::likely_incommensurable);

  // equal lengths are trivially rational multiples
  std::string halves = R"({
    "name": "x", "dimension": 1, "prototiles": ["t"],
    "rules": {"t": [{"tiles": [{"type": "t", "volume": 0.5},
                               {"type": "t", "volume": 0.5}]}]}
  })";
  CHECK(check_incommensurable(build_graph(parse_system(halves),
                                          Weighting::probability)) ==
        Commensurability::commensurable);

  CHECK(check_incommensurable(build_graph(load_example("sys-commensurable.json"),
                                          Weighting::probability)) ==
        Commensurability::commensurable);

  // log(1/4) / log(4/3) has no small rational approximation
  std::string quarters = R"({
    "name": "x", "dimension": 1, "prototiles": ["t"],
    "rules": {"t": [{"tiles": [{"type": "t", "volume": 0.25},
                               {"type": "t", "volume": 0.75}]}]}
  })";
  CHECK(check_incommensurable(build_graph(parse_system(quarters),
                                          Weighting::probability)) ==
        Commensurability::likely_incommensurable);
}

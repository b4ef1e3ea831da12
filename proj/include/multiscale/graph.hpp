#pragma once
// The metric graph associated with a substitution system: one vertex per
// prototile, one directed edge per substitution tile, edge length
// log(1/volume). Two weightings are kept because the tile statistics use
// both: plain rule probabilities, and probability times child volume.

#include <cstdint>
#include <vector>

#include "multiscale/linalg.hpp"
#include "multiscale/system.hpp"

namespace multiscale {

enum class Weighting { probability, probability_times_volume };

struct GraphEdge {
  int src = 0, dst = 0;
  double length = 0.0;  // log(1 / tile volume)
  double weight = 0.0;
  int rule_index = 0;     // which rule of src produced this edge
  int tile_position = 0;  // position of the tile inside that rule
};

struct MetricGraph {
  int vertex_count = 0;
  Weighting weighting = Weighting::probability;
  std::vector<GraphEdge> edges;  // in declaration order of the system
};

MetricGraph build_graph(const RandomSubstitutionSystem& sys, Weighting w);

struct GraphMatrixSample {
  Mat M;        // M(s)_{ij} = sum over edges i->j of w e^{-l s}
  Mat M_prime;  // d/ds of the same
};

GraphMatrixSample matrix_at(const MetricGraph& g, double s);

// The root of rho(M(s)) = 1. rho(M(s)) is strictly decreasing in s, so a
// bracketed bisection is exact enough; the result satisfies
// |rho(M(lambda)) - 1| <= 1e-12 or an exception is thrown.
double solve_lambda(const MetricGraph& g);

// adj(I - M(lambda)) / (-tr(adj(I - M(lambda)) M'(lambda))). Rank-one with
// identical rows; row r times the stationary edge statistics gives the
// asymptotic walk counts.
Mat compute_Q(const MetricGraph& g);

struct PerronData {
  double lambda = 0.0;
  double spectral_radius_at_lambda = 0.0;
  std::vector<double> left_eigenvector;   // of M(lambda), sums to 1
  std::vector<double> right_eigenvector;  // of M(lambda), max entry 1
  Mat Q;
};

PerronData perron_data(const MetricGraph& g);

// Exact finite sum over walks gamma that start at vertex i and end with a
// step along target_edge: each walk contributes w(gamma) w(target) when
// l(gamma) + delta < t <= l(gamma) + eta, where l(gamma) is the length
// before the final edge. Depth-first enumeration; throws std::runtime_error
// once more than node_budget edge visits have been spent.
double brute_force_walk_sum(const MetricGraph& g, int i, int target_edge, double delta,
                            double eta, double t,
                            std::uint64_t node_budget = 100000000ULL);

// Sum of brute_force_walk_sum over every edge with delta = 0, eta = l(e):
// the number of tiles alive at time t, counted by walks.
double brute_force_total_count(const MetricGraph& g, int i, double t,
                               std::uint64_t node_budget = 100000000ULL);

bool strongly_connected(const MetricGraph& g);

// Classify the multiset of simple-cycle lengths. A pair of cycle lengths is
// considered rationally related when a/b is within 1e-9 of a fraction with
// denominator at most 10^4 (checked through continued-fraction convergents,
// which is exhaustive at that tolerance). All pairs rational =>
// commensurable; any irrational pair => likely_incommensurable; enumeration
// truncated before a verdict => unknown.
Commensurability check_incommensurable(const MetricGraph& g);

}  // namespace multiscale

#pragma once
// Closed-form tile statistics of a normalized, irreducible, incommensurable
// system: the count/volume matrices, the stationary type frequencies, and
// the limiting volume and gap distributions. All of it is elementary given
// the left Perron eigenvector of the volume matrix; the simulators exist to
// check these formulas, not the other way round.

#include <optional>
#include <vector>

#include "multiscale/linalg.hpp"
#include "multiscale/system.hpp"

namespace multiscale {

struct SystemMatrices {
  int n = 0;
  int dimension = 1;
  Mat S;  // expected child counts:  S_ij = sum_rules p * #(j-tiles)
  Mat V;  // expected child volumes: V_ij = sum p * vol (row-stochastic)
  Mat H;  // expected -vol log vol   (per child type)
  std::vector<double> left_eigenvector;  // left PF of V, sums to 1
  std::vector<double> right_eigenvector; // right PF of V (all ones)
  double entropy_total = 0.0;            // v^T H 1
};

SystemMatrices system_matrices(const RandomSubstitutionSystem& sys);

struct FrequencyPrediction {
  // Tiles of type r per unit volume: [v^T (S - V)]_r / (v^T H 1).
  std::vector<double> count_density;
  // Fraction of total volume carried by type r: [v^T H]_r / (v^T H 1).
  std::vector<double> volume_fraction;
  // Fraction of tiles of type r in a Kakutani partition:
  // [v^T (S - V)]_r / (v^T (S - V) 1).
  std::vector<double> count_fraction;
};

FrequencyPrediction type_predictions(const SystemMatrices& m);

// Pointwise densities and their exact integrals over volume ranges. Each
// substitution tile (i -> child of volume w, rule probability p) contributes
// the elementary density v_i p c_w / (v^T H 1), where c_w(x) = w / x^2 on
// w < x <= 1 for counts, and d_w(x) = w / x there for volume mass. Piecewise
// coefficients are exposed so callers can see the breakpoint structure.
class DensityEvaluator {
 public:
  DensityEvaluator(const RandomSubstitutionSystem& sys, const SystemMatrices& m);

  // Density of type-r tiles per unit volume at volume x (zero outside (0,1]).
  double count_density(int r, double x) const;
  // Density of volume carried by type-r tiles at volume x.
  double volume_density(int r, double x) const;

  // Exact integrals over (a,b], 0 <= a <= b <= 1.
  double count_in_range(int r, double a, double b) const;
  double volume_in_range(int r, double a, double b) const;

  // Same, summed over all types.
  double total_count_in_range(double a, double b) const;

  // Distinct child volumes, ascending: between consecutive breakpoints both
  // densities are smooth (A/x^2 and B/x respectively).
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  // count_density(r, x) == count_coefficient(r, x) / x^2.
  double count_coefficient(int r, double x) const;

  double entropy_total() const { return entropy_total_; }
  // v^T (S - V) 1: expected tiles per unit volume over all types.
  double count_total() const { return count_total_; }
  int dimension() const { return dimension_; }
  int type_count() const { return static_cast<int>(terms_.size()); }

 private:
  struct Term {
    double volume;  // child volume w
    double mass;    // v_i * p * w
  };
  std::vector<std::vector<Term>> terms_;  // per child type
  std::vector<double> breakpoints_;
  double entropy_total_ = 0.0;
  double count_total_ = 0.0;
  int dimension_ = 1;
};

enum class GapNormalization {
  unit_mass,       // density scaled so total probability is 1
  per_unit_length  // density scaled by tiles-per-unit-volume instead
};

// Limiting distribution of gap (interval) lengths of the one-dimensional
// semi-flow, evaluated at x. unit_mass divides the raw per-unit-volume curve
// by v^T (S - V) 1 so it integrates to one; per_unit_length divides by
// v^T H 1, in which case it integrates to tiles-per-unit-volume. Throws for
// dimension != 1, where interval gaps are not defined.
double gap_density(const DensityEvaluator& d, double x, GapNormalization norm);

// Exact integral of gap_density over (a,b].
double gap_mass_in_range(const DensityEvaluator& d, double a, double b,
                         GapNormalization norm);

struct GenerationPrediction {
  // expected_counts[g][r], expected_volumes[g][r] for g = 0..generations:
  // e_i^T S^g and e_i^T V^g. For a non-random system the counts are exact
  // integers (stored exactly in doubles up to 2^53).
  std::vector<std::vector<double>> expected_counts;
  std::vector<std::vector<double>> expected_volumes;
  bool exact_counts = false;              // true when the system is non-random
  std::vector<double> count_direction;    // left PF of S, sums to 1
  std::vector<double> volume_limit;       // left PF of V, sums to 1
  double count_growth_rate = 0.0;         // rho(S)
  // For fixed-scale systems (every child has the same volume alpha^d):
  // counts of type r in generation g approach
  // closed_form_amplitude[r] * count_growth_rate^g, with growth alpha^{-d}.
  std::optional<double> fixed_scale;
  std::vector<double> closed_form_amplitude;
};

GenerationPrediction generation_predictions(const RandomSubstitutionSystem& sys,
                                            int start_type, int generations);

}  // namespace multiscale

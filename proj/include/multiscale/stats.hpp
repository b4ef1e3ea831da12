#pragma once
// Empirical statistics and their comparison against the closed forms. Two
// kinds of estimator live here: plain snapshot histograms of a finished
// population, and exact time averages accumulated while a run is in flight.
// The time averages exist because any finite population is supported on a
// few dozen exact volume atoms — a snapshot histogram of atoms never
// converges to a smooth density, but the atoms sweep across bins as t
// advances, and averaging over a time window integrates them out exactly.

#include <cstdint>
#include <string>
#include <vector>

#include "multiscale/simulator.hpp"

namespace multiscale {

enum class HistogramNorm { raw, probability, per_unit_volume };

struct Histogram {
  std::vector<double> edges;       // size bins + 1, ascending; bins are (lo, hi]
  std::vector<double> counts;      // raw mass per bin
  std::vector<double> normalized;  // counts after the requested normalization
  HistogramNorm norm = HistogramNorm::raw;
};

std::vector<double> linear_edges(double lo, double hi, int bins);

// Bin index of value x for right-closed bins, -1 when outside.
int bin_index(const std::vector<double>& edges, double x);

struct TypeStats {
  std::vector<double> count_fraction;
  std::vector<double> volume_fraction;
};

TypeStats empirical_type_stats(const TilePopulation& pop, int n);

// Snapshot histogram of physical tile volumes, type r only (or all types
// for r = -1). per_unit_volume divides by the inflated region volume and is
// only meaningful for semi-flow patches; requesting it for a plain
// splitting-sequence population throws std::invalid_argument.
Histogram volume_histogram(const TilePopulation& pop, int r,
                           const std::vector<double>& edges, HistogramNorm norm);

// Probability histogram of interval lengths.
Histogram gap_histogram(const IntervalTiling& tiling, const std::vector<double>& edges);

// Histogram of pairwise boundary-point distances, normalized per pair and
// unit distance against a uniform baseline. Exploratory; cost is quadratic,
// so the pair budget throws std::runtime_error when exceeded.
Histogram pair_correlation(const IntervalTiling& tiling, const std::vector<double>& edges,
                           std::uint64_t max_pairs = 200000000ULL);

// Exact time-averaged volume occupancy over a window [ws, we]: feed it as
// the run's span hook. For a population live on (t0, t1], a tile of
// physical volume V at time t has inflated volume V e^{dt}; crossing times
// of the bin edges are available in closed form, so each entry contributes
// its exact integral of count * e^{-dt} (tiles per unit region volume) to
// every bin it sweeps. No sampling is involved.
class OccupancyAccumulator {
 public:
  OccupancyAccumulator(std::vector<double> edges, double window_start, double window_end,
                       int dimension, int type_filter = -1);

  void observe(const TilePopulation& pop, double t0, double t1);

  // Average tiles per unit region volume, per bin: compare against
  // count_in_range predictions.
  Histogram per_unit_volume() const;
  // The same mass renormalized to total 1: the time-averaged probability
  // that a tile falls in each bin. Normalizing once at the end avoids the
  // bias of averaging per-event ratios.
  Histogram probability() const;
  // Total of the per-unit-volume curve: estimates tiles per unit volume.
  double total_per_unit_volume() const;

  double window_length() const { return we_ - ws_; }

 private:
  std::vector<double> edges_, log_edges_, acc_;
  double ws_, we_;
  int dimension_, type_filter_;
};

// Time-averaged type fractions and tile density over a window, from the
// same span hook. Fractions are piecewise constant between events, so the
// time average is an exact weighted sum; the tile density integrates
// count * e^{-dt} in closed form per span.
class TypeFractionAccumulator {
 public:
  TypeFractionAccumulator(int n, double window_start, double window_end, int dimension);

  void observe(const TilePopulation& pop, double t0, double t1);

  std::vector<double> mean_count_fraction() const;
  std::vector<double> mean_volume_fraction() const;
  double mean_tiles_per_unit_volume() const;

 private:
  int n_, dimension_;
  double ws_, we_, time_acc_ = 0.0, tiles_acc_ = 0.0;
  std::vector<double> cf_acc_, vf_acc_;
};

// Welford running mean/variance with exact merging, for per-run statistics.
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0, m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  double variance() const;  // sample variance
  double stderror() const;  // standard error of the mean
};

struct ComparisonRow {
  std::string statistic;
  std::string type;  // prototile name, bin label, or empty
  double empirical = 0.0;
  double predicted = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double stderror = 0.0;
  std::uint64_t n = 1;  // sample size behind the empirical value
};

ComparisonRow make_comparison(const std::string& statistic, const std::string& type,
                              double empirical, double predicted, double stderror = 0.0,
                              std::uint64_t n = 1);

// Pairwise comparison of an empirical curve against predictions, plus a
// summary row holding the sup distance and, in rel_err, the sup distance
// relative to the largest predicted value.
std::vector<ComparisonRow> compare_curves(const std::string& statistic,
                                          const std::vector<std::string>& labels,
                                          const std::vector<double>& empirical,
                                          const std::vector<double>& predicted);

}  // namespace multiscale

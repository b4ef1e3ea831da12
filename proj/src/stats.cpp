#include "multiscale/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multiscale {

std::vector<double> linear_edges(double lo, double hi, int bins) {
  if (!(lo < hi) || bins < 1) throw std::invalid_argument("linear_edges: bad range");
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i)
    e[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  e.back() = hi;  // exact upper edge
  return e;
}

int bin_index(const std::vector<double>& edges, double x) {
  // right-closed bins (lo, hi]: a value sitting exactly on an edge belongs
  // to the bin below it
  auto it = std::lower_bound(edges.begin(), edges.end(), x);
  if (it == edges.begin() || it == edges.end()) return -1;
  return static_cast<int>(it - edges.begin()) - 1;
}

TypeStats empirical_type_stats(const TilePopulation& pop, int n) {
  TypeStats s;
  std::vector<std::uint64_t> counts = pop.type_counts(n);
  std::vector<double> vols = pop.type_volumes(n);
  double ctot = 0.0, vtot = 0.0;
  for (int r = 0; r < n; ++r) {
    ctot += static_cast<double>(counts[r]);
    vtot += vols[r];
  }
  s.count_fraction.resize(n);
  s.volume_fraction.resize(n);
  for (int r = 0; r < n; ++r) {
    s.count_fraction[r] = ctot > 0 ? static_cast<double>(counts[r]) / ctot : 0.0;
    s.volume_fraction[r] = vtot > 0 ? vols[r] / vtot : 0.0;
  }
  return s;
}

namespace {

void finish_histogram(Histogram& h, HistogramNorm norm, double per_unit_scale) {
  h.norm = norm;
  h.normalized = h.counts;
  switch (norm) {
    case HistogramNorm::raw:
      break;
    case HistogramNorm::probability: {
      double total = 0.0;
      for (double c : h.counts) total += c;
      if (total > 0)
        for (double& c : h.normalized) c /= total;
      break;
    }
    case HistogramNorm::per_unit_volume:
      for (double& c : h.normalized) c *= per_unit_scale;
      break;
  }
}

}  // namespace

Histogram volume_histogram(const TilePopulation& pop, int r,
                           const std::vector<double>& edges, HistogramNorm norm) {
  if (norm == HistogramNorm::per_unit_volume && !pop.is_patch)
    throw std::invalid_argument(
        "volume_histogram: per_unit_volume needs a semi-flow patch; a splitting "
        "sequence population has no inflated region volume to divide by");
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0.0);
  for (const auto& [key, val] : pop.entries) {
    if (r >= 0 && key.type != r) continue;
    int b = bin_index(edges, std::exp(pop.log_offset + val.log_volume));
    if (b >= 0) h.counts[b] += static_cast<double>(val.count);
  }
  // For a patch the region volume is exp(log_offset): e^{dt} * start volume.
  finish_histogram(h, norm, std::exp(-pop.log_offset));
  return h;
}

Histogram gap_histogram(const IntervalTiling& tiling, const std::vector<double>& edges) {
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0.0);
  for (double len : tiling.lengths) {
    int b = bin_index(edges, len);
    if (b >= 0) h.counts[b] += 1.0;
  }
  finish_histogram(h, HistogramNorm::probability, 0.0);
  return h;
}

Histogram pair_correlation(const IntervalTiling& tiling, const std::vector<double>& edges,
                           std::uint64_t max_pairs) {
  std::vector<double> pts = tiling.boundary_points();
  const std::size_t n = pts.size();
  std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (pairs > max_pairs)
    throw std::runtime_error("pair_correlation: pair budget exceeded; thin the tiling first");
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      int b = bin_index(edges, std::abs(pts[j] - pts[i]));
      if (b >= 0) h.counts[b] += 1.0;
    }
  // Uniform baseline: n(n-1)/2 pairs spread over total length L would put
  // pairs * 2 * width * (1 - r/L) in a bin at distance r; we normalize by
  // the r -> 0 limit and leave the edge falloff visible.
  double length = pts.back() - pts.front();
  h.norm = HistogramNorm::per_unit_volume;
  h.normalized = h.counts;
  if (length > 0 && pairs > 0)
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
      double width = h.edges[b + 1] - h.edges[b];
      h.normalized[b] /= static_cast<double>(pairs) * 2.0 * width / length;
    }
  return h;
}

OccupancyAccumulator::OccupancyAccumulator(std::vector<double> edges, double window_start,
                                           double window_end, int dimension,
                                           int type_filter)
    : edges_(std::move(edges)),
      ws_(window_start),
      we_(window_end),
      dimension_(dimension),
      type_filter_(type_filter) {
  if (!(ws_ < we_)) throw std::invalid_argument("occupancy: empty window");
  log_edges_.reserve(edges_.size());
  for (double e : edges_) {
    if (!(e > 0.0)) throw std::invalid_argument("occupancy: edges must be positive");
    log_edges_.push_back(std::log(e));
  }
  acc_.assign(edges_.size() - 1, 0.0);
}

void OccupancyAccumulator::observe(const TilePopulation& pop, double t0, double t1) {
  double a = std::max(t0, ws_), b = std::min(t1, we_);
  if (!(a < b)) return;
  const double d = static_cast<double>(dimension_);
  for (const auto& [key, val] : pop.entries) {
    if (type_filter_ >= 0 && key.type != type_filter_) continue;
    // inflated volume at time t: exp(lam + d t), lam = log_offset + log vol
    double lam = pop.log_offset + val.log_volume;
    // The tile sits in bin j while (log_edges[j] - lam)/d < t <= (log_edges[j+1] - lam)/d.
    // Clip that interval to [a, b] and add count * int e^{-(dt + lam0)} dt,
    // the exact tiles-per-unit-region-volume weight; lam0 = log_offset keeps
    // runs from non-unit start tiles normalized per unit of start volume.
    double cnt = static_cast<double>(val.count);
    for (std::size_t j = 0; j + 1 < log_edges_.size(); ++j) {
      double x0 = std::max(a, (log_edges_[j] - lam) / d);
      double x1 = std::min(b, (log_edges_[j + 1] - lam) / d);
      if (!(x0 < x1)) continue;
      acc_[j] += cnt * (std::exp(-d * x0) - std::exp(-d * x1)) / d *
                 std::exp(-pop.log_offset);
    }
  }
}

Histogram OccupancyAccumulator::per_unit_volume() const {
  Histogram h;
  h.edges = edges_;
  h.counts = acc_;
  h.norm = HistogramNorm::per_unit_volume;
  h.normalized = acc_;
  for (double& v : h.normalized) v /= window_length();
  return h;
}

Histogram OccupancyAccumulator::probability() const {
  Histogram h;
  h.edges = edges_;
  h.counts = acc_;
  finish_histogram(h, HistogramNorm::probability, 0.0);
  return h;
}

double OccupancyAccumulator::total_per_unit_volume() const {
  double t = 0.0;
  for (double v : acc_) t += v;
  return t / window_length();
}

TypeFractionAccumulator::TypeFractionAccumulator(int n, double window_start,
                                                 double window_end, int dimension)
    : n_(n), dimension_(dimension), ws_(window_start), we_(window_end) {
  if (!(ws_ < we_)) throw std::invalid_argument("fraction accumulator: empty window");
  cf_acc_.assign(n, 0.0);
  vf_acc_.assign(n, 0.0);
}

void TypeFractionAccumulator::observe(const TilePopulation& pop, double t0, double t1) {
  double a = std::max(t0, ws_), b = std::min(t1, we_);
  if (!(a < b)) return;
  double dt = b - a;
  std::vector<std::uint64_t> counts = pop.type_counts(n_);
  std::vector<double> vols = pop.type_volumes(n_);
  double ctot = 0.0, vtot = 0.0;
  for (int r = 0; r < n_; ++r) {
    ctot += static_cast<double>(counts[r]);
    vtot += vols[r];
  }
  for (int r = 0; r < n_; ++r) {
    if (ctot > 0) cf_acc_[r] += dt * static_cast<double>(counts[r]) / ctot;
    if (vtot > 0) vf_acc_[r] += dt * vols[r] / vtot;
  }
  const double d = static_cast<double>(dimension_);
  tiles_acc_ += ctot * (std::exp(-d * a) - std::exp(-d * b)) / d * std::exp(-pop.log_offset);
  time_acc_ += dt;
}

std::vector<double> TypeFractionAccumulator::mean_count_fraction() const {
  std::vector<double> r = cf_acc_;
  for (double& x : r) x /= time_acc_;
  return r;
}

std::vector<double> TypeFractionAccumulator::mean_volume_fraction() const {
  std::vector<double> r = vf_acc_;
  for (double& x : r) x /= time_acc_;
  return r;
}

double TypeFractionAccumulator::mean_tiles_per_unit_volume() const {
  return tiles_acc_ / (we_ - ws_);
}

void RunningStats::add(double x) {
  n += 1;
  double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  double na = static_cast<double>(n), nb = static_cast<double>(other.n);
  double delta = other.mean - mean;
  mean += delta * nb / (na + nb);
  m2 += other.m2 + delta * delta * na * nb / (na + nb);
  n += other.n;
}

double RunningStats::variance() const {
  return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
}

double RunningStats::stderror() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

ComparisonRow make_comparison(const std::string& statistic, const std::string& type,
                              double empirical, double predicted, double stderror,
                              std::uint64_t n) {
  ComparisonRow row;
  row.statistic = statistic;
  row.type = type;
  row.empirical = empirical;
  row.predicted = predicted;
  row.abs_err = std::abs(empirical - predicted);
  row.rel_err = predicted != 0.0 ? row.abs_err / std::abs(predicted) : 0.0;
  row.stderror = stderror;
  row.n = n;
  return row;
}

std::vector<ComparisonRow> compare_curves(const std::string& statistic,
                                          const std::vector<std::string>& labels,
                                          const std::vector<double>& empirical,
                                          const std::vector<double>& predicted) {
  if (labels.size() != empirical.size() || empirical.size() != predicted.size())
    throw std::invalid_argument("compare_curves: shape mismatch");
  std::vector<ComparisonRow> rows;
  rows.reserve(labels.size() + 1);
  double sup = 0.0, pred_max = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rows.push_back(make_comparison(statistic, labels[i], empirical[i], predicted[i]));
    sup = std::max(sup, std::abs(empirical[i] - predicted[i]));
    pred_max = std::max(pred_max, std::abs(predicted[i]));
  }
  ComparisonRow summary;
  summary.statistic = statistic + "_sup_distance";
  summary.type = "";
  summary.empirical = sup;
  summary.predicted = pred_max;
  summary.abs_err = sup;
  summary.rel_err = pred_max > 0 ? sup / pred_max : 0.0;
  summary.stderror = 0.0;
  summary.n = labels.size();
  rows.push_back(summary);
  return rows;
}

}  // namespace multiscale

#include "multiscale/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multiscale {

SystemMatrices system_matrices(const RandomSubstitutionSystem& sys) {
  SystemMatrices m;
  m.n = sys.type_count();
  m.dimension = sys.dimension;
  m.S = Mat(m.n, m.n);
  m.V = Mat(m.n, m.n);
  m.H = Mat(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (const RuleSpec& rule : sys.rules[i])
      for (const SubstitutionTileSpec& t : rule.tiles) {
        m.S(i, t.type) += rule.probability;
        m.V(i, t.type) += rule.probability * t.volume;
        m.H(i, t.type) += rule.probability * (-t.volume * std::log(t.volume));
      }
  m.left_eigenvector = left_pf_eigenvector(m.V);
  m.right_eigenvector = right_pf_eigenvector(m.V);
  m.entropy_total = 0.0;
  std::vector<double> vh = left_multiply(m.left_eigenvector, m.H);
  for (double x : vh) m.entropy_total += x;
  return m;
}

FrequencyPrediction type_predictions(const SystemMatrices& m) {
  FrequencyPrediction p;
  std::vector<double> vsv = left_multiply(m.left_eigenvector, m.S - m.V);
  std::vector<double> vh = left_multiply(m.left_eigenvector, m.H);
  double h_total = 0.0, c_total = 0.0;
  for (int r = 0; r < m.n; ++r) {
    h_total += vh[r];
    c_total += vsv[r];
  }
  p.count_density.resize(m.n);
  p.volume_fraction.resize(m.n);
  p.count_fraction.resize(m.n);
  for (int r = 0; r < m.n; ++r) {
    p.count_density[r] = vsv[r] / h_total;
    p.volume_fraction[r] = vh[r] / h_total;
    p.count_fraction[r] = vsv[r] / c_total;
  }
  return p;
}

DensityEvaluator::DensityEvaluator(const RandomSubstitutionSystem& sys,
                                   const SystemMatrices& m) {
  dimension_ = sys.dimension;
  entropy_total_ = m.entropy_total;
  terms_.resize(sys.type_count());
  const std::vector<double>& v = m.left_eigenvector;
  for (int i = 0; i < sys.type_count(); ++i)
    for (const RuleSpec& rule : sys.rules[i])
      for (const SubstitutionTileSpec& t : rule.tiles) {
        terms_[t.type].push_back({t.volume, v[i] * rule.probability * t.volume});
        breakpoints_.push_back(t.volume);
      }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()),
                     breakpoints_.end());
  count_total_ = 0.0;
  for (const auto& tt : terms_)
    for (const Term& t : tt) count_total_ += t.mass * (1.0 / t.volume - 1.0);
  // t.mass * (1/w - 1) = v_i p (1 - w): summing gives v^T (S - V) 1.
}

double DensityEvaluator::count_coefficient(int r, double x) const {
  double c = 0.0;
  for (const Term& t : terms_.at(r))
    if (t.volume < x && x <= 1.0) c += t.mass;
  return c / entropy_total_;
}

double DensityEvaluator::count_density(int r, double x) const {
  if (!(x > 0.0)) return 0.0;
  return count_coefficient(r, x) / (x * x);
}

double DensityEvaluator::volume_density(int r, double x) const {
  if (!(x > 0.0)) return 0.0;
  return count_coefficient(r, x) / x;
}

namespace {

void check_range(double a, double b) {
  if (!(0.0 <= a && a <= b && b <= 1.0))
    throw std::invalid_argument("density integral: need 0 <= a <= b <= 1");
}

}  // namespace

double DensityEvaluator::count_in_range(int r, double a, double b) const {
  check_range(a, b);
  // integral of w/x^2 over (a,b] intersect (w,1] = w (1/max(a,w) - 1/max(b,w))
  double total = 0.0;
  for (const Term& t : terms_.at(r))
    total += t.mass * (1.0 / std::max(a, t.volume) - 1.0 / std::max(b, t.volume));
  return total / entropy_total_;
}

double DensityEvaluator::volume_in_range(int r, double a, double b) const {
  check_range(a, b);
  // integral of w/x over (a,b] intersect (w,1] = w log(max(b,w)/max(a,w))
  double total = 0.0;
  for (const Term& t : terms_.at(r))
    total += t.mass * std::log(std::max(b, t.volume) / std::max(a, t.volume));
  return total / entropy_total_;
}

double DensityEvaluator::total_count_in_range(double a, double b) const {
  double total = 0.0;
  for (int r = 0; r < type_count(); ++r) total += count_in_range(r, a, b);
  return total;
}

namespace {

double gap_scale(const DensityEvaluator& d, GapNormalization norm) {
  if (d.dimension() != 1)
    throw std::invalid_argument("gap_density: gaps are defined only in dimension 1");
  // count_density already divides by v^T H 1, which is the per-unit-length
  // scaling; unit mass rescales so the density integrates to one.
  return norm == GapNormalization::per_unit_length ? 1.0
                                                   : d.entropy_total() / d.count_total();
}

}  // namespace

double gap_density(const DensityEvaluator& d, double x, GapNormalization norm) {
  double scale = gap_scale(d, norm);
  double total = 0.0;
  for (int r = 0; r < d.type_count(); ++r) total += d.count_density(r, x);
  return scale * total;
}

double gap_mass_in_range(const DensityEvaluator& d, double a, double b,
                         GapNormalization norm) {
  return gap_scale(d, norm) * d.total_count_in_range(a, b);
}

GenerationPrediction generation_predictions(const RandomSubstitutionSystem& sys,
                                            int start_type, int generations) {
  if (start_type < 0 || start_type >= sys.type_count())
    throw std::invalid_argument("generation_predictions: start type out of range");
  if (generations < 0)
    throw std::invalid_argument("generation_predictions: negative generation count");

  SystemMatrices m = system_matrices(sys);
  GenerationPrediction p;
  p.exact_counts = !sys.is_random();

  std::vector<double> counts(m.n, 0.0), volumes(m.n, 0.0);
  counts[start_type] = 1.0;
  volumes[start_type] = 1.0;
  p.expected_counts.push_back(counts);
  p.expected_volumes.push_back(volumes);
  for (int g = 0; g < generations; ++g) {
    counts = left_multiply(counts, m.S);
    volumes = left_multiply(volumes, m.V);
    p.expected_counts.push_back(counts);
    p.expected_volumes.push_back(volumes);
  }

  p.count_growth_rate = spectral_radius(m.S);
  Mat s_norm = m.S;
  for (double& x : s_norm.a) x /= p.count_growth_rate;
  p.count_direction = left_pf_eigenvector(s_norm);
  p.volume_limit = m.left_eigenvector;

  // Fixed scale: every child tile in every rule has one common volume.
  double w0 = sys.rules[0][0].tiles[0].volume;
  bool fixed = true;
  for (const auto& rl : sys.rules)
    for (const RuleSpec& rule : rl)
      for (const SubstitutionTileSpec& t : rule.tiles)
        if (t.volume != w0) fixed = false;
  if (fixed) {
    p.fixed_scale = std::pow(w0, 1.0 / sys.dimension);
    // Counts approach vol(start) * s_r / (s^T u) * rho(S)^g with u the right
    // PF eigenvector of S; vol(start) = 1 here.
    std::vector<double> u = right_pf_eigenvector(s_norm);
    double su = 0.0;
    for (int r = 0; r < m.n; ++r) su += p.count_direction[r] * u[r];
    p.closed_form_amplitude.resize(m.n);
    for (int r = 0; r < m.n; ++r)
      p.closed_form_amplitude[r] = u[start_type] * p.count_direction[r] / su;
  }
  return p;
}

}  // namespace multiscale

#pragma once
// Monte-Carlo machinery: Kakutani splitting sequences, substitution
// semi-flow patches, explicit one-dimensional tilings, and generation-wise
// substitution. Populations are aggregated by (type, exponent vector over
// the system's distinct child volumes), which keeps a 10^7-tile run at a
// few hundred map entries and makes tile volumes exact products — the whole
// simulation is O(events * distinct keys) instead of O(tiles).

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "multiscale/rng.hpp"
#include "multiscale/system.hpp"

namespace multiscale {

// Per-system tables resolved once: distinct child volumes in declaration
// order, and every rule's children as (type, volume index) pairs.
struct CompiledSystem {
  int n = 0;
  int dimension = 1;
  bool random = false;
  std::vector<double> volumes;       // distinct child volumes
  std::vector<double> log_volumes;   // log of each
  struct Child {
    int type;
    int vol_index;
  };
  struct Rule {
    double probability;
    std::vector<Child> children;
  };
  std::vector<std::vector<Rule>> rules;      // per type
  std::vector<std::vector<double>> probs;    // per type, rule probabilities
};

CompiledSystem compile(const RandomSubstitutionSystem& sys);

// Population key: tile volume = product of volumes[i]^exponents[i]. The map
// ordering (type, then exponents lexicographically) is the canonical order
// in which randomness is consumed, so runs are reproducible by construction.
struct PopKey {
  std::uint16_t type = 0;
  std::vector<std::uint32_t> exponents;

  friend bool operator<(const PopKey& a, const PopKey& b) {
    if (a.type != b.type) return a.type < b.type;
    return a.exponents < b.exponents;
  }
};

struct PopValue {
  std::uint64_t count = 0;
  double log_volume = 0.0;  // recomputed from exponents, never accumulated
};

struct TilePopulation {
  std::map<PopKey, PopValue> entries;
  int step_index = 0;
  std::vector<double> event_times;  // event m: time population m+1 starts
  // Physical tile volume = exp(log_offset + log_volume). For splitting
  // sequences log_offset = log(start volume); finalized semi-flow patches
  // fold the inflation e^{d t} in as well.
  double log_offset = 0.0;
  bool is_patch = false;
  double patch_time = 0.0;
  int dimension = 1;

  std::uint64_t total_count() const;
  double total_volume() const;     // physical
  double max_log_volume() const;   // un-offset, over entries
  // Time at which the largest tile reaches unit volume under e^{dt} inflation.
  double next_event_time() const;
  std::vector<std::uint64_t> type_counts(int n) const;
  std::vector<double> type_volumes(int n) const;  // physical
};

TilePopulation make_start_population(const CompiledSystem& cs, int start_type,
                                     double start_volume);

// Substitute every tile whose log volume is within 1e-9 of the maximum,
// drawing one rule per tile (multinomially per group, in canonical key
// order) from rule_stream. Appends the new next_event_time to event_times.
void kakutani_step(TilePopulation& pop, const CompiledSystem& cs, SplitMix64& rule_stream);

struct StopRule {
  enum class Kind { steps, tiles, time } kind = Kind::steps;
  double value = 0.0;
};

struct SimulationConfig {
  std::uint64_t seed = 0;
  StopRule stop;
  int start_type = 0;
  double start_volume = 1.0;
};

// Called with (population, t0, t1) for every population that is the live
// partition on the time interval (t0, t1]; used for exact time-averaged
// statistics without snapshot copies.
using SpanHook = std::function<void(const TilePopulation&, double, double)>;

// Kakutani splitting until the stop rule fires: 'steps' counts
// substitution events, 'tiles' stops at the first population of at least
// that many tiles, 'time' runs the partition valid at that time (a tile
// reaching unit volume exactly at the stop time is not substituted).
TilePopulation run_kakutani(const CompiledSystem& cs, const SimulationConfig& config,
                            const SpanHook& hook = {});

// The semi-flow patch at time t grown from a single start tile: the
// Kakutani run to time t with the inflation folded into log_offset, so
// physical volumes land in (min child volume, 1].
TilePopulation semiflow_patch(const CompiledSystem& cs, int start_type,
                              double start_volume, double t, std::uint64_t seed,
                              const SpanHook& hook = {});

// Explicit one-dimensional tiling: same splitting schedule and rule draws
// as the aggregate run (stream 0), plus a left-to-right placement of the
// drawn rules within each group (Fisher-Yates on stream 1). The aggregate
// of the tiling therefore equals the aggregate run exactly, tile for tile.
struct IntervalTiling {
  std::vector<int> types;       // left to right
  std::vector<double> lengths;  // physical
  std::vector<double> boundary_points() const;  // prefix sums, size + 1
};

struct ExplicitRunResult {
  IntervalTiling tiling;
  TilePopulation population;
};

ExplicitRunResult run_explicit_1d(const CompiledSystem& cs, const SimulationConfig& config,
                                  const SpanHook& hook = {});

// Generation-wise substitution: every tile substitutes each round. Means and
// sample standard errors over independent trials, indexed [generation][type].
struct GenerationRun {
  int trials = 0;
  std::vector<std::vector<double>> mean_counts;
  std::vector<std::vector<double>> se_counts;
  std::vector<std::vector<double>> mean_volumes;
  std::vector<std::vector<double>> se_volumes;
};

GenerationRun run_generation(const CompiledSystem& cs, int start_type, int generations,
                             std::uint64_t seed, int trials = 64);

}  // namespace multiscale

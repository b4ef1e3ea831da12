#include "multiscale/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace multiscale {

namespace {
constexpr double kGroupEps = 1e-9;  // tiles this close in log volume split together
}

CompiledSystem compile(const RandomSubstitutionSystem& sys) {
  CompiledSystem cs;
  cs.n = sys.type_count();
  cs.dimension = sys.dimension;
  cs.random = sys.is_random();
  cs.rules.resize(cs.n);
  cs.probs.resize(cs.n);
  for (int i = 0; i < cs.n; ++i) {
    for (const RuleSpec& rule : sys.rules[i]) {
      CompiledSystem::Rule cr;
      cr.probability = rule.probability;
      for (const SubstitutionTileSpec& t : rule.tiles) {
        auto it = std::find(cs.volumes.begin(), cs.volumes.end(), t.volume);
        int idx;
        if (it == cs.volumes.end()) {
          idx = static_cast<int>(cs.volumes.size());
          cs.volumes.push_back(t.volume);
          cs.log_volumes.push_back(std::log(t.volume));
        } else {
          idx = static_cast<int>(it - cs.volumes.begin());
        }
        cr.children.push_back({t.type, idx});
      }
      cs.rules[i].push_back(std::move(cr));
      cs.probs[i].push_back(rule.probability);
    }
  }
  return cs;
}

namespace {

// Log volume as a fixed-order dot product so identical exponent vectors get
// bit-identical values regardless of the substitution path that formed them.
double key_log_volume(const CompiledSystem& cs, const std::vector<std::uint32_t>& exp) {
  double lv = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i)
    lv += static_cast<double>(exp[i]) * cs.log_volumes[i];
  return lv;
}

}  // namespace

std::uint64_t TilePopulation::total_count() const {
  std::uint64_t c = 0;
  for (const auto& [k, v] : entries) c += v.count;
  return c;
}

double TilePopulation::total_volume() const {
  double t = 0.0;
  for (const auto& [k, v] : entries)
    t += static_cast<double>(v.count) * std::exp(log_offset + v.log_volume);
  return t;
}

double TilePopulation::max_log_volume() const {
  double mx = -1e300;
  for (const auto& [k, v] : entries) mx = std::max(mx, v.log_volume);
  return mx;
}

double TilePopulation::next_event_time() const {
  return -(log_offset + max_log_volume()) / dimension;
}

std::vector<std::uint64_t> TilePopulation::type_counts(int n) const {
  std::vector<std::uint64_t> c(n, 0);
  for (const auto& [k, v] : entries) c[k.type] += v.count;
  return c;
}

std::vector<double> TilePopulation::type_volumes(int n) const {
  std::vector<double> t(n, 0.0);
  for (const auto& [k, v] : entries)
    t[k.type] += static_cast<double>(v.count) * std::exp(log_offset + v.log_volume);
  return t;
}

TilePopulation make_start_population(const CompiledSystem& cs, int start_type,
                                     double start_volume) {
  if (start_type < 0 || start_type >= cs.n)
    throw std::invalid_argument("start type out of range");
  if (!(start_volume > 0.0 && start_volume <= 1.0))
    throw std::invalid_argument("start volume must lie in (0,1]");
  TilePopulation pop;
  pop.dimension = cs.dimension;
  pop.log_offset = std::log(start_volume);
  PopKey key;
  key.type = static_cast<std::uint16_t>(start_type);
  key.exponents.assign(cs.volumes.size(), 0);
  pop.entries[key] = PopValue{1, 0.0};
  return pop;
}

namespace {

struct GroupSplit {
  PopKey key;
  PopValue val;
  std::vector<std::uint64_t> rule_counts;
};

// Decide one substitution event: which keys split and how their tiles
// distribute over rules. Consumes rule_stream in canonical key order.
std::vector<GroupSplit> plan_step(const TilePopulation& pop, const CompiledSystem& cs,
                                  SplitMix64& rule_stream) {
  double mx = pop.max_log_volume();
  std::vector<GroupSplit> plan;
  for (const auto& [key, val] : pop.entries) {
    if (val.log_volume < mx - kGroupEps) continue;
    GroupSplit g{key, val, {}};
    if (cs.probs[key.type].size() == 1)
      g.rule_counts = {val.count};
    else
      g.rule_counts = multinomial(rule_stream, val.count, cs.probs[key.type]);
    plan.push_back(std::move(g));
  }
  return plan;
}

void apply_plan(TilePopulation& pop, const CompiledSystem& cs,
                const std::vector<GroupSplit>& plan) {
  for (const GroupSplit& g : plan) pop.entries.erase(g.key);
  for (const GroupSplit& g : plan) {
    for (std::size_t r = 0; r < g.rule_counts.size(); ++r) {
      std::uint64_t cnt = g.rule_counts[r];
      if (cnt == 0) continue;
      for (const CompiledSystem::Child& ch : cs.rules[g.key.type][r].children) {
        PopKey child = g.key;
        child.type = static_cast<std::uint16_t>(ch.type);
        child.exponents[ch.vol_index] += 1;
        PopValue& slot = pop.entries[child];
        if (slot.count == 0) slot.log_volume = key_log_volume(cs, child.exponents);
        slot.count += cnt;
      }
    }
  }
  pop.step_index += 1;
  pop.event_times.push_back(pop.next_event_time());
}

}  // namespace

void kakutani_step(TilePopulation& pop, const CompiledSystem& cs, SplitMix64& rule_stream) {
  if (pop.entries.empty()) throw std::invalid_argument("kakutani_step: empty population");
  apply_plan(pop, cs, plan_step(pop, cs, rule_stream));
}

namespace {

bool stop_after_step(const TilePopulation& pop, const StopRule& stop) {
  switch (stop.kind) {
    case StopRule::Kind::steps:
      return pop.step_index >= static_cast<int>(stop.value);
    case StopRule::Kind::tiles:
      return pop.total_count() >= static_cast<std::uint64_t>(stop.value);
    default:
      return false;  // time stops are handled before the step
  }
}

TilePopulation run_loop(const CompiledSystem& cs, const SimulationConfig& config,
                        const SpanHook& hook, SplitMix64& rule_stream,
                        const std::function<void(const std::vector<GroupSplit>&)>& on_plan) {
  TilePopulation pop = make_start_population(cs, config.start_type, config.start_volume);
  if (config.stop.kind == StopRule::Kind::steps && config.stop.value <= 0) return pop;
  if (config.stop.kind == StopRule::Kind::tiles &&
      pop.total_count() >= static_cast<std::uint64_t>(config.stop.value))
    return pop;
  double t_prev = 0.0;
  while (true) {
    double t_next = pop.next_event_time();
    if (config.stop.kind == StopRule::Kind::time && t_next >= config.stop.value) {
      if (hook) hook(pop, t_prev, config.stop.value);
      break;
    }
    if (hook) hook(pop, t_prev, t_next);
    std::vector<GroupSplit> plan = plan_step(pop, cs, rule_stream);
    if (on_plan) on_plan(plan);
    apply_plan(pop, cs, plan);
    t_prev = t_next;
    if (stop_after_step(pop, config.stop)) break;
  }
  return pop;
}

}  // namespace

TilePopulation run_kakutani(const CompiledSystem& cs, const SimulationConfig& config,
                            const SpanHook& hook) {
  SplitMix64 rule_stream = derive_stream(config.seed, 0);
  return run_loop(cs, config, hook, rule_stream, {});
}

TilePopulation semiflow_patch(const CompiledSystem& cs, int start_type,
                              double start_volume, double t, std::uint64_t seed,
                              const SpanHook& hook) {
  if (!(t >= 0.0)) throw std::invalid_argument("semiflow_patch: time must be >= 0");
  SimulationConfig config;
  config.seed = seed;
  config.stop = {StopRule::Kind::time, t};
  config.start_type = start_type;
  config.start_volume = start_volume;
  TilePopulation pop = run_kakutani(cs, config, hook);
  pop.log_offset += cs.dimension * t;  // fold in the inflation e^{dt}
  pop.is_patch = true;
  pop.patch_time = t;
  return pop;
}

std::vector<double> IntervalTiling::boundary_points() const {
  std::vector<double> pts(lengths.size() + 1, 0.0);
  for (std::size_t i = 0; i < lengths.size(); ++i) pts[i + 1] = pts[i] + lengths[i];
  return pts;
}

ExplicitRunResult run_explicit_1d(const CompiledSystem& cs, const SimulationConfig& config,
                                  const SpanHook& hook) {
  if (cs.dimension != 1)
    throw std::invalid_argument("run_explicit_1d: only defined in dimension 1");

  SplitMix64 rule_stream = derive_stream(config.seed, 0);
  SplitMix64 place_stream = derive_stream(config.seed, 1);

  // Interned exponent vectors shared by all tiles with equal volume history.
  std::vector<std::vector<std::uint32_t>> key_exps;
  std::map<std::vector<std::uint32_t>, std::uint32_t> key_ids;
  auto intern = [&](const std::vector<std::uint32_t>& e) -> std::uint32_t {
    auto [it, fresh] = key_ids.try_emplace(e, static_cast<std::uint32_t>(key_exps.size()));
    if (fresh) key_exps.push_back(e);
    return it->second;
  };

  struct Tile {
    std::uint32_t key;
    std::uint16_t type;
  };
  std::vector<Tile> tiles{
      {intern(std::vector<std::uint32_t>(cs.volumes.size(), 0)),
       static_cast<std::uint16_t>(config.start_type)}};

  auto on_plan = [&](const std::vector<GroupSplit>& plan) {
    struct GroupWork {
      std::vector<std::uint16_t> assignment;  // shuffled rule index per member
      std::size_t cursor = 0;
      // children resolved per rule: (key id, type)
      std::vector<std::vector<Tile>> rule_children;
    };
    std::unordered_map<std::uint64_t, GroupWork> work;
    work.reserve(plan.size());
    std::size_t extra = 0;
    for (const GroupSplit& g : plan) {
      GroupWork w;
      w.assignment.reserve(g.val.count);
      for (std::size_t r = 0; r < g.rule_counts.size(); ++r)
        w.assignment.insert(w.assignment.end(), g.rule_counts[r],
                            static_cast<std::uint16_t>(r));
      // Fisher-Yates on the placement stream; the rule draws themselves came
      // from the rule stream, so aggregate statistics are untouched.
      for (std::size_t i = w.assignment.size(); i > 1; --i)
        std::swap(w.assignment[i - 1], w.assignment[place_stream.next() % i]);
      w.rule_children.resize(g.rule_counts.size());
      for (std::size_t r = 0; r < g.rule_counts.size(); ++r) {
        for (const CompiledSystem::Child& ch : cs.rules[g.key.type][r].children) {
          std::vector<std::uint32_t> e = g.key.exponents;
          e[ch.vol_index] += 1;
          w.rule_children[r].push_back({intern(e), static_cast<std::uint16_t>(ch.type)});
        }
        if (g.rule_counts[r] > 0)
          extra += g.rule_counts[r] * (w.rule_children[r].size() - 1);
      }
      std::uint64_t id =
          (static_cast<std::uint64_t>(g.key.type) << 32) | intern(g.key.exponents);
      work.emplace(id, std::move(w));
    }

    std::vector<Tile> next;
    next.reserve(tiles.size() + extra);
    for (const Tile& t : tiles) {
      std::uint64_t id = (static_cast<std::uint64_t>(t.type) << 32) | t.key;
      auto it = work.find(id);
      if (it == work.end()) {
        next.push_back(t);
        continue;
      }
      GroupWork& w = it->second;
      std::uint16_t rule = w.assignment[w.cursor++];
      const std::vector<Tile>& children = w.rule_children[rule];
      next.insert(next.end(), children.begin(), children.end());
    }
    tiles.swap(next);
  };

  ExplicitRunResult result;
  result.population = run_loop(cs, config, hook, rule_stream, on_plan);

  result.tiling.types.reserve(tiles.size());
  result.tiling.lengths.reserve(tiles.size());
  for (const Tile& t : tiles) {
    result.tiling.types.push_back(t.type);
    result.tiling.lengths.push_back(
        std::exp(result.population.log_offset + key_log_volume(cs, key_exps[t.key])));
  }
  return result;
}

GenerationRun run_generation(const CompiledSystem& cs, int start_type, int generations,
                             std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("run_generation: need at least one trial");
  if (generations < 0) throw std::invalid_argument("run_generation: negative generations");

  GenerationRun out;
  out.trials = trials;
  const int gens = generations + 1;
  out.mean_counts.assign(gens, std::vector<double>(cs.n, 0.0));
  out.se_counts.assign(gens, std::vector<double>(cs.n, 0.0));
  out.mean_volumes.assign(gens, std::vector<double>(cs.n, 0.0));
  out.se_volumes.assign(gens, std::vector<double>(cs.n, 0.0));
  // Welford accumulators, flattened [generation][type].
  std::vector<double> m2c(static_cast<std::size_t>(gens) * cs.n, 0.0);
  std::vector<double> m2v(static_cast<std::size_t>(gens) * cs.n, 0.0);

  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rule_stream = derive_stream(derive_run_seed(seed, trial), 0);
    TilePopulation pop = make_start_population(cs, start_type, 1.0);
    for (int g = 0; g < gens; ++g) {
      std::vector<std::uint64_t> counts = pop.type_counts(cs.n);
      std::vector<double> vols = pop.type_volumes(cs.n);
      for (int r = 0; r < cs.n; ++r) {
        std::size_t idx = static_cast<std::size_t>(g) * cs.n + r;
        double dc = static_cast<double>(counts[r]) - out.mean_counts[g][r];
        out.mean_counts[g][r] += dc / (trial + 1);
        m2c[idx] += dc * (static_cast<double>(counts[r]) - out.mean_counts[g][r]);
        double dv = vols[r] - out.mean_volumes[g][r];
        out.mean_volumes[g][r] += dv / (trial + 1);
        m2v[idx] += dv * (vols[r] - out.mean_volumes[g][r]);
      }
      if (g + 1 < gens) {
        // every key substitutes, so the "max volume" group is everything
        std::vector<GroupSplit> plan;
        for (const auto& [key, val] : pop.entries) {
          GroupSplit gs{key, val, {}};
          if (cs.probs[key.type].size() == 1)
            gs.rule_counts = {val.count};
          else
            gs.rule_counts = multinomial(rule_stream, val.count, cs.probs[key.type]);
          plan.push_back(std::move(gs));
        }
        apply_plan(pop, cs, plan);
      }
    }
  }
  if (trials > 1) {
    for (int g = 0; g < gens; ++g)
      for (int r = 0; r < cs.n; ++r) {
        std::size_t idx = static_cast<std::size_t>(g) * cs.n + r;
        out.se_counts[g][r] = std::sqrt(m2c[idx] / (trials - 1) / trials);
        out.se_volumes[g][r] = std::sqrt(m2v[idx] / (trials - 1) / trials);
      }
  }
  return out;
}

}  // namespace multiscale

// kakutani: command-line front end. Subcommands cover validation and
// closed-form analysis of a substitution system, the splitting-sequence and
// semi-flow simulators, gap statistics, generation-wise substitution, the
// brute-force walk-sum oracle, and side-by-side comparison of simulation
// against the predictions.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "multiscale/formulas.hpp"
#include "multiscale/graph.hpp"
#include "multiscale/io.hpp"
#include "multiscale/rng.hpp"
#include "multiscale/simulator.hpp"
#include "multiscale/stats.hpp"
#include "multiscale/system.hpp"

namespace {

using namespace multiscale;
using nlohmann::json;

// Errors that should exit 2 (bad invocation) rather than 1 (failed work).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RandomSubstitutionSystem load_system(const std::string& path, double tolerance) {
  return parse_system(read_file(path), tolerance);
}

int resolve_type(const RandomSubstitutionSystem& sys, const std::string& name) {
  if (name.empty()) return 0;
  int idx = sys.type_index(name);
  if (idx < 0) throw UsageError("unknown prototile: " + name);
  return idx;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Comma-free so the labels sit safely inside unquoted CSV fields.
std::string bin_label(double lo, double hi) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.6g..%.6g]", lo, hi);
  return buf;
}

double min_child_volume(const RandomSubstitutionSystem& sys) {
  double mn = 1.0;
  for (const auto& rl : sys.rules)
    for (const RuleSpec& rule : rl)
      for (const SubstitutionTileSpec& t : rule.tiles) mn = std::min(mn, t.volume);
  return mn;
}

// Time of the last split the run actually performed. event_times records,
// after every step, the time of the NEXT upcoming event, so the final entry
// lies beyond the simulated range; averaging windows must end at the entry
// before it or they would extend into time no hook ever covered.
double last_event_time(const TilePopulation& pop) {
  const std::vector<double>& ev = pop.event_times;
  return ev.size() >= 2 ? ev[ev.size() - 2] : 0.0;
}

// ---------------------------------------------------------------- validate

struct ValidateOpts {
  std::string config, out = "-", format = "text";
  double tolerance = 1e-12;
};

int run_validate(const ValidateOpts& o) {
  RandomSubstitutionSystem sys;
  ValidationReport rep;
  std::vector<std::string> parse_errors;
  try {
    sys = load_system(o.config, o.tolerance);
    rep = validate(sys, o.tolerance);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    rep.normalized = false;
    rep.irreducible = false;
    rep.messages.push_back(e.what());
  }

  if (o.format == "json") {
    json j;
    j["normalized"] = rep.normalized;
    j["irreducible"] = rep.irreducible;
    j["incommensurability"] = to_string(rep.incommensurability);
    j["messages"] = rep.messages;
    j["valid"] = rep.ok();
    write_output(o.out, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "normalized: " << (rep.normalized ? "yes" : "no") << "\n"
        << "irreducible: " << (rep.irreducible ? "yes" : "no") << "\n"
        << "incommensurability: " << to_string(rep.incommensurability) << "\n";
    for (const std::string& m : rep.messages) out << "note: " << m << "\n";
    out << (rep.ok() ? "valid\n" : "invalid\n");
    write_output(o.out, out.str());
  }
  return rep.ok() ? 0 : 1;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOpts {
  std::string config, out = "-";
  double tolerance = 1e-12;
  bool predictions = false;
};

json graph_json(const MetricGraph& g) {
  PerronData p = perron_data(g);
  json j;
  j["lambda"] = p.lambda;
  j["spectral_radius_at_lambda"] = p.spectral_radius_at_lambda;
  j["left_eigenvector"] = p.left_eigenvector;
  j["right_eigenvector"] = p.right_eigenvector;
  j["Q"] = mat_to_json(p.Q);
  json edges = json::array();
  for (const GraphEdge& e : g.edges) {
    json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["length"] = e.length;
    je["weight"] = e.weight;
    edges.push_back(je);
  }
  j["edges"] = edges;
  return j;
}

int run_analyze(const AnalyzeOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  ValidationReport rep = validate(sys, o.tolerance);
  SystemMatrices m = system_matrices(sys);

  json j;
  j["name"] = sys.name;
  j["dimension"] = sys.dimension;
  j["prototiles"] = sys.prototile_names;
  j["validation"] = {{"normalized", rep.normalized},
                     {"irreducible", rep.irreducible},
                     {"incommensurability", to_string(rep.incommensurability)},
                     {"messages", rep.messages}};
  j["matrices"] = {{"S", mat_to_json(m.S)}, {"V", mat_to_json(m.V)}, {"H", mat_to_json(m.H)}};
  j["left_eigenvector"] = m.left_eigenvector;
  j["right_eigenvector"] = m.right_eigenvector;
  j["entropy_total"] = m.entropy_total;
  j["graph"] = {
      {"probability", graph_json(build_graph(sys, Weighting::probability))},
      {"probability_times_volume",
       graph_json(build_graph(sys, Weighting::probability_times_volume))}};

  if (o.predictions) {
    FrequencyPrediction fp = type_predictions(m);
    DensityEvaluator ev(sys, m);
    json per_type = json::array();
    for (int r = 0; r < m.n; ++r)
      per_type.push_back({{"type", sys.prototile_names[r]},
                          {"count_density_per_volume", fp.count_density[r]},
                          {"volume_fraction", fp.volume_fraction[r]},
                          {"count_fraction", fp.count_fraction[r]}});
    json pred;
    pred["per_type"] = per_type;
    pred["tiles_per_unit_volume"] = ev.count_total() / ev.entropy_total();
    pred["density_breakpoints"] = ev.breakpoints();
    // piecewise count density coefficients: count_density(r,x) = A/x^2 on
    // each segment between breakpoints (and up to 1)
    json coefs = json::array();
    std::vector<double> bp = ev.breakpoints();
    bp.push_back(1.0);
    for (int r = 0; r < m.n; ++r) {
      json seg = json::array();
      for (std::size_t s = 0; s + 1 < bp.size(); ++s)
        seg.push_back(ev.count_coefficient(r, 0.5 * (bp[s] + bp[s + 1])));
      coefs.push_back(seg);
    }
    pred["count_density_coefficients"] = coefs;
    if (sys.dimension == 1) {
      json gaps;
      gaps["mean_gap"] = ev.entropy_total() / ev.count_total();
      json curve = json::array();
      for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        double mid = 0.5 * (bp[s] + bp[s + 1]);
        curve.push_back(
            {{"x", mid},
             {"unit_mass", gap_density(ev, mid, GapNormalization::unit_mass)},
             {"per_unit_length", gap_density(ev, mid, GapNormalization::per_unit_length)}});
      }
      gaps["density"] = curve;
      pred["gap"] = gaps;
    }
    j["predictions"] = pred;
  }
  write_output(o.out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- simulate

struct RunOpts {
  std::string config, out = "-", mode = "aggregate", start_type;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-12;
  double steps = -1, tiles = -1, time = -1;
  double start_volume = 1.0;
};

StopRule stop_rule(const RunOpts& o) {
  int given = (o.steps >= 0) + (o.tiles >= 0) + (o.time >= 0);
  if (given != 1) throw UsageError("give exactly one of --steps, --tiles, --time");
  if (o.steps >= 0) return {StopRule::Kind::steps, o.steps};
  if (o.tiles >= 0) return {StopRule::Kind::tiles, o.tiles};
  return {StopRule::Kind::time, o.time};
}

void require_seed(const RandomSubstitutionSystem& sys, bool seed_given) {
  if (sys.is_random() && !seed_given)
    throw UsageError("--seed is required for a random system");
}

int run_simulate(const RunOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  require_seed(sys, o.seed_given);
  CompiledSystem cs = compile(sys);
  SimulationConfig config;
  config.seed = o.seed;
  config.stop = stop_rule(o);
  config.start_type = resolve_type(sys, o.start_type);
  config.start_volume = o.start_volume;

  TilePopulation pop;
  if (o.mode == "aggregate") {
    pop = run_kakutani(cs, config);
  } else {
    pop = run_explicit_1d(cs, config).population;
  }
  write_output(o.out, population_csv(pop, sys));
  return 0;
}

// ---------------------------------------------------------------- semiflow

struct SemiflowOpts {
  std::string config, out = "-", histogram, start_type;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-12;
  double time = -1, start_volume = 1.0;
  int bins = 50;
};

int run_semiflow(const SemiflowOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  require_seed(sys, o.seed_given);
  CompiledSystem cs = compile(sys);
  TilePopulation pop = semiflow_patch(cs, resolve_type(sys, o.start_type), o.start_volume,
                                      o.time, o.seed);
  write_output(o.out, population_csv(pop, sys));
  if (!o.histogram.empty()) {
    std::vector<double> edges = linear_edges(min_child_volume(sys), 1.0, o.bins);
    Histogram h = volume_histogram(pop, -1, edges, HistogramNorm::per_unit_volume);
    write_output(o.histogram, histogram_csv(h));
  }
  return 0;
}

// -------------------------------------------------------------------- gaps

struct GapsOpts {
  std::string config, out = "-", compare_out, pair_out, start_type;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-12;
  double tiles = -1, window = -1, start_volume = 1.0;
  int bins = 40, pair_bins = 50, pair_max_points = 20001;
};

int run_gaps(const GapsOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  require_seed(sys, o.seed_given);
  if (sys.dimension != 1) throw UsageError("gaps: system must be one-dimensional");
  if (o.tiles < 1) throw UsageError("gaps: --tiles is required");
  CompiledSystem cs = compile(sys);

  SimulationConfig config;
  config.seed = o.seed;
  config.stop = {StopRule::Kind::tiles, o.tiles};
  config.start_type = resolve_type(sys, o.start_type);
  config.start_volume = o.start_volume;

  // Pass 1 learns when the final split happened so the averaging window can
  // end exactly there; pass 2 repeats the identical run with the hook attached.
  ExplicitRunResult first = run_explicit_1d(cs, config);
  double t_last = last_event_time(first.population);
  double window = o.window > 0 ? o.window : -std::log(min_child_volume(sys));
  if (window > t_last + 1e-12)
    throw UsageError("gaps: window longer than the run; shrink --window or raise --tiles");

  double lo = min_child_volume(sys);
  std::vector<double> edges = linear_edges(lo, 1.0, o.bins);
  OccupancyAccumulator occ(edges, t_last - window, t_last, 1);
  ExplicitRunResult run = run_explicit_1d(
      cs, config,
      [&occ](const TilePopulation& pop, double t0, double t1) { occ.observe(pop, t0, t1); });

  // Snapshot view: inflate to the next event time, so the longest interval
  // has unit length exactly and the lengths land in the same (min volume, 1]
  // bins as the limiting distribution.
  IntervalTiling tiling = run.tiling;
  double inflate = std::exp(run.population.next_event_time());
  for (double& l : tiling.lengths) l *= inflate;
  write_output(o.out, histogram_csv(gap_histogram(tiling, edges)));

  if (!o.compare_out.empty()) {
    SystemMatrices m = system_matrices(sys);
    DensityEvaluator ev(sys, m);
    std::vector<std::string> labels;
    std::vector<double> emp_prob = occ.probability().normalized;
    std::vector<double> emp_puv = occ.per_unit_volume().normalized;
    std::vector<double> pred_prob, pred_puv;
    for (int b = 0; b < o.bins; ++b) {
      labels.push_back(bin_label(edges[b], edges[b + 1]));
      pred_prob.push_back(
          gap_mass_in_range(ev, edges[b], edges[b + 1], GapNormalization::unit_mass));
      pred_puv.push_back(
          gap_mass_in_range(ev, edges[b], edges[b + 1], GapNormalization::per_unit_length));
    }
    std::vector<ComparisonRow> rows =
        compare_curves("gap_probability_time_avg", labels, emp_prob, pred_prob);
    std::vector<ComparisonRow> per_length =
        compare_curves("gap_per_unit_volume_time_avg", labels, emp_puv, pred_puv);
    rows.insert(rows.end(), per_length.begin(), per_length.end());
    rows.push_back(make_comparison("gap_tiles_per_unit_volume", "",
                                   occ.total_per_unit_volume(),
                                   ev.count_total() / ev.entropy_total()));
    write_output(o.compare_out, comparison_csv(rows));
  }

  if (!o.pair_out.empty()) {
    IntervalTiling prefix = tiling;
    if (static_cast<int>(prefix.lengths.size()) + 1 > o.pair_max_points) {
      prefix.types.resize(o.pair_max_points - 1);
      prefix.lengths.resize(o.pair_max_points - 1);
    }
    double span = 0.0;
    for (double l : prefix.lengths) span += l;
    std::vector<double> redges = linear_edges(span / o.pair_bins / 4.0, span, o.pair_bins);
    write_output(o.pair_out, histogram_csv(pair_correlation(prefix, redges)));
  }
  return 0;
}

// -------------------------------------------------------------- generation

struct GenerationOpts {
  std::string config, out = "-", start_type;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-12;
  int generations = -1, trials = 64;
};

int run_generation_cmd(const GenerationOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  require_seed(sys, o.seed_given);
  if (o.generations < 0) throw UsageError("generation: --generations is required");
  int start = resolve_type(sys, o.start_type);
  CompiledSystem cs = compile(sys);
  GenerationRun run = run_generation(cs, start, o.generations, o.seed, o.trials);
  GenerationPrediction pred = generation_predictions(sys, start, o.generations);
  write_output(o.out, generation_csv(run, pred.expected_counts, pred.expected_volumes, sys));
  return 0;
}

// ------------------------------------------------------------------ oracle

struct OracleOpts {
  std::string config, out = "-", weighting = "probability", start_type;
  double tolerance = 1e-12;
  double time = -1, delta = -1, eta = -1;
  int edge = -1;
  std::uint64_t budget = 100000000ULL;
};

int run_oracle(const OracleOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  if (o.time < 0) throw UsageError("oracle: --time is required");
  Weighting w = o.weighting == "probability" ? Weighting::probability
                                             : Weighting::probability_times_volume;
  MetricGraph g = build_graph(sys, w);
  int start = resolve_type(sys, o.start_type);

  json j;
  j["time"] = o.time;
  j["start_type"] = sys.prototile_names[start];
  j["weighting"] = o.weighting;
  if (o.edge >= 0) {
    if (o.edge >= static_cast<int>(g.edges.size()))
      throw UsageError("oracle: --edge out of range");
    double delta = o.delta >= 0 ? o.delta : 0.0;
    double eta = o.eta >= 0 ? o.eta : g.edges[o.edge].length;
    j["edge"] = o.edge;
    j["delta"] = delta;
    j["eta"] = eta;
    j["walk_sum"] = brute_force_walk_sum(g, start, o.edge, delta, eta, o.time, o.budget);
  } else {
    json edges = json::array();
    double total = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      double s = brute_force_walk_sum(g, start, static_cast<int>(e), 0.0,
                                      g.edges[e].length, o.time, o.budget);
      total += s;
      edges.push_back({{"index", e},
                       {"src", g.edges[e].src},
                       {"dst", g.edges[e].dst},
                       {"length", g.edges[e].length},
                       {"weight", g.edges[e].weight},
                       {"walk_sum", s}});
    }
    j["edges"] = edges;
    j["total"] = total;
  }
  write_output(o.out, j.dump(2) + "\n");
  return 0;
}

// ----------------------------------------------------------------- compare

struct CompareOpts {
  std::string config, out = "-", statistic = "types", mode = "aggregate", start_type;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 1e-12;
  double steps = -1, tiles = -1, time = -1;
  double window = -1, start_volume = 1.0;
  int runs = 1, bins = 50;
};

// One run for the 'types'/'tiles-per-volume' statistics: snapshot fractions
// plus window time averages. For tile-count stops the window end (the final
// event) is found by a first pass and the identical run is repeated with
// the accumulator attached.
struct TypesRunResult {
  TypeStats snapshot;
  std::vector<double> cf_avg, vf_avg;
  double tiles_per_volume = 0.0;
};

TypesRunResult one_types_run(const CompiledSystem& cs, SimulationConfig config,
                             double window, const std::string& mode) {
  auto run = [&](const SpanHook& hook) {
    return mode == "aggregate" ? run_kakutani(cs, config, hook)
                               : run_explicit_1d(cs, config, hook).population;
  };
  double t_end;
  if (config.stop.kind == StopRule::Kind::time) {
    t_end = config.stop.value;
  } else {
    TilePopulation probe = run({});
    t_end = last_event_time(probe);
  }
  if (!(t_end - window >= -1e-12))
    throw UsageError("compare: window longer than the run; shrink --window");

  TypeFractionAccumulator acc(cs.n, t_end - window, t_end, cs.dimension);
  TilePopulation pop = run([&acc](const TilePopulation& p, double t0, double t1) {
    acc.observe(p, t0, t1);
  });

  TypesRunResult r;
  r.snapshot = empirical_type_stats(pop, cs.n);
  r.cf_avg = acc.mean_count_fraction();
  r.vf_avg = acc.mean_volume_fraction();
  r.tiles_per_volume = acc.mean_tiles_per_unit_volume();
  return r;
}

int run_compare(const CompareOpts& o) {
  RandomSubstitutionSystem sys = load_system(o.config, o.tolerance);
  CompiledSystem cs = compile(sys);
  SystemMatrices m = system_matrices(sys);
  FrequencyPrediction fp = type_predictions(m);
  DensityEvaluator ev(sys, m);

  RunOpts stop_opts;
  stop_opts.steps = o.steps;
  stop_opts.tiles = o.tiles;
  stop_opts.time = o.time;
  SimulationConfig config;
  config.stop = stop_rule(stop_opts);
  config.start_type = resolve_type(sys, o.start_type);
  config.start_volume = o.start_volume;

  std::vector<ComparisonRow> rows;

  if (o.statistic == "types" || o.statistic == "tiles-per-volume") {
    double window = o.window > 0 ? o.window : 2.0;
    // Per-type and scalar statistics across runs.
    std::vector<RunningStats> cf(cs.n), vf(cs.n), cfa(cs.n), vfa(cs.n);
    RunningStats tpv;
    for (int run = 0; run < o.runs; ++run) {
      config.seed = derive_run_seed(o.seed, run);
      TypesRunResult r = one_types_run(cs, config, window, o.mode);
      for (int t = 0; t < cs.n; ++t) {
        cf[t].add(r.snapshot.count_fraction[t]);
        vf[t].add(r.snapshot.volume_fraction[t]);
        cfa[t].add(r.cf_avg[t]);
        vfa[t].add(r.vf_avg[t]);
      }
      tpv.add(r.tiles_per_volume);
    }
    if (o.statistic == "types") {
      for (int t = 0; t < cs.n; ++t) {
        const std::string& name = sys.prototile_names[t];
        rows.push_back(make_comparison("count_fraction", name, cf[t].mean,
                                       fp.count_fraction[t], cf[t].stderror(), o.runs));
        rows.push_back(make_comparison("volume_fraction", name, vf[t].mean,
                                       fp.volume_fraction[t], vf[t].stderror(), o.runs));
        rows.push_back(make_comparison("count_fraction_time_avg", name, cfa[t].mean,
                                       fp.count_fraction[t], cfa[t].stderror(), o.runs));
        rows.push_back(make_comparison("volume_fraction_time_avg", name, vfa[t].mean,
                                       fp.volume_fraction[t], vfa[t].stderror(), o.runs));
      }
    }
    rows.push_back(make_comparison("tiles_per_unit_volume_time_avg", "", tpv.mean,
                                   ev.count_total() / ev.entropy_total(), tpv.stderror(),
                                   o.runs));
  } else if (o.statistic == "volume-histogram") {
    if (o.runs != 1) throw UsageError("compare: histogram statistics run with --runs 1");
    if (config.stop.kind != StopRule::Kind::time)
      throw UsageError("compare: volume-histogram needs a --time stop (semi-flow window)");
    double window = o.window > 0 ? o.window : 2.0;
    if (!(window <= config.stop.value))
      throw UsageError("compare: window longer than the run; shrink --window");
    double lo = min_child_volume(sys);
    std::vector<double> edges = linear_edges(lo, 1.0, o.bins);
    OccupancyAccumulator occ(edges, config.stop.value - window, config.stop.value,
                             cs.dimension);
    config.seed = o.seed;
    run_kakutani(cs, config, [&occ](const TilePopulation& p, double t0, double t1) {
      occ.observe(p, t0, t1);
    });
    std::vector<std::string> labels;
    std::vector<double> pred;
    for (int b = 0; b < o.bins; ++b) {
      labels.push_back(bin_label(edges[b], edges[b + 1]));
      pred.push_back(ev.total_count_in_range(edges[b], edges[b + 1]));
    }
    rows = compare_curves("volume_histogram_time_avg", labels,
                          occ.per_unit_volume().normalized, pred);
  } else if (o.statistic == "gap-histogram") {
    if (o.runs != 1) throw UsageError("compare: histogram statistics run with --runs 1");
    if (sys.dimension != 1) throw UsageError("compare: gap-histogram needs dimension 1");
    if (config.stop.kind != StopRule::Kind::tiles)
      throw UsageError("compare: gap-histogram needs a --tiles stop");
    config.seed = o.seed;
    ExplicitRunResult probe = run_explicit_1d(cs, config);
    double t_last = last_event_time(probe.population);
    double window = o.window > 0 ? o.window : -std::log(min_child_volume(sys));
    if (window > t_last + 1e-12)
      throw UsageError("compare: window longer than the run; raise --tiles");
    double lo = min_child_volume(sys);
    std::vector<double> edges = linear_edges(lo, 1.0, o.bins);
    OccupancyAccumulator occ(edges, t_last - window, t_last, 1);
    run_explicit_1d(cs, config, [&occ](const TilePopulation& p, double t0, double t1) {
      occ.observe(p, t0, t1);
    });
    std::vector<std::string> labels;
    std::vector<double> pred;
    for (int b = 0; b < o.bins; ++b) {
      labels.push_back(bin_label(edges[b], edges[b + 1]));
      pred.push_back(
          gap_mass_in_range(ev, edges[b], edges[b + 1], GapNormalization::unit_mass));
    }
    rows = compare_curves("gap_probability_time_avg", labels, occ.probability().normalized,
                          pred);
  } else {
    throw UsageError("compare: unknown --statistic " + o.statistic);
  }

  write_output(o.out, comparison_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random multiscale substitution systems: closed-form tile statistics "
               "and their Monte-Carlo verification"};
  app.require_subcommand(1);

  ValidateOpts vo;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a system config and report its properties");
  validate_cmd->add_option("--config", vo.config, "system JSON config")->required();
  validate_cmd->add_option("--out", vo.out, "output path (default stdout)");
  validate_cmd->add_option("--format", vo.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  validate_cmd->add_option("--tolerance", vo.tolerance, "normalization tolerance");

  AnalyzeOpts ao;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "matrices, graph data, and closed-form predictions (JSON)");
  analyze_cmd->add_option("--config", ao.config, "system JSON config")->required();
  analyze_cmd->add_option("--out", ao.out, "output path (default stdout)");
  analyze_cmd->add_option("--tolerance", ao.tolerance, "normalization tolerance");
  analyze_cmd->add_flag("--predictions", ao.predictions,
                        "include type frequencies, densities, and gap statistics");

  RunOpts so;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "run a splitting sequence, write the population CSV");
  simulate_cmd->add_option("--config", so.config, "system JSON config")->required();
  simulate_cmd->add_option("--out", so.out, "output path (default stdout)");
  simulate_cmd->add_option("--seed", so.seed, "RNG seed (required for random systems)");
  simulate_cmd->add_option("--tolerance", so.tolerance, "normalization tolerance");
  simulate_cmd->add_option("--mode", so.mode, "aggregate or explicit")
      ->check(CLI::IsMember({"aggregate", "explicit"}));
  simulate_cmd->add_option("--steps", so.steps, "stop after this many substitution events");
  simulate_cmd->add_option("--tiles", so.tiles, "stop at this many tiles");
  simulate_cmd->add_option("--time", so.time, "stop at this flow time");
  simulate_cmd->add_option("--start-type", so.start_type, "start prototile (default first)");
  simulate_cmd->add_option("--start-volume", so.start_volume, "start tile volume in (0,1]");

  SemiflowOpts fo;
  CLI::App* semiflow_cmd =
      app.add_subcommand("semiflow", "grow the semi-flow patch at a given time");
  semiflow_cmd->add_option("--config", fo.config, "system JSON config")->required();
  semiflow_cmd->add_option("--out", fo.out, "population CSV path (default stdout)");
  semiflow_cmd->add_option("--seed", fo.seed, "RNG seed (required for random systems)");
  semiflow_cmd->add_option("--tolerance", fo.tolerance, "normalization tolerance");
  semiflow_cmd->add_option("--time", fo.time, "flow time t")->required();
  semiflow_cmd->add_option("--start-type", fo.start_type, "start prototile (default first)");
  semiflow_cmd->add_option("--start-volume", fo.start_volume, "start tile volume in (0,1]");
  semiflow_cmd->add_option("--histogram", fo.histogram,
                           "also write a per-unit-volume snapshot histogram here");
  semiflow_cmd->add_option("--bins", fo.bins, "histogram bin count");

  GapsOpts go;
  CLI::App* gaps_cmd = app.add_subcommand(
      "gaps", "explicit 1d run: gap histogram and time-averaged gap statistics");
  gaps_cmd->add_option("--config", go.config, "system JSON config")->required();
  gaps_cmd->add_option("--out", go.out, "gap histogram CSV path (default stdout)");
  gaps_cmd->add_option("--seed", go.seed, "RNG seed (required for random systems)");
  gaps_cmd->add_option("--tolerance", go.tolerance, "normalization tolerance");
  gaps_cmd->add_option("--tiles", go.tiles, "stop at this many intervals")->required();
  gaps_cmd->add_option("--bins", go.bins, "histogram bin count");
  gaps_cmd->add_option("--window", go.window,
                       "averaging window length (default: longest edge length)");
  gaps_cmd->add_option("--start-type", go.start_type, "start prototile (default first)");
  gaps_cmd->add_option("--start-volume", go.start_volume, "start tile volume in (0,1]");
  gaps_cmd->add_option("--compare", go.compare_out,
                       "write a comparison CSV against the gap predictions here");
  gaps_cmd->add_option("--pair-out", go.pair_out, "write a pair-correlation histogram here");
  gaps_cmd->add_option("--pair-bins", go.pair_bins, "pair-correlation bins");
  gaps_cmd->add_option("--pair-max-points", go.pair_max_points,
                       "cap on boundary points used for pair correlation");

  GenerationOpts geno;
  CLI::App* generation_cmd = app.add_subcommand(
      "generation", "generation-wise substitution vs matrix-power predictions");
  generation_cmd->add_option("--config", geno.config, "system JSON config")->required();
  generation_cmd->add_option("--out", geno.out, "output path (default stdout)");
  generation_cmd->add_option("--seed", geno.seed, "RNG seed (required for random systems)");
  generation_cmd->add_option("--tolerance", geno.tolerance, "normalization tolerance");
  generation_cmd->add_option("--generations", geno.generations, "number of generations")
      ->required();
  generation_cmd->add_option("--trials", geno.trials, "Monte-Carlo trials (default 64)");
  generation_cmd->add_option("--start-type", geno.start_type,
                             "start prototile (default first)");

  OracleOpts oo;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force walk sums on the metric graph (JSON)");
  oracle_cmd->add_option("--config", oo.config, "system JSON config")->required();
  oracle_cmd->add_option("--out", oo.out, "output path (default stdout)");
  oracle_cmd->add_option("--tolerance", oo.tolerance, "normalization tolerance");
  oracle_cmd->add_option("--time", oo.time, "walk time t")->required();
  oracle_cmd->add_option("--weighting", oo.weighting,
                         "probability or probability-times-volume")
      ->check(CLI::IsMember({"probability", "probability-times-volume"}));
  oracle_cmd->add_option("--start-type", oo.start_type, "start vertex (default first)");
  oracle_cmd->add_option("--edge", oo.edge, "restrict to one target edge index");
  oracle_cmd->add_option("--delta", oo.delta, "interval lower offset (with --edge)");
  oracle_cmd->add_option("--eta", oo.eta, "interval upper offset (with --edge)");
  oracle_cmd->add_option("--budget", oo.budget, "node visit budget");

  CompareOpts co;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "simulate and compare empirical statistics against predictions");
  compare_cmd->add_option("--config", co.config, "system JSON config")->required();
  compare_cmd->add_option("--out", co.out, "comparison CSV path (default stdout)");
  compare_cmd->add_option("--seed", co.seed, "base RNG seed");
  compare_cmd->add_option("--tolerance", co.tolerance, "normalization tolerance");
  compare_cmd->add_option("--statistic", co.statistic,
                          "types, tiles-per-volume, volume-histogram, or gap-histogram")
      ->check(CLI::IsMember(
          {"types", "tiles-per-volume", "volume-histogram", "gap-histogram"}));
  compare_cmd->add_option("--mode", co.mode, "aggregate or explicit")
      ->check(CLI::IsMember({"aggregate", "explicit"}));
  compare_cmd->add_option("--runs", co.runs, "independent runs (types statistics)");
  compare_cmd->add_option("--steps", co.steps, "stop after this many substitution events");
  compare_cmd->add_option("--tiles", co.tiles, "stop at this many tiles");
  compare_cmd->add_option("--time", co.time, "stop at this flow time");
  compare_cmd->add_option("--bins", co.bins, "histogram bin count");
  compare_cmd->add_option("--window", co.window, "time-averaging window length");
  compare_cmd->add_option("--start-type", co.start_type, "start prototile (default first)");
  compare_cmd->add_option("--start-volume", co.start_volume, "start tile volume in (0,1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  so.seed_given = simulate_cmd->count("--seed") > 0;
  fo.seed_given = semiflow_cmd->count("--seed") > 0;
  go.seed_given = gaps_cmd->count("--seed") > 0;
  geno.seed_given = generation_cmd->count("--seed") > 0;
  co.seed_given = compare_cmd->count("--seed") > 0;

  try {
    if (*validate_cmd) return run_validate(vo);
    if (*analyze_cmd) return run_analyze(ao);
    if (*simulate_cmd) return run_simulate(so);
    if (*semiflow_cmd) return run_semiflow(fo);
    if (*gaps_cmd) return run_gaps(go);
    if (*generation_cmd) return run_generation_cmd(geno);
    if (*oracle_cmd) return run_oracle(oo);
    if (*compare_cmd) return run_compare(co);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

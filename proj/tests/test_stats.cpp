#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "multiscale/io.hpp"
#include "multiscale/stats.hpp"

using namespace multiscale;

TEST_CASE("linear edges and right-closed binning") {
  std::vector<double> edges = linear_edges(0.0, 1.0, 4);
  REQUIRE(edges.size() == 5);
  CHECK(edges[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(edges.back() == 1.0);  // exact upper edge

  std::vector<double> e2 = {0.0, 1.0, 2.0};
  CHECK(bin_index(e2, -1.0) == -1);
  CHECK(bin_index(e2, 0.0) == -1);  // bins are (lo, hi]
  CHECK(bin_index(e2, 0.5) == 0);
  CHECK(bin_index(e2, 1.0) == 0);  // exact inner edge goes to the lower bin
  CHECK(bin_index(e2, 1.5) == 1);
  CHECK(bin_index(e2, 2.0) == 1);
  CHECK(bin_index(e2, 2.5) == -1);

  CHECK_THROWS_AS(linear_edges(1.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(linear_edges(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("empirical type stats of a small population") {
  CompiledSystem cs = compile(load_example("sys-b.json"));
  SimulationConfig config;
  config.stop = {StopRule::Kind::steps, 1.0};
  TilePopulation pop = run_kakutani(cs, config);
  TypeStats ts = empirical_type_stats(pop, 2);
  CHECK(ts.count_fraction[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ts.count_fraction[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ts.volume_fraction[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ts.volume_fraction[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("volume histograms of a semi-flow patch") {
  CompiledSystem cs = compile(load_example("sys-a.json"));
  TilePopulation patch = semiflow_patch(cs, 0, 1.0, 1.0, 0);
  // volumes: {0.3e, 0.21e, 0.343e, 0.147e} = {.8155, .5708, .9325, .3996}
  std::vector<double> edges = {0.5, 0.75, 1.0};
  Histogram raw = volume_histogram(patch, -1, edges, HistogramNorm::raw);
  CHECK(raw.counts[0] == 1.0);
  CHECK(raw.counts[1] == 2.0);
  Histogram prob = volume_histogram(patch, 0, edges, HistogramNorm::probability);
  CHECK(prob.normalized[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(prob.normalized[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // per unit volume divides by the inflated region volume e^t
  Histogram puv = volume_histogram(patch, -1, edges, HistogramNorm::per_unit_volume);
  CHECK(puv.normalized[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(puv.normalized[1] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-13));

  // a type filter that matches nothing yields zeros
  Histogram none = volume_histogram(patch, 5, edges, HistogramNorm::raw);
  CHECK(none.counts[0] == 0.0);
}

TEST_CASE("per-unit-volume needs a patch") {
  CompiledSystem cs = compile(load_example("sys-a.json"));
  SimulationConfig config;
  config.stop = {StopRule::Kind::steps, 3.0};
  TilePopulation pop = run_kakutani(cs, config);
  std::vector<double> edges = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(volume_histogram(pop, -1, edges, HistogramNorm::per_unit_volume),
                  std::invalid_argument);
  CHECK_NOTHROW(volume_histogram(pop, -1, edges, HistogramNorm::probability));
}

TEST_CASE("gap histogram of a short tiling") {
  IntervalTiling tiling;
  tiling.types = {0, 0, 0};
  tiling.lengths = {0.3, 0.21, 0.49};
  std::vector<double> edges = {0.2, 0.3, 0.5};
  Histogram h = gap_histogram(tiling, edges);
  CHECK(h.counts[0] == 2.0);  // 0.3 sits exactly on the inner edge: lower bin
  CHECK(h.counts[1] == 1.0);
  CHECK(h.normalized[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(h.normalized[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gap histogram equals the volume histogram of the same run") {
  CompiledSystem cs = compile(load_example("sys-c.json"));
  SimulationConfig config;
  config.seed = 9;
  config.stop = {StopRule::Kind::tiles, 5000.0};
  ExplicitRunResult run = run_explicit_1d(cs, config);
  double mn = 1.0, mx = 0.0;
  for (double l : run.tiling.lengths) {
    mn = std::min(mn, l);
    mx = std::max(mx, l);
  }
  std::vector<double> edges = linear_edges(mn * 0.99, mx, 13);
  Histogram gaps = gap_histogram(run.tiling, edges);
  Histogram vols = volume_histogram(run.population, -1, edges, HistogramNorm::probability);
  for (int b = 0; b < 13; ++b) {
    CHECK(gaps.counts[b] == vols.counts[b]);
    CHECK(gaps.normalized[b] == vols.normalized[b]);
  }
}

TEST_CASE("pair correlation against the uniform baseline") {
  IntervalTiling tiling;
  tiling.types = {0, 0};
  tiling.lengths = {0.3, 0.7};
  // boundary points {0, 0.3, 1}: distances {0.3, 0.7, 1.0}
  std::vector<double> edges = {0.25, 0.5, 0.75, 1.0};
  Histogram h = pair_correlation(tiling, edges);
  CHECK(h.counts[0] == 1.0);
  CHECK(h.counts[1] == 1.0);
  CHECK(h.counts[2] == 1.0);
  // 3 pairs over length 1, bin width 0.25: baseline 1.5 pairs per bin
  for (int b = 0; b < 3; ++b)
    CHECK(h.normalized[b] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(pair_correlation(tiling, edges, 2), std::runtime_error);
}

TEST_CASE("occupancy accumulator integrates a single tile exactly") {
  CompiledSystem cs = compile(load_example("sys-a.json"));
  // one tile of volume 1/2; its inflated volume crosses 0.75 at log(1.5)
  // and 1.0 at log 2
  TilePopulation pop = make_start_population(cs, 0, 0.5);
  std::vector<double> edges = {0.5, 0.75, 1.0};
  OccupancyAccumulator occ(edges, 0.0, std::log(2.0), 1);
  occ.observe(pop, 0.0, std::log(2.0));

  // exact integrals of e^{-t} / start_volume over the crossing intervals
  Histogram puv = occ.per_unit_volume();
  double w = std::log(2.0);
  CHECK(puv.normalized[0] == doctest::Approx((2.0 / 3.0) / w).epsilon(1e-12));
  CHECK(puv.normalized[1] == doctest::Approx((1.0 / 3.0) / w).epsilon(1e-12));
  CHECK(occ.total_per_unit_volume() == doctest::Approx(1.0 / w).epsilon(1e-12));

  Histogram prob = occ.probability();
  CHECK(prob.normalized[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(prob.normalized[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // spans outside the window contribute nothing
  OccupancyAccumulator clipped(edges, 0.0, 0.1, 1);
  clipped.observe(pop, 0.2, 0.5);
  CHECK(clipped.total_per_unit_volume() == 0.0);

  CHECK_THROWS_AS(OccupancyAccumulator(edges, 1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("occupancy respects the type filter") {
  CompiledSystem cs = compile(load_example("sys-b.json"));
  SimulationConfig config;
  config.stop = {StopRule::Kind::steps, 1.0};
  TilePopulation pop = run_kakutani(cs, config);  // {red 0.3, blue 0.7}
  std::vector<double> edges = linear_edges(0.05, 1.0, 19);
  OccupancyAccumulator all(edges, 0.0, 0.2, 1);
  OccupancyAccumulator red(edges, 0.0, 0.2, 1, 0);
  OccupancyAccumulator blue(edges, 0.0, 0.2, 1, 1);
  all.observe(pop, 0.0, 0.2);
  red.observe(pop, 0.0, 0.2);
  blue.observe(pop, 0.0, 0.2);
  CHECK(all.total_per_unit_volume() ==
        doctest::Approx(red.total_per_unit_volume() + blue.total_per_unit_volume())
            .epsilon(1e-13));
  CHECK(red.total_per_unit_volume() > 0.0);
  CHECK(blue.total_per_unit_volume() > 0.0);
}

TEST_CASE("type fraction accumulator averages a constant span exactly") {
  CompiledSystem cs = compile(load_example("sys-b.json"));
  SimulationConfig config;
  config.stop = {StopRule::Kind::steps, 1.0};
  TilePopulation pop = run_kakutani(cs, config);  // {red 0.3, blue 0.7}
  TypeFractionAccumulator acc(2, 0.0, 1.0, 1);
  acc.observe(pop, 0.0, 1.0);
  CHECK(acc.mean_count_fraction()[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(acc.mean_volume_fraction()[1] == doctest::Approx(0.7).epsilon(1e-12));
  // integral of 2 e^{-t} over [0,1]
  CHECK(acc.mean_tiles_per_unit_volume() ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("running stats: welford moments and merging") {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0}) s.add(x);
  CHECK(s.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.variance() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.stderror() == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));

  RunningStats a, b, whole;
  for (double x : {1.0, 2.0, 3.0}) a.add(x);
  for (double x : {4.0, 5.0, 6.0}) b.add(x);
  for (double x : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) whole.add(x);
  a.merge(b);
  CHECK(a.n == 6);
  CHECK(a.mean == doctest::Approx(whole.mean).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(whole.variance()).epsilon(1e-13));

  RunningStats empty;
  empty.merge(whole);
  CHECK(empty.mean == doctest::Approx(whole.mean).epsilon(1e-14));
  CHECK(RunningStats{}.stderror() == 0.0);
}

TEST_CASE("comparison rows and sup-distance summaries") {
  ComparisonRow r = make_comparison("stat", "x", 1.05, 1.0, 0.01, 10);
  CHECK(r.abs_err == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.rel_err == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(make_comparison("s", "", 0.5, 0.0).rel_err == 0.0);

  std::vector<ComparisonRow> rows = compare_curves(
      "curve", {"a", "b"}, {1.0, 2.0}, {1.1, 2.3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].statistic == "curve_sup_distance");
  CHECK(rows[2].empirical == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rows[2].predicted == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(rows[2].rel_err == doctest::Approx(0.3 / 2.3).epsilon(1e-12));
  CHECK_THROWS_AS(compare_curves("c", {"a"}, {1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("csv formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, 6.5480991220871045, 1e-300, 0.0}) {
    std::string s = fmt_double(x);
    CHECK(std::stod(s) == x);
  }
  RandomSubstitutionSystem sys = load_example("sys-b.json");
  CompiledSystem cs = compile(sys);
  SimulationConfig config;
  config.stop = {StopRule::Kind::steps, 2.0};
  TilePopulation pop = run_kakutani(cs, config);
  std::string csv = population_csv(pop, sys);
  CHECK(csv.rfind("type,volume,log_volume,count\n", 0) == 0);
  // one line per entry plus the header
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == pop.entries.size() + 1);
}

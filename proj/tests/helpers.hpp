#pragma once
// Shared test helpers: loading the bundled example systems and flattening
// aggregated populations into plain (volume, count) lists for comparison.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "multiscale/simulator.hpp"
#include "multiscale/system.hpp"

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline multiscale::RandomSubstitutionSystem load_example(const std::string& name) {
  return multiscale::parse_system(read_text(std::string(TEST_SYSTEMS_DIR) + "/" + name));
}

// Physical tile volumes with multiplicity, ascending.
inline std::vector<std::pair<double, std::uint64_t>> flatten(
    const multiscale::TilePopulation& pop) {
  std::vector<std::pair<double, std::uint64_t>> out;
  for (const auto& [key, val] : pop.entries)
    out.emplace_back(std::exp(pop.log_offset + val.log_volume), val.count);
  std::sort(out.begin(), out.end());
  return out;
}

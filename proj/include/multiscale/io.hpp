#pragma once
// Output formatting. All floating-point values are printed with %.17g so
// equal doubles print identically and re-runs with equal seeds produce
// byte-identical files.

#include <string>
#include <vector>

#include "multiscale/simulator.hpp"
#include "multiscale/stats.hpp"
#include "multiscale/system.hpp"

namespace multiscale {

std::string fmt_double(double v);

// Columns: type,volume,log_volume,count — one row per aggregated tile
// class, in canonical key order. Volumes are physical.
std::string population_csv(const TilePopulation& pop, const RandomSubstitutionSystem& sys);

// Columns: bin_lo,bin_hi,count,normalized.
std::string histogram_csv(const Histogram& h);

// Columns: statistic,type,empirical,predicted,abs_err,rel_err,stderr,n.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

// Columns: generation,type,mean_count,se_count,mean_volume,se_volume,
// predicted_count,predicted_volume.
std::string generation_csv(const GenerationRun& run,
                           const std::vector<std::vector<double>>& predicted_counts,
                           const std::vector<std::vector<double>>& predicted_volumes,
                           const RandomSubstitutionSystem& sys);

// Write text to a path, or to stdout when path is "-" or empty.
void write_output(const std::string& path, const std::string& text);

}  // namespace multiscale

#include "multiscale/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace multiscale {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string population_csv(const TilePopulation& pop, const RandomSubstitutionSystem& sys) {
  std::ostringstream out;
  out << "type,volume,log_volume,count\n";
  for (const auto& [key, val] : pop.entries) {
    double lv = pop.log_offset + val.log_volume;
    out << sys.prototile_names.at(key.type) << ',' << fmt_double(std::exp(lv)) << ','
        << fmt_double(lv) << ',' << val.count << '\n';
  }
  return out.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count,normalized\n";
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
    out << fmt_double(h.edges[b]) << ',' << fmt_double(h.edges[b + 1]) << ','
        << fmt_double(h.counts[b]) << ',' << fmt_double(h.normalized[b]) << '\n';
  return out.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "statistic,type,empirical,predicted,abs_err,rel_err,stderr,n\n";
  for (const ComparisonRow& r : rows)
    out << r.statistic << ',' << r.type << ',' << fmt_double(r.empirical) << ','
        << fmt_double(r.predicted) << ',' << fmt_double(r.abs_err) << ','
        << fmt_double(r.rel_err) << ',' << fmt_double(r.stderror) << ',' << r.n << '\n';
  return out.str();
}

std::string generation_csv(const GenerationRun& run,
                           const std::vector<std::vector<double>>& predicted_counts,
                           const std::vector<std::vector<double>>& predicted_volumes,
                           const RandomSubstitutionSystem& sys) {
  std::ostringstream out;
  out << "generation,type,mean_count,se_count,mean_volume,se_volume,"
         "predicted_count,predicted_volume\n";
  for (std::size_t g = 0; g < run.mean_counts.size(); ++g)
    for (std::size_t r = 0; r < run.mean_counts[g].size(); ++r)
      out << g << ',' << sys.prototile_names.at(r) << ','
          << fmt_double(run.mean_counts[g][r]) << ',' << fmt_double(run.se_counts[g][r])
          << ',' << fmt_double(run.mean_volumes[g][r]) << ','
          << fmt_double(run.se_volumes[g][r]) << ',' << fmt_double(predicted_counts[g][r])
          << ',' << fmt_double(predicted_volumes[g][r]) << '\n';
  return out.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace multiscale

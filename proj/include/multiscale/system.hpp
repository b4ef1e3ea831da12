#pragma once
// System model: prototiles, substitution rules with probabilities, and the
// JSON config format. Parsing is strict — a config that is not normalized
// (rule volumes summing to 1, probabilities summing to 1) is rejected with
// the offending sum in the message rather than silently renormalized.

#include <optional>
#include <string>
#include <vector>

namespace multiscale {

struct SubstitutionTileSpec {
  int type = 0;                 // index into prototile_names
  double volume = 0.0;          // in (0,1)
  std::optional<double> scale;  // linear scale when given in the config
};

struct RuleSpec {
  double probability = 1.0;
  std::vector<SubstitutionTileSpec> tiles;
};

struct RandomSubstitutionSystem {
  std::string name;
  int dimension = 1;
  std::vector<std::string> prototile_names;
  std::vector<std::vector<RuleSpec>> rules;  // one nonempty rule list per prototile

  int type_count() const { return static_cast<int>(prototile_names.size()); }
  // A system is random when some prototile has more than one rule.
  bool is_random() const;
  int type_index(const std::string& name) const;  // -1 when absent
};

enum class Commensurability { likely_incommensurable, commensurable, unknown };

const char* to_string(Commensurability c);

struct ValidationReport {
  bool normalized = false;
  bool irreducible = false;
  Commensurability incommensurability = Commensurability::unknown;
  std::vector<std::string> messages;

  bool ok() const { return normalized && irreducible; }
};

// Parse a JSON config. Throws std::invalid_argument naming the offending
// prototile/rule and the bad sum or field. `tolerance` bounds how far the
// probability and volume sums may sit from 1.
RandomSubstitutionSystem parse_system(const std::string& config_text,
                                      double tolerance = 1e-12);

// Inverse of parse_system; parse(serialize(s)) reproduces s field for field.
std::string serialize_system(const RandomSubstitutionSystem& sys);

// Re-check normalization (for programmatically built systems), strong
// connectivity of the type graph, and the commensurability classification
// of the associated metric graph's cycle lengths.
ValidationReport validate(const RandomSubstitutionSystem& sys, double tolerance = 1e-12);

}  // namespace multiscale

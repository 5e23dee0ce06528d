#pragma once

// Run configuration: presets, JSON config files and key=value overrides.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinlink/monte_carlo.hpp"
#include "spinlink/parameters.hpp"
#include "spinlink/sweep.hpp"

namespace spinlink {

enum class TableFormat { Csv, Json };

/// Which sweep the "sweep" command runs. "custom" uses the axes and quantity given
/// in the config; the other kinds start from their default grids.
struct SweepConfig {
  std::string kind = "pdr";  // pdr | cooperativity | coupling | rate-vs-loss | custom
  std::string quantity = "fidelity";
  std::vector<Axis> axes;    // empty: the kind's default grid
  bool monte_carlo = false;  // rate-vs-loss only

  void validate() const;
};

struct RunConfig {
  std::string preset = "paper-design";
  std::string command = "fidelity";
  ModelParameters params;
  McConfig mc;
  std::vector<double> fidelity_constraints = kDefaultConstraints;
  SweepConfig sweep;
  std::string out;  // empty: standard output
  TableFormat format = TableFormat::Csv;

  /// Every setting after preset expansion and overrides, in the same flat schema
  /// that load_config accepts. Excludes "out".
  nlohmann::json resolved() const;
  /// FNV-1a 64 of resolved().dump(), as 16 hex digits.
  std::string hash() const;
  /// Sweep spec for kind "custom" (and the defaults of the other kinds).
  SweepSpec sweep_spec() const;

  void validate() const;
};

const std::vector<std::string>& preset_names();
/// Throws ValidationError for an unknown name.
ModelParameters preset_parameters(const std::string& name);

/// Reads `path` (empty path or empty file: no settings), applies `overrides`
/// ("key=value", dotted keys address nested fields such as sweep.kind) and
/// expands the preset. `preset` wins over a preset named in the file.
/// Parse errors report line and column; unknown keys are rejected.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      const std::string& preset = {});

/// Same, from an already-parsed JSON object.
RunConfig config_from_json(nlohmann::json doc, const std::vector<std::string>& overrides = {},
                           const std::string& preset = {});

std::string format_name(TableFormat f);
TableFormat parse_format(const std::string& name);

}  // namespace spinlink

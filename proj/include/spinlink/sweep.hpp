#pragma once

// Grid evaluation of fidelity and rate over named model parameters. Cells are
// evaluated in parallel and stored by cell index.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinlink/monte_carlo.hpp"
#include "spinlink/parameters.hpp"

namespace spinlink {

enum class Spacing {
  Linear,
  Log,
  /// Coordinates are linear in dB of loss; the parameter receives 10^(-x/10).
  Db,
};

enum class Quantity { Fidelity, Rate, NMax, Regime, Bound };

struct Axis {
  std::string parameter;
  double min = 0.0;
  double max = 1.0;
  std::int64_t points = 2;
  Spacing spacing = Spacing::Linear;

  /// Grid coordinates (what is written to the table).
  std::vector<double> coordinates() const;
  /// Value assigned to the parameter for a coordinate.
  double applied_value(double coordinate) const;
  void validate() const;
};

struct SweepSpec {
  std::vector<Axis> axes;  // one or two
  std::map<std::string, double> overrides;
  Quantity quantity = Quantity::Fidelity;
  double f_target = 0.99;  // Rate / NMax / Regime quantities
  std::optional<McConfig> monte_carlo;
  unsigned threads = 0;

  void validate() const;
};

enum class CellStatus { Ok, Infeasible, Invalid, Numerical };

struct SweepResult {
  std::vector<Axis> axes;
  std::vector<std::vector<double>> grids;  // coordinates per axis
  std::vector<std::string> columns;
  /// values[column][cell]; cell = i0 * n1 + i1 for two axes
  std::vector<std::vector<double>> values;
  std::vector<CellStatus> status;
  std::vector<std::string> notes;  // empty unless the cell failed
  ModelParameters base;
  SweepSpec spec;

  std::size_t cell_count() const { return status.size(); }
  /// Per-axis indices of a cell.
  std::vector<std::size_t> cell_indices(std::size_t cell) const;
  const std::vector<double>& column(const std::string& name) const;
};

struct ArgMax {
  std::size_t cell = 0;
  std::vector<double> coordinates;
  double value = 0.0;
};

/// Largest value among Ok cells; ties keep the first cell.
ArgMax argmax(const SweepResult& result, const std::string& column);

std::string quantity_name(Quantity q);
Quantity parse_quantity(const std::string& name);
std::string spacing_name(Spacing s);
Spacing parse_spacing(const std::string& name);
std::string status_name(CellStatus s);

/// Column names produced for a quantity (MC columns appended for Rate when enabled).
std::vector<std::string> quantity_columns(Quantity q, bool with_monte_carlo);

SweepResult run_sweep(const ModelParameters& base, const SweepSpec& spec);

/// T_V x R_H fidelity map. Defaults: 101 x 101 over [0.5, 1] x [0, 0.6].
SweepSpec pdr_fidelity_spec(std::int64_t points_tv = 101, std::int64_t points_rh = 101);
SweepResult sweep_fidelity_pdr(const ModelParameters& base, const SweepSpec& spec = pdr_fidelity_spec());

/// Fidelity versus cooperativity (log, [0.5, 20], 101 points) or coupling ratio
/// (linear, [0.05, 1], 96 points).
SweepSpec cooperativity_fidelity_spec(std::int64_t points = 101);
SweepSpec coupling_fidelity_spec(std::int64_t points = 96);
SweepResult sweep_fidelity_cavity(const ModelParameters& base, const SweepSpec& spec);

/// Loss axis in dB, [0, 60] at 0.5 dB steps by default.
Axis default_loss_axis();
inline const std::vector<double> kDefaultConstraints{0.95, 0.97, 0.98, 0.99};

/// One result per fidelity constraint with rate, N_max, regime, bound and (when
/// mc is given) Monte Carlo columns. MC seeds derive from mc->seed and the cell.
std::vector<SweepResult> sweep_rate_vs_loss(const ModelParameters& base, const Axis& loss_axis,
                                            const std::vector<double>& constraints,
                                            const std::optional<McConfig>& mc,
                                            unsigned threads = 0);

}  // namespace spinlink

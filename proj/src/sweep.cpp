#include "spinlink/sweep.hpp"

#include <cmath>
#include <limits>

#include "spinlink/errors.hpp"
#include "spinlink/parallel.hpp"

namespace spinlink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

struct CellOutcome {
  std::vector<double> values;
  CellStatus status = CellStatus::Ok;
  std::string note;
};

std::vector<double> rate_columns(const RateResult& r, const ProtocolTiming& timing, double eta_link) {
  const double n = r.limit.unbounded ? kInf : static_cast<double>(r.limit.n);
  return {r.rate,
          n,
          static_cast<double>(static_cast<int>(r.regime)),
          repeaterless_bound(eta_link, timing),
          r.p_error,
          r.p_success,
          r.f0,
          r.probs.p_det,
          r.probs.p_e};
}

CellOutcome evaluate_cell(const ModelParameters& params, const SweepSpec& spec, std::uint64_t cell) {
  CellOutcome out;
  const std::size_t width = quantity_columns(spec.quantity, spec.monte_carlo.has_value()).size();
  try {
    switch (spec.quantity) {
      case Quantity::Fidelity:
        out.values = {transfer_fidelity(params.pdr(), params.polarizer(), params.cavity()).f_avg};
        break;
      case Quantity::Bound:
        out.values = {repeaterless_bound(params.eta_link, params.timing())};
        break;
      case Quantity::Rate:
      case Quantity::NMax:
      case Quantity::Regime: {
        const ProtocolTiming timing = params.timing();
        const RateResult r = transfer_rate(params.pdr(), params.polarizer(), params.cavity(),
                                           params.link(), timing, spec.f_target,
                                           params.rate_options());
        if (spec.quantity == Quantity::NMax) {
          out.values = {r.limit.unbounded ? kInf : static_cast<double>(r.limit.n)};
        } else if (spec.quantity == Quantity::Regime) {
          out.values = {static_cast<double>(static_cast<int>(r.regime))};
        } else {
          out.values = rate_columns(r, timing, params.eta_link);
          if (spec.monte_carlo) {
            McConfig mc = *spec.monte_carlo;
            mc.seed = trial_seed(mc.seed, cell);
            mc.threads = spec.threads;
            const McEstimate est = simulate_rate(r.probs, r.limit.n, timing, mc);
            out.values.insert(out.values.end(),
                              {est.mean_rate, est.std_error, est.error_fraction,
                               est.error_fraction_std_error,
                               conditional_error_probability(r.limit.n, r.probs)});
          }
        }
        if (r.limit.cap_reached) {
          out.status = CellStatus::Numerical;
          out.note = "attempt cap reached";
        }
        break;
      }
    }
  } catch (const InfeasibleError& e) {
    out.status = CellStatus::Infeasible;
    out.note = e.what();
  } catch (const ValidationError& e) {
    out.status = CellStatus::Invalid;
    out.note = e.what();
  } catch (const NumericalError& e) {
    out.status = CellStatus::Numerical;
    out.note = e.what();
  }
  out.values.resize(width, kNaN);
  return out;
}

}  // namespace

std::vector<double> Axis::coordinates() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = min;
    return out;
  }
  const double last = static_cast<double>(points - 1);
  for (std::int64_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / last;
    if (spacing == Spacing::Log) {
      out[i] = min * std::pow(max / min, f);
    } else {
      out[i] = min + (max - min) * f;
    }
  }
  out.back() = max;
  return out;
}

double Axis::applied_value(double coordinate) const {
  return spacing == Spacing::Db ? loss_db_to_transmissivity(coordinate) : coordinate;
}

void Axis::validate() const {
  require(ModelParameters::is_numeric_name(parameter), "unknown sweep parameter '" + parameter + "'");
  require(points >= 1, "axis '" + parameter + "' needs at least one point");
  require(std::isfinite(min) && std::isfinite(max), "axis bounds must be finite");
  if (points == 1) {
    require(min == max || max > min, "axis '" + parameter + "': min must not exceed max");
  } else {
    require(min < max, "axis '" + parameter + "': min must be < max");
  }
  if (spacing == Spacing::Log) require(min > 0.0, "log axis '" + parameter + "' needs min > 0");
}

void SweepSpec::validate() const {
  require(axes.size() == 1 || axes.size() == 2, "a sweep needs one or two axes");
  for (const auto& a : axes) a.validate();
  for (const auto& [k, _] : overrides) {
    require(ModelParameters::is_numeric_name(k), "unknown override parameter '" + k + "'");
  }
  require(f_target >= 0.0 && f_target <= 1.0, "f_target must lie in [0, 1]");
  if (monte_carlo) {
    require(quantity == Quantity::Rate, "Monte Carlo columns require the rate quantity");
    monte_carlo->validate();
  }
}

std::vector<std::size_t> SweepResult::cell_indices(std::size_t cell) const {
  if (grids.size() == 1) return {cell};
  const std::size_t n1 = grids[1].size();
  return {cell / n1, cell % n1};
}

const std::vector<double>& SweepResult::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return values[i];
  }
  throw ValidationError("no column named '" + name + "'");
}

ArgMax argmax(const SweepResult& result, const std::string& column) {
  const auto& v = result.column(column);
  ArgMax best;
  bool found = false;
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (result.status[c] != CellStatus::Ok || std::isnan(v[c])) continue;
    if (!found || v[c] > best.value) {
      best.cell = c;
      best.value = v[c];
      found = true;
    }
  }
  if (!found) throw NumericalError("no feasible cell in column '" + column + "'");
  const auto idx = result.cell_indices(best.cell);
  for (std::size_t a = 0; a < idx.size(); ++a) best.coordinates.push_back(result.grids[a][idx[a]]);
  return best;
}

std::string quantity_name(Quantity q) {
  switch (q) {
    case Quantity::Fidelity: return "fidelity";
    case Quantity::Rate: return "rate";
    case Quantity::NMax: return "n_max";
    case Quantity::Regime: return "regime";
    case Quantity::Bound: return "bound";
  }
  return "fidelity";
}

Quantity parse_quantity(const std::string& name) {
  for (Quantity q : {Quantity::Fidelity, Quantity::Rate, Quantity::NMax, Quantity::Regime,
                     Quantity::Bound}) {
    if (quantity_name(q) == name) return q;
  }
  throw ValidationError("unknown sweep quantity '" + name +
                        "' (expected fidelity, rate, n_max, regime or bound)");
}

std::string spacing_name(Spacing s) {
  switch (s) {
    case Spacing::Linear: return "linear";
    case Spacing::Log: return "log";
    case Spacing::Db: return "db";
  }
  return "linear";
}

Spacing parse_spacing(const std::string& name) {
  if (name == "linear") return Spacing::Linear;
  if (name == "log") return Spacing::Log;
  if (name == "db" || name == "dB") return Spacing::Db;
  throw ValidationError("unknown axis spacing '" + name + "' (expected linear, log or db)");
}

std::string status_name(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Infeasible: return "infeasible";
    case CellStatus::Invalid: return "invalid";
    case CellStatus::Numerical: return "numerical";
  }
  return "ok";
}

std::vector<std::string> quantity_columns(Quantity q, bool with_monte_carlo) {
  switch (q) {
    case Quantity::Fidelity: return {"fidelity"};
    case Quantity::NMax: return {"n_max"};
    case Quantity::Regime: return {"regime"};
    case Quantity::Bound: return {"bound"};
    case Quantity::Rate: {
      std::vector<std::string> cols{"rate", "n_max", "regime", "bound", "p_error",
                                    "p_success", "f0", "p_det", "p_e"};
      if (with_monte_carlo) {
        cols.insert(cols.end(), {"mc_rate", "mc_std_error", "mc_error_fraction",
                                 "mc_error_fraction_std_error", "conditional_p_error"});
      }
      return cols;
    }
  }
  return {};
}

SweepResult run_sweep(const ModelParameters& base, const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.axes = spec.axes;
  result.base = base;
  result.spec = spec;
  result.columns = quantity_columns(spec.quantity, spec.monte_carlo.has_value());
  for (const auto& a : spec.axes) result.grids.push_back(a.coordinates());

  std::size_t cells = 1;
  for (const auto& g : result.grids) cells *= g.size();
  result.values.assign(result.columns.size(), std::vector<double>(cells, kNaN));
  result.status.assign(cells, CellStatus::Ok);
  result.notes.assign(cells, {});

  ModelParameters fixed = base;
  for (const auto& [k, v] : spec.overrides) fixed.set(k, v);

  auto run_cell = [&](std::size_t c) {
    ModelParameters p = fixed;
    const auto idx = result.cell_indices(c);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      p.set(spec.axes[a].parameter, spec.axes[a].applied_value(result.grids[a][idx[a]]));
    }
    CellOutcome o = evaluate_cell(p, spec, c);
    for (std::size_t k = 0; k < o.values.size(); ++k) result.values[k][c] = o.values[k];
    result.status[c] = o.status;
    result.notes[c] = std::move(o.note);
  };

  if (spec.monte_carlo) {
    // trials inside each cell already run in parallel
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    parallel_for(cells, spec.threads, run_cell);
  }
  return result;
}

SweepSpec pdr_fidelity_spec(std::int64_t points_tv, std::int64_t points_rh) {
  SweepSpec s;
  s.axes = {Axis{"T_V", 0.5, 1.0, points_tv, Spacing::Linear},
            Axis{"R_H", 0.0, 0.6, points_rh, Spacing::Linear}};
  s.quantity = Quantity::Fidelity;
  return s;
}

SweepResult sweep_fidelity_pdr(const ModelParameters& base, const SweepSpec& spec) {
  for (const Axis& a : spec.axes) {
    require(a.parameter == "T_V" || a.parameter == "R_H" || a.parameter == "zeta_V" || a.parameter == "zeta_H",
            "reflector sweep axis must be a reflector parameter, got " + a.parameter);
  }
  require(spec.quantity == Quantity::Fidelity, "reflector sweep evaluates fidelity");
  return run_sweep(base, spec);
}

SweepSpec cooperativity_fidelity_spec(std::int64_t points) {
  SweepSpec s;
  s.axes = {Axis{"cooperativity", 0.5, 20.0, points, Spacing::Log}};
  s.quantity = Quantity::Fidelity;
  return s;
}

SweepSpec coupling_fidelity_spec(std::int64_t points) {
  SweepSpec s;
  s.axes = {Axis{"coupling_ratio", 0.05, 1.0, points, Spacing::Linear}};
  s.quantity = Quantity::Fidelity;
  return s;
}

SweepResult sweep_fidelity_cavity(const ModelParameters& base, const SweepSpec& spec) {
  require(spec.axes.size() == 1, "cavity sweep takes one axis");
  const std::string& p = spec.axes.front().parameter;
  require(p == "cooperativity" || p == "coupling_ratio",
          "cavity sweep axis must be cooperativity or coupling_ratio, got " + p);
  require(spec.quantity == Quantity::Fidelity, "cavity sweep evaluates fidelity");
  return run_sweep(base, spec);
}

Axis default_loss_axis() { return Axis{"loss_db", 0.0, 60.0, 121, Spacing::Linear}; }

std::vector<SweepResult> sweep_rate_vs_loss(const ModelParameters& base, const Axis& loss_axis,
                                            const std::vector<double>& constraints,
                                            const std::optional<McConfig>& mc, unsigned threads) {
  require(!constraints.empty(), "at least one fidelity constraint is required");
  std::vector<SweepResult> out;
  out.reserve(constraints.size());
  for (double f : constraints) {
    SweepSpec s;
    s.axes = {loss_axis};
    s.quantity = Quantity::Rate;
    s.f_target = f;
    s.monte_carlo = mc;
    s.threads = threads;
    out.push_back(run_sweep(base, s));
  }
  return out;
}

}  // namespace spinlink

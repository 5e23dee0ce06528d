#include "spinlink/commands.hpp"

#include <ostream>

#include "spinlink/errors.hpp"
#include "spinlink/table_io.hpp"

namespace spinlink {

using nlohmann::json;

namespace {

class Emitter {
 public:
  Emitter(const RunConfig& config, std::ostream& out) : config_(config), out_(out) {}

  void emit(const Table& table, const std::filesystem::path& path) {
    const json meta = run_metadata(config_);
    if (path.empty()) {
      write_table(table, config_.format, out_, meta);
    } else {
      write_table(table, config_.format, path, meta);
      artifacts.push_back(path);
    }
  }

  std::vector<std::filesystem::path> artifacts;

 private:
  const RunConfig& config_;
  std::ostream& out_;
};

void prepend(Table& t, const std::vector<std::pair<std::string, TableCell>>& cells) {
  std::vector<std::string> cols;
  std::vector<TableCell> values;
  for (const auto& [k, v] : cells) {
    cols.push_back(k);
    values.push_back(v);
  }
  t.columns.insert(t.columns.begin(), cols.begin(), cols.end());
  for (auto& r : t.rows) r.insert(r.begin(), values.begin(), values.end());
}

int fidelity_command(const RunConfig& cfg, Emitter& emit) {
  const auto& p = cfg.params;
  const EffectiveReflections eff = effective_reflection(p.pdr(), p.polarizer(), p.cavity());
  Table t = to_table(transfer_fidelity(eff));
  t.add_column("loss_balance_residual", loss_balance_residual(eff));
  emit.emit(t, cfg.out);
  return 0;
}

int rate_command(const RunConfig& cfg, Emitter& emit) {
  const auto& p = cfg.params;
  const ProtocolTiming timing = p.timing();
  const RateResult r = transfer_rate(p.pdr(), p.polarizer(), p.cavity(), p.link(), timing,
                                     p.f_target, p.rate_options());
  Table t = to_table(r);
  prepend(t, {{"loss_db", p.get("loss_db")}, {"eta_link", p.eta_link}, {"f_target", p.f_target}});
  t.add_column("bound", repeaterless_bound(p.eta_link, timing));
  emit.emit(t, cfg.out);
  if (r.limit.cap_reached) throw NumericalError("attempt cap reached while searching N_max");
  return 0;
}

int sweep_command(const RunConfig& cfg, Emitter& emit) {
  if (cfg.sweep.kind == "rate-vs-loss") {
    const SweepSpec spec = cfg.sweep_spec();
    std::optional<McConfig> mc;
    if (cfg.sweep.monte_carlo) mc = cfg.mc;
    const auto results =
        sweep_rate_vs_loss(cfg.params, spec.axes.front(), cfg.fidelity_constraints, mc, cfg.mc.threads);
    Table combined;
    for (std::size_t i = 0; i < results.size(); ++i) {
      Table t = to_table(results[i]);
      prepend(t, {{"f_target", cfg.fidelity_constraints[i]}});
      if (cfg.out.empty()) {
        if (combined.columns.empty()) combined.columns = t.columns;
        combined.rows.insert(combined.rows.end(), t.rows.begin(), t.rows.end());
      } else {
        emit.emit(t, constraint_path(cfg.out, cfg.fidelity_constraints[i]));
      }
    }
    if (cfg.out.empty()) emit.emit(combined, {});
    return 0;
  }
  const SweepResult r = run_sweep(cfg.params, cfg.sweep_spec());
  emit.emit(to_table(r), cfg.out);
  return 0;
}

int montecarlo_command(const RunConfig& cfg, Emitter& emit) {
  const auto& p = cfg.params;
  const ProtocolTiming timing = p.timing();
  const RateResult r = transfer_rate(p.pdr(), p.polarizer(), p.cavity(), p.link(), timing,
                                     p.f_target, p.rate_options());
  const McEstimate est = simulate_rate(r.probs, r.limit.n, timing, cfg.mc);
  Table t;
  t.columns = {"loss_db", "f_target", "n_max", "trials", "seed", "mc_rate", "mc_std_error",
               "mc_error_fraction", "mc_error_fraction_std_error", "mean_elapsed",
               "analytic_rate", "conditional_p_error"};
  t.rows.push_back({p.get("loss_db"), p.f_target, r.limit.n, est.trials,
                    std::to_string(cfg.mc.seed), est.mean_rate, est.std_error, est.error_fraction,
                    est.error_fraction_std_error, est.mean_elapsed, r.rate,
                    conditional_error_probability(r.limit.n, r.probs)});
  emit.emit(t, cfg.out);
  return 0;
}

int diagnose_command(const RunConfig& cfg, Emitter& emit) {
  const auto& p = cfg.params;
  const PdrParams pdr = p.pdr();
  const PolarizerParams pol = p.polarizer();
  const CavityParams cav = p.cavity();
  const LinkParams link = p.link();
  const EffectiveReflections eff = effective_reflection(pdr, pol, cav);
  const AttemptProbabilities probs = attempt_probabilities(pdr, pol, link);
  const double explicit_pe = explicit_error_probability(pdr, pol, link);

  Table t;
  t.columns = {"loss_balance_residual", "p_det", "p_lost", "p_e", "p_e_explicit", "p_e_gap",
               "r_cav_V_avg_configured", "r_cav_V_avg_from_cavity", "cooperativity",
               "r_H_on_re", "r_H_on_im", "r_H_off_re", "r_H_off_im", "r_V_on_re", "r_V_on_im",
               "r_V_off_re", "r_V_off_im", "f0"};
  t.rows.push_back({loss_balance_residual(eff), probs.p_det, probs.p_lost, probs.p_e, explicit_pe,
                    probs.p_e - explicit_pe, link.r_cav_V_avg, average_cavity_reflectivity(cav),
                    cav.cooperativity(), eff.h_on.real(), eff.h_on.imag(), eff.h_off.real(),
                    eff.h_off.imag(), eff.v_on.real(), eff.v_on.imag(), eff.v_off.real(),
                    eff.v_off.imag(),
                    single_attempt_fidelity(pdr, pol, cav, link, p.false_herald_correction)});
  emit.emit(t, cfg.out);
  return 0;
}

}  // namespace

std::filesystem::path constraint_path(const std::filesystem::path& base, double f_target) {
  std::filesystem::path out = base;
  const std::string ext = base.extension().string();
  out.replace_filename(base.stem().string() + "_F" + format_double(f_target) + ext);
  return out;
}

CommandOutcome run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Emitter emit(config, out);
  CommandOutcome outcome;
  try {
    config.validate();
    if (config.command == "fidelity") outcome.exit_code = fidelity_command(config, emit);
    else if (config.command == "rate") outcome.exit_code = rate_command(config, emit);
    else if (config.command == "sweep") outcome.exit_code = sweep_command(config, emit);
    else if (config.command == "montecarlo") outcome.exit_code = montecarlo_command(config, emit);
    else outcome.exit_code = diagnose_command(config, emit);
  } catch (const Error& e) {
    err << json{{"error", error_kind_name(e.kind())}, {"exit_code", e.exit_code()}, {"message", e.what()}}.dump()
        << '\n';
    outcome.exit_code = e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    err << json{{"error", "io"}, {"exit_code", 4}, {"message", e.what()}}.dump() << '\n';
    outcome.exit_code = static_cast<int>(ErrorKind::Io);
  }
  outcome.artifacts = emit.artifacts;
  return outcome;
}

}  // namespace spinlink

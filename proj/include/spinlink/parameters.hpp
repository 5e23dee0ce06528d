#pragma once

// Flat, name-addressable view of every scalar model knob. Sweeps set axes by
// name; configuration files and --set overrides use the same names.

#include <optional>
#include <string>
#include <vector>

#include "spinlink/core_model.hpp"
#include "spinlink/rate_model.hpp"

namespace spinlink {

struct ModelParameters {
  // cavity
  double cooperativity = 4.0;
  double coupling_ratio = 0.73;  // kappa_wg / kappa
  double kappa = 1.0;
  double gamma = 1.0;
  double delta_c = 0.0;
  double delta_a = 0.0;
  double h_reflection_re = -1.0;
  double h_reflection_im = 0.0;
  // reflector, from power values
  double T_V = 0.99;
  double R_H = 0.15;
  double zeta_V = 0.0;
  double zeta_H = 0.0;
  double reflection_sign = -1.0;
  // polarizer
  double eta_pol_V = 0.989;
  double eta_pol_H = 0.128;
  // link
  double eta_link = 1.0;
  double eta_det = 0.936;
  std::optional<double> xi;  // unset: 1 - r_cav_H
  double r_cav_V_avg = 0.356;
  double r_cav_H = 0.921;
  // protocol
  double tau_reset = 30e-6;
  double tau_pulse = 1.0 / 5.81e6;
  double pulse_multiplier = 1.0;
  double f_target = 0.99;
  double regime_low_threshold = 3.0;
  bool false_herald_correction = false;
  SuccessTimeModel success_time = SuccessTimeModel::Conditional;

  CavityParams cavity() const;
  /// R_V = 1 - T_V - zeta_V, T_H = 1 - R_H - zeta_H. Throws ValidationError on a
  /// negative complement.
  PdrParams pdr() const;
  PolarizerParams polarizer() const;
  LinkParams link() const;
  ProtocolTiming timing() const;
  RateOptions rate_options() const;
  double resolved_xi() const { return xi.value_or(1.0 - r_cav_H); }

  /// Numeric knobs by name, plus the derived "loss_db" (sets eta_link).
  /// Throws ValidationError for an unknown name.
  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  static const std::vector<std::string>& numeric_names();
  static bool is_numeric_name(const std::string& name);

  /// Checks every module-level invariant.
  void validate() const;
};

double loss_db_to_transmissivity(double loss_db);
double transmissivity_to_loss_db(double eta);

}  // namespace spinlink

#include "spinlink/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

struct Accessor {
  std::function<double(const ModelParameters&)> get;
  std::function<void(ModelParameters&, double)> set;
};

#define SPINLINK_FIELD(name)                                          \
  {                                                                   \
    #name, Accessor {                                                 \
      [](const ModelParameters& p) { return static_cast<double>(p.name); }, \
          [](ModelParameters& p, double v) { p.name = v; }            \
    }                                                                 \
  }

const std::map<std::string, Accessor>& accessors() {
  static const std::map<std::string, Accessor> table{
      SPINLINK_FIELD(cooperativity),
      SPINLINK_FIELD(coupling_ratio),
      SPINLINK_FIELD(kappa),
      SPINLINK_FIELD(gamma),
      SPINLINK_FIELD(delta_c),
      SPINLINK_FIELD(delta_a),
      SPINLINK_FIELD(h_reflection_re),
      SPINLINK_FIELD(h_reflection_im),
      SPINLINK_FIELD(T_V),
      SPINLINK_FIELD(R_H),
      SPINLINK_FIELD(zeta_V),
      SPINLINK_FIELD(zeta_H),
      SPINLINK_FIELD(reflection_sign),
      SPINLINK_FIELD(eta_pol_V),
      SPINLINK_FIELD(eta_pol_H),
      SPINLINK_FIELD(eta_link),
      SPINLINK_FIELD(eta_det),
      SPINLINK_FIELD(r_cav_V_avg),
      SPINLINK_FIELD(r_cav_H),
      SPINLINK_FIELD(tau_reset),
      SPINLINK_FIELD(tau_pulse),
      SPINLINK_FIELD(pulse_multiplier),
      SPINLINK_FIELD(f_target),
      SPINLINK_FIELD(regime_low_threshold),
      {"xi", Accessor{[](const ModelParameters& p) { return p.resolved_xi(); },
                      [](ModelParameters& p, double v) { p.xi = v; }}},
      {"loss_db",
       Accessor{[](const ModelParameters& p) { return transmissivity_to_loss_db(p.eta_link); },
                [](ModelParameters& p, double v) { p.eta_link = loss_db_to_transmissivity(v); }}},
  };
  return table;
}

#undef SPINLINK_FIELD

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

double loss_db_to_transmissivity(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

double transmissivity_to_loss_db(double eta) { return -10.0 * std::log10(eta); }

CavityParams ModelParameters::cavity() const {
  require(cooperativity >= 0.0, "cooperativity must be >= 0");
  require(coupling_ratio >= 0.0 && coupling_ratio <= 1.0, "coupling_ratio must lie in [0, 1]");
  CavityParams c = CavityParams::from_cooperativity(cooperativity, coupling_ratio, kappa, gamma);
  c.delta_c = delta_c;
  c.delta_a = delta_a;
  c.h_mode_reflection = {h_reflection_re, h_reflection_im};
  c.validate();
  return c;
}

PdrParams ModelParameters::pdr() const {
  require(std::abs(reflection_sign) == 1.0, "reflection_sign must be +1 or -1");
  require(zeta_V >= 0.0 && zeta_H >= 0.0, "zeta_V and zeta_H must be >= 0");
  const double R_V = 1.0 - T_V - zeta_V;
  const double T_H = 1.0 - R_H - zeta_H;
  require(R_V >= -1e-15, "R_V = 1 - T_V - zeta_V must be >= 0");
  require(T_H >= -1e-15, "T_H = 1 - R_H - zeta_H must be >= 0");
  return PdrParams::from_powers(T_V, std::max(R_V, 0.0), std::max(T_H, 0.0), R_H, reflection_sign);
}

PolarizerParams ModelParameters::polarizer() const {
  PolarizerParams p{eta_pol_V, eta_pol_H};
  p.validate();
  return p;
}

LinkParams ModelParameters::link() const {
  LinkParams l{eta_link, eta_det, resolved_xi(), r_cav_V_avg, r_cav_H};
  l.validate();
  return l;
}

ProtocolTiming ModelParameters::timing() const {
  ProtocolTiming t{tau_reset, tau_pulse, pulse_multiplier};
  t.validate();
  return t;
}

RateOptions ModelParameters::rate_options() const {
  require(regime_low_threshold >= 0.0 && std::floor(regime_low_threshold) == regime_low_threshold,
          "regime_low_threshold must be a non-negative integer");
  RateOptions o;
  o.success_time = success_time;
  o.false_herald_correction = false_herald_correction;
  o.regime_low_threshold = static_cast<std::int64_t>(regime_low_threshold);
  return o;
}

void ModelParameters::set(const std::string& name, double value) {
  const auto it = accessors().find(name);
  require(it != accessors().end(), "unknown parameter '" + name + "'");
  it->second.set(*this, value);
}

double ModelParameters::get(const std::string& name) const {
  const auto it = accessors().find(name);
  require(it != accessors().end(), "unknown parameter '" + name + "'");
  return it->second.get(*this);
}

const std::vector<std::string>& ModelParameters::numeric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : accessors()) out.push_back(k);
    return out;
  }();
  return names;
}

bool ModelParameters::is_numeric_name(const std::string& name) {
  return accessors().count(name) != 0;
}

void ModelParameters::validate() const {
  cavity();
  pdr().validate();
  polarizer();
  link();
  timing();
  rate_options();
  require(f_target >= 0.0 && f_target <= 1.0, "f_target must lie in [0, 1]");
}

}  // namespace spinlink

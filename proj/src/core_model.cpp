#include "spinlink/core_model.hpp"

#include <cmath>
#include <string>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kPowerSlack = 1e-12;
constexpr double kResonanceFloor = 1e-12;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool finite(Amplitude a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

void check_probability(double value, const char* name) {
  require(std::isfinite(value) && value >= 0.0 && value <= 1.0,
          std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
}

Amplitude etalon(Amplitude r, Amplitude t_squared, Amplitude r_cav) {
  const Amplitude denom = 1.0 - r_cav * r;
  if (std::abs(denom) < kResonanceFloor) {
    throw NumericalError("degenerate resonant etalon: |1 - r_cav r| < 1e-12");
  }
  return r + r_cav * t_squared / denom;
}

}  // namespace

CavityParams CavityParams::from_cooperativity(double cooperativity, double coupling_ratio,
                                              double kappa, double gamma) {
  require(cooperativity >= 0.0, "cooperativity must be >= 0");
  CavityParams c;
  c.kappa = kappa;
  c.gamma = gamma;
  c.kappa_wg = coupling_ratio * kappa;
  c.g = std::sqrt(cooperativity * kappa * gamma / 4.0);
  return c;
}

void CavityParams::validate() const {
  require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(kappa_wg) && kappa_wg >= 0.0 && kappa_wg <= kappa,
          "kappa_wg must lie in [0, kappa]");
  require(std::isfinite(g) && g >= 0.0, "g must be >= 0");
  require(std::isfinite(delta_c) && std::isfinite(delta_a), "detunings must be finite");
  require(finite(h_mode_reflection) && std::abs(h_mode_reflection) <= 1.0 + kPowerSlack,
          "|h_mode_reflection| must be <= 1");
}

double PdrParams::transmissivity(Polarization p) const {
  return std::norm(p == Polarization::H ? t_H : t_V);
}

double PdrParams::reflectivity(Polarization p) const {
  return std::norm(p == Polarization::H ? r_H : r_V);
}

double PdrParams::scattering(Polarization p) const {
  return 1.0 - transmissivity(p) - reflectivity(p);
}

PdrParams PdrParams::from_powers(double T_V, double R_V, double T_H, double R_H,
                                 double reflection_sign) {
  for (auto [v, name] : {std::pair{T_V, "T_V"}, {R_V, "R_V"}, {T_H, "T_H"}, {R_H, "R_H"}}) {
    check_probability(v, name);
  }
  PdrParams p;
  p.t_V = std::sqrt(T_V);
  p.r_V = reflection_sign * std::sqrt(R_V);
  p.t_H = std::sqrt(T_H);
  p.r_H = reflection_sign * std::sqrt(R_H);
  return p;
}

void PdrParams::validate() const {
  require(finite(t_H) && finite(r_H) && finite(t_V) && finite(r_V),
          "PDR coefficients must be finite");
  require(scattering(Polarization::H) >= -kPowerSlack, "PDR H: T_H + R_H must be <= 1");
  require(scattering(Polarization::V) >= -kPowerSlack, "PDR V: T_V + R_V must be <= 1");
}

void PolarizerParams::validate() const {
  check_probability(eta_V, "eta_pol_V");
  check_probability(eta_H, "eta_pol_H");
  require(eta_V >= eta_H, "V-pass polarizer requires eta_pol_V >= eta_pol_H");
}

void PhotonQubit::validate() const {
  require(finite(alpha) && finite(beta), "photon amplitudes must be finite");
  const double n = std::norm(alpha) + std::norm(beta);
  require(std::abs(n - 1.0) <= 1e-12, "photon qubit must be normalized");
}

double JointState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

Amplitude cavity_reflection(const CavityParams& cavity, bool coupled) {
  cavity.validate();
  const Amplitude i{0.0, 1.0};
  const Amplitude cav = i * cavity.delta_c + cavity.kappa / 2.0;
  const Amplitude atom = i * cavity.delta_a + cavity.gamma / 2.0;
  const double g2 = coupled ? cavity.g * cavity.g : 0.0;
  return 1.0 - cavity.kappa_wg / (cav * (1.0 + g2 / (cav * atom)));
}

double average_cavity_reflectivity(const CavityParams& cavity) {
  return 0.5 * (std::norm(cavity_reflection(cavity, true)) +
                std::norm(cavity_reflection(cavity, false)));
}

EffectiveReflections effective_reflection(const PdrParams& pdr, const PolarizerParams& polarizer,
                                          const CavityParams& cavity) {
  pdr.validate();
  polarizer.validate();
  const Amplitude r_on = cavity_reflection(cavity, true);
  const Amplitude r_off = cavity_reflection(cavity, false);
  const Amplitude r_h = cavity.h_mode_reflection;

  // |t|^2 -> eta |t|^2 applies to the round-trip t^2 as a power factor.
  const Amplitude tH2 = polarizer.eta_H * pdr.t_H * pdr.t_H;
  const Amplitude tV2 = polarizer.eta_V * pdr.t_V * pdr.t_V;

  EffectiveReflections eff;
  eff.h_on = etalon(pdr.r_H, tH2, r_h);
  eff.h_off = etalon(pdr.r_H, tH2, r_h);
  eff.v_on = etalon(pdr.r_V, tV2, r_on);
  eff.v_off = etalon(pdr.r_V, tV2, r_off);
  return eff;
}

JointState evolve_joint_state(const PhotonQubit& photon, const EffectiveReflections& eff) {
  photon.validate();
  const Amplitude a = photon.alpha;
  const Amplitude b = photon.beta;
  // 1/sqrt(2) from the spin superposition, 1/sqrt(2) from the half-wave plate
  constexpr double scale = 0.5;
  JointState out;
  out.at(Polarization::H, Spin::Down) = scale * (a * eff.h_on - b * eff.v_on);
  out.at(Polarization::H, Spin::Up) = scale * (a * eff.h_off - b * eff.v_off);
  out.at(Polarization::V, Spin::Down) = scale * (a * eff.h_on + b * eff.v_on);
  out.at(Polarization::V, Spin::Up) = scale * (a * eff.h_off + b * eff.v_off);
  return out;
}

HeraldedSpin herald_spin_state(const JointState& joint, HeraldOutcome outcome) {
  const Polarization branch = outcome == HeraldOutcome::H ? Polarization::H : Polarization::V;
  const Amplitude d = joint.at(branch, Spin::Down);
  const Amplitude u = joint.at(branch, Spin::Up);
  const double p = std::norm(d) + std::norm(u);
  if (!(p > 0.0)) throw NumericalError("unheraldable outcome: detected branch has zero norm");

  SpinState s{kInvSqrt2 * (d + u), kInvSqrt2 * (d - u)};
  if (outcome == HeraldOutcome::V) s.up = -s.up;
  const double n = std::sqrt(p);
  s.down /= n;
  s.up /= n;
  return {p, s};
}

SpinState target_state(int index) {
  static const std::array<Amplitude, 4> phases{Amplitude{1, 0}, Amplitude{-1, 0},
                                               Amplitude{0, 1}, Amplitude{0, -1}};
  require(index >= 1 && index <= 4, "target state index must be 1..4");
  return {kInvSqrt2, kInvSqrt2 * phases[index - 1]};
}

PhotonQubit probe_photon(int index) {
  const SpinState t = target_state(index);
  return {t.down, t.up};
}

double state_fidelity(const SpinState& target, const SpinState& spin) {
  return std::norm(std::conj(target.down) * spin.down + std::conj(target.up) * spin.up);
}

FidelityReport transfer_fidelity(const EffectiveReflections& eff) {
  FidelityReport report;
  double total = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const SpinState target = target_state(k);
    const JointState joint = evolve_joint_state(probe_photon(k), eff);

    InputFidelity& in = report.per_input[k - 1];
    in.target = k;
    double weighted = 0.0;
    double weight = 0.0;
    for (int o = 0; o < 2; ++o) {
      const auto outcome = o == 0 ? HeraldOutcome::H : HeraldOutcome::V;
      const auto branch = o == 0 ? Polarization::H : Polarization::V;
      const double p = std::norm(joint.at(branch, Spin::Down)) + std::norm(joint.at(branch, Spin::Up));
      if (!(p > 0.0)) continue;
      const HeraldedSpin h = herald_spin_state(joint, outcome);
      in.outcomes[o] = {h.probability, state_fidelity(target, h.spin)};
      weighted += h.probability * in.outcomes[o].fidelity;
      weight += h.probability;
    }
    if (!(weight > 0.0)) {
      throw NumericalError("device opaque: no herald outcome for input phi_" + std::to_string(k));
    }
    in.fidelity = weighted / weight;
    total += in.fidelity;
    for (int o = 0; o < 2; ++o) {
      report.per_outcome[o].herald_probability += in.outcomes[o].herald_probability / 4.0;
      report.per_outcome[o].fidelity += in.outcomes[o].fidelity / 4.0;
    }
  }
  report.f_avg = total / 4.0;
  return report;
}

FidelityReport transfer_fidelity(const PdrParams& pdr, const PolarizerParams& polarizer,
                                 const CavityParams& cavity) {
  return transfer_fidelity(effective_reflection(pdr, polarizer, cavity));
}

double loss_balance_residual(const EffectiveReflections& eff) {
  return std::abs(std::abs(eff.h_on - eff.v_on) - std::abs(eff.h_off + eff.v_off));
}

}  // namespace spinlink

#pragma once

// Device physics for polarization-to-spin state transfer: cavity reflection
// from input-output theory, the reflector/cavity etalon, joint photon-spin
// evolution through the half-wave plate, heralding, and the four-state
// average transfer fidelity.

#include <array>
#include <complex>

namespace spinlink {

using Amplitude = std::complex<double>;

enum class Polarization { H, V };
enum class Spin { Down, Up };

/// Detector outcome after the half-wave plate.
enum class HeraldOutcome { H, V };

/// Atom-cavity rates. All rates share one (arbitrary) angular unit.
struct CavityParams {
  double kappa = 1.0;     // total cavity decay
  double kappa_wg = 1.0;  // decay into the waveguide
  double gamma = 1.0;     // atom relaxation
  double g = 0.0;         // atom-cavity coupling
  double delta_c = 0.0;   // cavity detuning (omega_c - omega)
  double delta_a = 0.0;   // atom detuning (omega_a - omega)
  /// Reflection seen by H light behind the reflector. The spin-coupled
  /// transition is V only, so this is the same for both spin states.
  Amplitude h_mode_reflection{-1.0, 0.0};

  /// C = 4 g^2 / (kappa gamma).
  double cooperativity() const { return 4.0 * g * g / (kappa * gamma); }

  /// Builds parameters from C and kappa_wg / kappa; g is solved from C.
  static CavityParams from_cooperativity(double cooperativity, double coupling_ratio,
                                         double kappa = 1.0, double gamma = 1.0);

  /// Throws ValidationError naming the violated bound.
  void validate() const;
};

/// Field transmission and reflection coefficients of the polarization-dependent reflector.
struct PdrParams {
  Amplitude t_H, r_H, t_V, r_V;

  double transmissivity(Polarization p) const;
  double reflectivity(Polarization p) const;
  /// zeta = 1 - T - R
  double scattering(Polarization p) const;

  /// Field coefficients from power values: t = sqrt(T), r = sign * sqrt(R).
  static PdrParams from_powers(double T_V, double R_V, double T_H, double R_H,
                               double reflection_sign = -1.0);

  void validate() const;
};

/// Power pass efficiencies of the V-pass polarizer.
struct PolarizerParams {
  double eta_V = 1.0;
  double eta_H = 1.0;

  void validate() const;
};

/// Round-trip reflection of the reflector + cavity etalon per polarization and spin.
/// "on" means the spin state that couples to the cavity (|down>), "off" the other.
struct EffectiveReflections {
  Amplitude h_on, h_off, v_on, v_off;

  /// Duan-Kimble coefficients: H mirror -1, V cavity +1 (coupled) / -1 (bare).
  static EffectiveReflections ideal() { return {-1.0, -1.0, 1.0, -1.0}; }
};

struct PhotonQubit {
  Amplitude alpha;  // |H>
  Amplitude beta;   // |V>

  /// Throws ValidationError unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  void validate() const;
};

struct SpinState {
  Amplitude down;
  Amplitude up;

  double norm_squared() const { return std::norm(down) + std::norm(up); }
};

/// Unnormalized photon (after the half-wave plate) x spin state.
/// Losses only remove amplitude, so the squared norm is at most one.
struct JointState {
  std::array<Amplitude, 4> amplitudes{};

  Amplitude& at(Polarization p, Spin s) { return amplitudes[index(p, s)]; }
  const Amplitude& at(Polarization p, Spin s) const { return amplitudes[index(p, s)]; }
  double norm_squared() const;

 private:
  static constexpr std::size_t index(Polarization p, Spin s) {
    return (p == Polarization::H ? 0 : 2) + (s == Spin::Down ? 0 : 1);
  }
};

struct HeraldedSpin {
  double probability;  // squared norm of the detected branch
  SpinState spin;      // normalized, after the corrective rotation
};

struct OutcomeFidelity {
  double herald_probability = 0.0;
  double fidelity = 0.0;  // zero when the outcome cannot occur
};

struct InputFidelity {
  int target = 0;  // 1..4
  double fidelity = 0.0;
  std::array<OutcomeFidelity, 2> outcomes{};  // indexed H, V
};

struct FidelityReport {
  double f_avg = 0.0;
  std::array<InputFidelity, 4> per_input{};
  /// Herald probability and conditional fidelity averaged over the four inputs.
  std::array<OutcomeFidelity, 2> per_outcome{};
};

/// Cavity reflection r(omega) from input-output theory. With coupled = false the
/// atom is ignored (g = 0).
Amplitude cavity_reflection(const CavityParams& cavity, bool coupled);

/// Average V reflectivity over the coupled and bare spin states.
double average_cavity_reflectivity(const CavityParams& cavity);

/// Etalon r + r_cav t^2 / (1 - r_cav r) for each polarization and spin, with
/// t^2 scaled by the polarizer pass efficiency.
EffectiveReflections effective_reflection(const PdrParams& pdr, const PolarizerParams& polarizer,
                                          const CavityParams& cavity);

/// Spin starts in (|down> + |up>)/sqrt(2).
JointState evolve_joint_state(const PhotonQubit& photon, const EffectiveReflections& eff);

/// Projects onto the detected branch and applies the corrective rotation:
/// Hadamard for H, Hadamard then Z for V. Throws NumericalError on a zero branch.
HeraldedSpin herald_spin_state(const JointState& joint, HeraldOutcome outcome);

/// Probe states phi_1..4 = (|down> + {1, -1, i, -i} |up>)/sqrt(2) and the
/// photon qubit that should map onto each.
SpinState target_state(int index);
PhotonQubit probe_photon(int index);

/// |<target|spin>|^2 for a normalized spin state.
double state_fidelity(const SpinState& target, const SpinState& spin);

FidelityReport transfer_fidelity(const EffectiveReflections& eff);
FidelityReport transfer_fidelity(const PdrParams& pdr, const PolarizerParams& polarizer,
                                 const CavityParams& cavity);

/// | |r_H,on - r_V,on| - |r_H,off + r_V,off| |; zero when losses are balanced
/// for the alpha = beta input.
double loss_balance_residual(const EffectiveReflections& eff);

}  // namespace spinlink

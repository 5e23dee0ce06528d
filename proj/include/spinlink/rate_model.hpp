#pragma once

// Analytic protocol model for heralded transfer over a lossy link: per-attempt
// outcome probabilities, sequence error probability, the fidelity-constrained
// number of attempts per spin reset, expected timings and average rate.

#include <cstdint>
#include <optional>

#include "spinlink/core_model.hpp"

namespace spinlink {

struct LinkParams {
  double eta_link = 1.0;     // link transmissivity
  double eta_det = 1.0;      // detection-path efficiency
  double xi = 0.0;           // probability an H photon reaches the cavity
  double r_cav_V_avg = 1.0;  // R_cav,V
  double r_cav_H = 1.0;      // R_cav,H

  void validate() const;
};

struct ProtocolTiming {
  double tau_reset = 30e-6;
  double tau_pulse = 1.0 / 5.81e6;
  double pulse_multiplier = 1.0;

  double slot() const { return pulse_multiplier * tau_pulse; }
  void validate() const;
};

/// Partition of one attempt: detected, lost before touching the spin, or lost after it.
struct AttemptProbabilities {
  double p_det = 0.0;
  double p_lost = 1.0;
  double p_e = 0.0;

  void validate() const;
};

enum class Regime : int { Low = 1, ResetLimited = 2, ChannelLimited = 3 };

/// How the time of the successful sequence is averaged.
enum class SuccessTimeModel {
  /// tau_reset + E[click time | click within the sequence]
  Conditional,
  /// tau_reset + sum_m P(m-th click) m tau_slot, without normalizing by P_success
  Unnormalized,
};

struct RateOptions {
  SuccessTimeModel success_time = SuccessTimeModel::Conditional;
  /// Mix the initial spin state into f0 with the weight of V photons that reflect off
  /// the reflector without reaching the cavity.
  bool false_herald_correction = false;
  std::int64_t regime_low_threshold = 3;
  std::int64_t attempt_cap = 1'000'000'000;
};

struct AttemptLimit {
  std::int64_t n = 1;
  bool unbounded = false;    // p_e = 0: any number of attempts keeps the fidelity
  bool cap_reached = false;  // search stopped at the cap while still feasible
};

struct RateResult {
  AttemptProbabilities probs;
  double f0 = 0.0;
  AttemptLimit limit;
  double p_error = 0.0;
  double p_success = 0.0;
  double t_failures = 0.0;
  double t_success = 0.0;
  double rate = 0.0;
  Regime regime = Regime::Low;

  std::int64_t n_max() const { return limit.n; }
};

AttemptProbabilities attempt_probabilities(const PdrParams& pdr, const PolarizerParams& polarizer,
                                           const LinkParams& link);

/// The long-form p_e expression, evaluated independently of 1 - p_det - p_lost.
double explicit_error_probability(const PdrParams& pdr, const PolarizerParams& polarizer,
                                  const LinkParams& link);

/// P(at least one error in the m-1 bins before a click on the m-th attempt).
double error_probability_given_click(std::int64_t m, const AttemptProbabilities& probs);

/// Probability of a click within n attempts preceded by at least one error.
double sequence_error_probability(std::int64_t n, const AttemptProbabilities& probs);

/// 1 - (1 - p_det)^n
double sequence_success_probability(std::int64_t n, const AttemptProbabilities& probs);

/// sequence_error_probability / sequence_success_probability: error rate among
/// heralded transfers.
double conditional_error_probability(std::int64_t n, const AttemptProbabilities& probs);

double protocol_fidelity(std::int64_t n, const AttemptProbabilities& probs, double f0);

/// Largest N with protocol_fidelity(N) >= f_target. Throws InfeasibleError when
/// f_target > f0.
AttemptLimit max_attempts(const AttemptProbabilities& probs, double f0, double f_target,
                          std::int64_t cap = 1'000'000'000);

double expected_failure_time(std::int64_t n, const AttemptProbabilities& probs,
                             const ProtocolTiming& timing);
double expected_success_time(std::int64_t n, const AttemptProbabilities& probs,
                             const ProtocolTiming& timing);
double conditional_success_time(std::int64_t n, const AttemptProbabilities& probs,
                                const ProtocolTiming& timing);

/// -log2(1 - eta_link) / tau_slot
double repeaterless_bound(double eta_link, const ProtocolTiming& timing);

Regime classify_regime(std::int64_t n_max, const AttemptProbabilities& probs,
                       const ProtocolTiming& timing, std::int64_t low_threshold = 3);

/// Single-attempt heralded fidelity used as f0. With the false-herald correction,
/// mixes in the uncorrected initial spin state (fidelity 1/2) with weight R_V over
/// the detection numerator.
double single_attempt_fidelity(const PdrParams& pdr, const PolarizerParams& polarizer,
                               const CavityParams& cavity, const LinkParams& link,
                               bool false_herald_correction);

RateResult transfer_rate(const PdrParams& pdr, const PolarizerParams& polarizer,
                         const CavityParams& cavity, const LinkParams& link,
                         const ProtocolTiming& timing, double f_target,
                         const RateOptions& options = {});

/// Same, from precomputed attempt probabilities and f0.
RateResult transfer_rate(const AttemptProbabilities& probs, double f0,
                         const ProtocolTiming& timing, double f_target,
                         const RateOptions& options = {});

}  // namespace spinlink

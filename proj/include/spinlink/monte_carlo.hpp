#pragma once

// Stochastic replication of the heralded transfer protocol: one uniform draw per
// attempt, sequences of at most n_max attempts separated by spin resets, trials
// ending at the first detector click.

#include <cstdint>
#include <random>

#include "spinlink/rate_model.hpp"

namespace spinlink {

struct TrialResult {
  double elapsed = 0.0;
  std::int64_t attempts_used = 0;
  std::int64_t sequences_used = 0;
  bool error_occurred = false;  // an error preceded the click within its sequence
  std::int64_t lost_events = 0;
  std::int64_t error_events = 0;
};

enum class RateEstimator {
  Harmonic,    // 1 / mean(elapsed)
  Arithmetic,  // mean(1 / elapsed)
};

struct McConfig {
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  std::int64_t attempt_cap = 100'000'000;
  RateEstimator estimator = RateEstimator::Harmonic;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct McEstimate {
  double mean_rate = 0.0;
  double std_error = 0.0;
  double error_fraction = 0.0;
  double error_fraction_std_error = 0.0;
  double mean_elapsed = 0.0;
  std::int64_t trials = 0;
  std::int64_t attempts = 0;
  std::int64_t detections = 0;
  std::int64_t lost_events = 0;
  std::int64_t error_events = 0;
};

/// Seed of trial `index` derived from the master seed; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

/// Throws NumericalError when no click happens within attempt_cap attempts.
TrialResult simulate_trial(const AttemptProbabilities& probs, std::int64_t n_max,
                           const ProtocolTiming& timing, std::mt19937_64& rng,
                           std::int64_t attempt_cap = 100'000'000);

McEstimate simulate_rate(const AttemptProbabilities& probs, std::int64_t n_max,
                         const ProtocolTiming& timing, const McConfig& cfg);

}  // namespace spinlink

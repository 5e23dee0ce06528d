#include "spinlink/monte_carlo.hpp"

#include <cmath>
#include <vector>

#include "spinlink/errors.hpp"
#include "spinlink/parallel.hpp"

namespace spinlink {

namespace {

// 53 random mantissa bits -> [0, 1)
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void McConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (attempt_cap < 1) throw ValidationError("attempt_cap must be >= 1");
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

TrialResult simulate_trial(const AttemptProbabilities& probs, std::int64_t n_max,
                           const ProtocolTiming& timing, std::mt19937_64& rng,
                           std::int64_t attempt_cap) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  const double lost_edge = probs.p_lost;
  const double error_edge = probs.p_lost + probs.p_e;

  TrialResult out;
  std::int64_t in_sequence = 0;
  bool sequence_error = false;
  out.sequences_used = 1;
  while (true) {
    if (out.attempts_used >= attempt_cap) {
      throw NumericalError("no detection within the attempt cap of " +
                           std::to_string(attempt_cap));
    }
    if (in_sequence == n_max) {
      ++out.sequences_used;
      in_sequence = 0;
      sequence_error = false;
    }
    ++out.attempts_used;
    ++in_sequence;
    const double u = uniform01(rng);
    if (u < lost_edge) {
      ++out.lost_events;
    } else if (u < error_edge) {
      ++out.error_events;
      sequence_error = true;
    } else {
      break;
    }
  }
  out.error_occurred = sequence_error;
  out.elapsed = static_cast<double>(out.sequences_used) * timing.tau_reset +
                static_cast<double>(out.attempts_used) * timing.slot();
  return out;
}

McEstimate simulate_rate(const AttemptProbabilities& probs, std::int64_t n_max,
                         const ProtocolTiming& timing, const McConfig& cfg) {
  cfg.validate();
  timing.validate();
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> trials(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    std::mt19937_64 rng(trial_seed(cfg.seed, i));
    trials[i] = simulate_trial(probs, n_max, timing, rng, cfg.attempt_cap);
  });

  std::vector<double> elapsed(n), inverse(n), errors(n);
  McEstimate est;
  est.trials = cfg.trials;
  for (std::size_t i = 0; i < n; ++i) {
    elapsed[i] = trials[i].elapsed;
    inverse[i] = 1.0 / trials[i].elapsed;
    errors[i] = trials[i].error_occurred ? 1.0 : 0.0;
    est.attempts += trials[i].attempts_used;
    est.lost_events += trials[i].lost_events;
    est.error_events += trials[i].error_events;
  }
  est.detections = cfg.trials;

  const double count = static_cast<double>(n);
  auto mean_and_se = [&](std::vector<double>& xs) {
    // shifted by the first sample so identical samples give exactly zero spread
    const double shift = xs[0];
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - shift;
    const double mean_d = pairwise_sum(d) / count;
    if (n < 2) return std::pair{shift + mean_d, 0.0};
    for (auto& x : d) x = (x - mean_d) * (x - mean_d);
    const double var = pairwise_sum(d) / (count - 1.0);
    return std::pair{shift + mean_d, std::sqrt(var / count)};
  };

  const auto [mean_elapsed, se_elapsed] = mean_and_se(elapsed);
  est.mean_elapsed = mean_elapsed;
  if (cfg.estimator == RateEstimator::Harmonic) {
    est.mean_rate = 1.0 / mean_elapsed;
    est.std_error = se_elapsed / (mean_elapsed * mean_elapsed);
  } else {
    const auto [mean_inv, se_inv] = mean_and_se(inverse);
    est.mean_rate = mean_inv;
    est.std_error = se_inv;
  }
  est.error_fraction = pairwise_sum(errors) / count;
  est.error_fraction_std_error = std::sqrt(est.error_fraction * (1.0 - est.error_fraction) / count);
  return est;
}

}  // namespace spinlink

#include "spinlink/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

constexpr double kSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void check_probability(double value, const char* name) {
  require(std::isfinite(value) && value >= 0.0 && value <= 1.0,
          std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
}

void check_count(std::int64_t n, const char* name) {
  require(n >= 1, std::string(name) + " must be >= 1");
}

// (1 - p)^n and 1 - (1 - p)^n without cancellation for small p.
double survival(double p, std::int64_t n) {
  return std::exp(static_cast<double>(n) * std::log1p(-p));
}
double hit(double p, std::int64_t n) {
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

double detection_numerator(const PdrParams& pdr, const PolarizerParams& pol, const LinkParams& link) {
  const double T_V = pdr.transmissivity(Polarization::V);
  const double T_H = pdr.transmissivity(Polarization::H);
  return T_V * T_V * pol.eta_V * pol.eta_V * link.r_cav_V_avg + pdr.reflectivity(Polarization::V) +
         T_H * T_H * pol.eta_H * pol.eta_H * link.r_cav_H + pdr.reflectivity(Polarization::H);
}

/// Sum of x^a y^b over a + b < m with x = 1 - dx, y = 1 - dy, built by doubling
/// so every step adds positive terms.
double pair_sum(double dx, double dy, std::int64_t m) {
  const double x = 1.0 - dx;
  auto partial = [](double d, std::int64_t k) { return d == 0.0 ? static_cast<double>(k) : hit(d, k) / d; };
  std::int64_t k = 0;
  double g = 0.0;
  for (int bit = 62; bit >= 0; --bit) {
    if (k > 0) {
      g = partial(dx, k) * partial(dy, k) + (survival(dx, k) + survival(dy, k)) * g;
      k *= 2;
    }
    if ((m >> bit) & 1) {
      g = x * g + partial(dy, k + 1);
      ++k;
    }
  }
  return g;
}

}  // namespace

void LinkParams::validate() const {
  check_probability(eta_link, "eta_link");
  check_probability(eta_det, "eta_det");
  check_probability(xi, "xi");
  check_probability(r_cav_V_avg, "r_cav_V_avg");
  check_probability(r_cav_H, "r_cav_H");
  require(xi <= 1.0 - r_cav_H + kSlack, "xi must be <= 1 - r_cav_H");
}

void ProtocolTiming::validate() const {
  require(std::isfinite(tau_reset) && tau_reset > 0.0, "tau_reset must be > 0");
  require(std::isfinite(tau_pulse) && tau_pulse > 0.0, "tau_pulse must be > 0");
  require(std::isfinite(pulse_multiplier) && pulse_multiplier > 0.0,
          "pulse_multiplier must be > 0");
}

void AttemptProbabilities::validate() const {
  check_probability(p_det, "p_det");
  check_probability(p_lost, "p_lost");
  check_probability(p_e, "p_e");
  require(std::abs(p_det + p_lost + p_e - 1.0) <= kSlack, "p_det + p_lost + p_e must equal 1");
}

AttemptProbabilities attempt_probabilities(const PdrParams& pdr, const PolarizerParams& polarizer,
                                           const LinkParams& link) {
  pdr.validate();
  polarizer.validate();
  link.validate();
  const double T_V = pdr.transmissivity(Polarization::V);
  const double T_H = pdr.transmissivity(Polarization::H);
  const double eta = link.eta_link;

  AttemptProbabilities p;
  p.p_det = eta / 2.0 * detection_numerator(pdr, polarizer, link) * link.eta_det;
  p.p_lost = 1.0 - eta +
             eta / 2.0 *
                 (pdr.scattering(Polarization::V) + pdr.scattering(Polarization::H) +
                  T_V * (1.0 - polarizer.eta_V) + T_H * (1.0 - polarizer.eta_H) +
                  T_H * polarizer.eta_H * (1.0 - link.r_cav_H - link.xi));
  p.p_e = 1.0 - p.p_det - p.p_lost;

  for (double* v : {&p.p_det, &p.p_lost, &p.p_e}) {
    if (!(*v >= -kSlack && *v <= 1.0 + kSlack)) {
      throw ValidationError("inconsistent device parameters: attempt probabilities outside [0, 1]");
    }
    *v = std::clamp(*v, 0.0, 1.0);
  }
  return p;
}

double explicit_error_probability(const PdrParams& pdr, const PolarizerParams& polarizer,
                                  const LinkParams& link) {
  const double T_V = pdr.transmissivity(Polarization::V);
  const double T_H = pdr.transmissivity(Polarization::H);
  const double R = link.r_cav_V_avg;
  const double eV = polarizer.eta_V;
  return link.eta_link / 2.0 *
         (T_V * eV * (1.0 - R + R * (1.0 - eV) + R * eV * pdr.scattering(Polarization::V)) +
          T_H * polarizer.eta_H * link.xi);
}

double error_probability_given_click(std::int64_t m, const AttemptProbabilities& probs) {
  check_count(m, "m");
  if (m == 1 || probs.p_e == 0.0) return 0.0;
  require(probs.p_det < 1.0, "p_det must be < 1");
  const double ratio = probs.p_lost / (1.0 - probs.p_det);
  return -std::expm1(static_cast<double>(m - 1) * std::log(ratio));
}

double sequence_error_probability(std::int64_t n, const AttemptProbabilities& probs) {
  check_count(n, "n");
  if (n == 1 || probs.p_e == 0.0 || probs.p_det == 0.0) return 0.0;
  // Equivalent to 1 - (1-p_det)^n - p_det (1 - p_lost^n) / (1 - p_lost), rewritten as
  // p_e p_det sum_{a+b<n-1} p_lost^a (1-p_det)^b (error at a+1, click b attempts
  // later), which avoids the cancellation when errors are rare next to clicks.
  const double value = probs.p_e * probs.p_det * pair_sum(probs.p_det + probs.p_e, probs.p_det, n - 1);
  return std::clamp(value, 0.0, 1.0);
}

double sequence_success_probability(std::int64_t n, const AttemptProbabilities& probs) {
  check_count(n, "n");
  return hit(probs.p_det, n);
}

double conditional_error_probability(std::int64_t n, const AttemptProbabilities& probs) {
  const double ps = sequence_success_probability(n, probs);
  if (ps == 0.0) return 0.0;
  return sequence_error_probability(n, probs) / ps;
}

double protocol_fidelity(std::int64_t n, const AttemptProbabilities& probs, double f0) {
  const double p = sequence_error_probability(n, probs);
  return (1.0 - p) * f0 + p * 0.5;
}

AttemptLimit max_attempts(const AttemptProbabilities& probs, double f0, double f_target,
                          std::int64_t cap) {
  check_probability(f0, "f0");
  check_probability(f_target, "f_target");
  check_count(cap, "attempt cap");
  if (f_target > f0) {
    throw InfeasibleError("infeasible constraint: f_target " + std::to_string(f_target) +
                          " exceeds single-attempt fidelity " + std::to_string(f0));
  }
  AttemptLimit out;
  // Errors drive the state towards fidelity 1/2; below that they cannot hurt.
  if (probs.p_e == 0.0 || f0 <= 0.5) {
    out.n = cap;
    out.unbounded = true;
    return out;
  }
  auto feasible = [&](std::int64_t n) { return protocol_fidelity(n, probs, f0) >= f_target; };

  std::int64_t lo = 1;  // always feasible: no preceding bins
  std::int64_t hi = 2;
  while (feasible(hi)) {
    lo = hi;
    if (hi >= cap) {
      out.n = cap;
      out.cap_reached = true;
      return out;
    }
    hi = std::min(hi * 2, cap);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (feasible(mid) ? lo : hi) = mid;
  }
  out.n = lo;
  return out;
}

double expected_failure_time(std::int64_t n, const AttemptProbabilities& probs,
                             const ProtocolTiming& timing) {
  check_count(n, "n");
  if (probs.p_det == 0.0) return kInf;
  const double miss = survival(probs.p_det, n);
  return miss / hit(probs.p_det, n) *
         (static_cast<double>(n) * timing.slot() + timing.tau_reset);
}

double expected_success_time(std::int64_t n, const AttemptProbabilities& probs,
                             const ProtocolTiming& timing) {
  check_count(n, "n");
  if (probs.p_det == 0.0) return timing.tau_reset;
  const double clicks = hit(probs.p_det, n) / probs.p_det -
                        static_cast<double>(n) * survival(probs.p_det, n);
  return timing.tau_reset + timing.slot() * clicks;
}

double conditional_success_time(std::int64_t n, const AttemptProbabilities& probs,
                                const ProtocolTiming& timing) {
  check_count(n, "n");
  const double ps = hit(probs.p_det, n);
  if (ps == 0.0) return timing.tau_reset + timing.slot() * (static_cast<double>(n) + 1.0) / 2.0;
  return timing.tau_reset +
         (expected_success_time(n, probs, timing) - timing.tau_reset) / ps;
}

double repeaterless_bound(double eta_link, const ProtocolTiming& timing) {
  check_probability(eta_link, "eta_link");
  return -std::log1p(-eta_link) / std::log(2.0) / timing.slot();
}

Regime classify_regime(std::int64_t n_max, [[maybe_unused]] const AttemptProbabilities& probs,
                       const ProtocolTiming& timing, std::int64_t low_threshold) {
  if (static_cast<double>(n_max) * timing.slot() > timing.tau_reset) return Regime::ChannelLimited;
  if (n_max <= low_threshold) return Regime::Low;
  return Regime::ResetLimited;
}

double single_attempt_fidelity(const PdrParams& pdr, const PolarizerParams& polarizer,
                               const CavityParams& cavity, const LinkParams& link,
                               bool false_herald_correction) {
  const double f = transfer_fidelity(pdr, polarizer, cavity).f_avg;
  if (!false_herald_correction) return f;
  const double numer = detection_numerator(pdr, polarizer, link);
  if (!(numer > 0.0)) return f;
  const double w = pdr.reflectivity(Polarization::V) / numer;
  return (1.0 - w) * f + w * 0.5;
}

RateResult transfer_rate(const AttemptProbabilities& probs, double f0,
                         const ProtocolTiming& timing, double f_target,
                         const RateOptions& options) {
  timing.validate();
  RateResult out;
  out.probs = probs;
  out.f0 = f0;
  out.limit = max_attempts(probs, f0, f_target, options.attempt_cap);

  if (out.limit.unbounded) {
    // N -> infinity: every sequence eventually clicks.
    out.p_error = probs.p_e == 0.0 ? 0.0 : sequence_error_probability(out.limit.n, probs);
    out.p_success = probs.p_det > 0.0 ? 1.0 : 0.0;
    out.t_failures = probs.p_det > 0.0 ? 0.0 : kInf;
    out.t_success = probs.p_det > 0.0 ? timing.tau_reset + timing.slot() / probs.p_det : kInf;
    out.regime = Regime::ChannelLimited;
  } else {
    const std::int64_t n = out.limit.n;
    out.p_error = sequence_error_probability(n, probs);
    out.p_success = sequence_success_probability(n, probs);
    out.t_failures = expected_failure_time(n, probs, timing);
    out.t_success = options.success_time == SuccessTimeModel::Unnormalized
                        ? expected_success_time(n, probs, timing)
                        : conditional_success_time(n, probs, timing);
    out.regime = classify_regime(n, probs, timing, options.regime_low_threshold);
  }
  const double total = out.t_failures + out.t_success;
  out.rate = std::isfinite(total) ? 1.0 / total : 0.0;
  return out;
}

RateResult transfer_rate(const PdrParams& pdr, const PolarizerParams& polarizer,
                         const CavityParams& cavity, const LinkParams& link,
                         const ProtocolTiming& timing, double f_target,
                         const RateOptions& options) {
  const AttemptProbabilities probs = attempt_probabilities(pdr, polarizer, link);
  const double f0 =
      single_attempt_fidelity(pdr, polarizer, cavity, link, options.false_herald_correction);
  return transfer_rate(probs, f0, timing, f_target, options);
}

}  // namespace spinlink

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/parameters.hpp"
#include "spinlink/rate_model.hpp"

using namespace spinlink;

namespace {

AttemptProbabilities probs_at(double eta_link) {
  ModelParameters p;
  p.eta_link = eta_link;
  return attempt_probabilities(p.pdr(), p.polarizer(), p.link());
}

AttemptProbabilities make(double p_det, double p_lost) {
  return {p_det, p_lost, 1.0 - p_det - p_lost};
}

AttemptProbabilities with_error(double p_det, double p_e) {
  return {p_det, 1.0 - p_det - p_e, p_e};
}

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("trivial attempt probabilities") {
  const AttemptProbabilities dark = probs_at(0.0);
  CHECK(dark.p_det == 0.0);
  CHECK(dark.p_e == 0.0);
  CHECK(dark.p_lost == 1.0);

  const PdrParams pdr = PdrParams::from_powers(1.0, 0.0, 0.0, 1.0);
  const LinkParams link{1.0, 1.0, 0.0, 1.0, 1.0};
  const AttemptProbabilities ideal = attempt_probabilities(pdr, {1.0, 1.0}, link);
  CHECK(ideal.p_det == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ideal.p_lost == doctest::Approx(0.0));
  CHECK(ideal.p_e == doctest::Approx(0.0));
}

TEST_CASE("design probabilities at 30 dB") {
  const AttemptProbabilities p = probs_at(1e-3);
  CHECK(p.p_det == doctest::Approx(0.0002397020922633168).epsilon(1e-12));
  CHECK(p.p_lost == doctest::Approx(0.999376045).epsilon(1e-12));
  CHECK(p.p_e == doctest::Approx(0.0003842529077366832).epsilon(1e-9));
  CHECK(p.p_det + p.p_lost + p.p_e == doctest::Approx(1.0).epsilon(1e-15));

  ModelParameters m;
  m.eta_link = 1e-3;
  CHECK(explicit_error_probability(m.pdr(), m.polarizer(), m.link()) ==
        doctest::Approx(0.00032148811738).epsilon(1e-10));
}

TEST_CASE("partition holds over random devices") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double T_V = u(rng), R_V = (1.0 - T_V) * u(rng);
    const double T_H = u(rng), R_H = (1.0 - T_H) * u(rng);
    PolarizerParams pol{u(rng), 0.0};
    pol.eta_H = pol.eta_V * u(rng);
    LinkParams link{u(rng), u(rng), 0.0, u(rng), u(rng)};
    link.xi = (1.0 - link.r_cav_H) * u(rng);
    const AttemptProbabilities p = attempt_probabilities(PdrParams::from_powers(T_V, R_V, T_H, R_H), pol, link);
    CHECK(p.p_det >= 0.0);
    CHECK(p.p_lost >= 0.0);
    CHECK(p.p_e >= 0.0);
    CHECK(std::abs(p.p_det + p.p_lost + p.p_e - 1.0) <= 1e-12);
  }
}

TEST_CASE("inconsistent parameters are rejected") {
  LinkParams link{1.0, 1.0, 0.5, 1.0, 0.9};
  CHECK_THROWS_AS(link.validate(), ValidationError);
  link = {1.5, 1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(link.validate(), ValidationError);
  ProtocolTiming timing;
  timing.tau_reset = 0.0;
  CHECK_THROWS_AS(timing.validate(), ValidationError);
  CHECK_THROWS_AS(error_probability_given_click(0, make(0.1, 0.8)), ValidationError);
  CHECK_THROWS_AS(sequence_error_probability(0, make(0.1, 0.8)), ValidationError);
}

TEST_CASE("error probability given a click") {
  CHECK(error_probability_given_click(1, make(0.1, 0.8)) == 0.0);
  CHECK(error_probability_given_click(7, make(0.1, 0.9)) == doctest::Approx(0.0));
  CHECK(error_probability_given_click(3, make(0.1, 0.8)) == doctest::Approx(17.0 / 81.0).epsilon(1e-14));
}

TEST_CASE("sequence error probability examples") {
  CHECK(sequence_error_probability(1, make(0.3, 0.5)) == 0.0);
  CHECK(sequence_error_probability(40, make(0.3, 0.7)) == 0.0);
  CHECK(sequence_error_probability(5, make(0.1, 0.8)) == doctest::Approx(0.07334999999999997).epsilon(1e-13));
  CHECK(sequence_error_probability(100, make(0.0, 1.0)) == 0.0);
}

TEST_CASE("closed forms match term-by-term sums") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ProtocolTiming timing;
  for (int i = 0; i < 30; ++i) {
    const double p_det = std::pow(10.0, -5.0 * u(rng));
    const double p_e = (1.0 - p_det) * std::pow(10.0, -4.0 * u(rng)) * u(rng);
    const AttemptProbabilities probs = with_error(p_det, p_e);
    const auto errors = oracle::sequence_error_sums(p_det, p_e, 10000);
    const auto times = oracle::success_time_sums(p_det, timing.tau_reset, timing.slot(), 10000);
    for (std::int64_t n = 1; n <= 10000; n += (n < 100 ? 1 : 37)) {
      CHECK(relative(sequence_error_probability(n, probs), errors[n - 1]) <= 1e-12);
      CHECK(relative(expected_success_time(n, probs, timing), times[n - 1]) <= 1e-12);
    }
  }
}

TEST_CASE("rare errors keep full relative precision") {
  // Error at attempt a+1, click b attempts later: every term is positive.
  for (double p_det : {0.5, 0.01}) {
    for (double p_e : {1e-6, 1e-10, 1e-14}) {
      const long double q = 1.0L - p_det, l = 1.0L - p_det - static_cast<long double>(p_e);
      for (std::int64_t n : {2, 3, 10, 150}) {
        long double sum = 0.0L;
        for (std::int64_t a = 0; a <= n - 2; ++a)
          for (std::int64_t b = 0; a + b <= n - 2; ++b) sum += std::pow(l, a) * std::pow(q, b);
        const double want = static_cast<double>(sum * p_e * p_det);
        CHECK(relative(sequence_error_probability(n, with_error(p_det, p_e)), want) <= 1e-13);
      }
    }
  }
}

TEST_CASE("protocol fidelity") {
  const AttemptProbabilities p = make(0.01, 0.97);
  CHECK(protocol_fidelity(1, p, 0.9999) == 0.9999);
  CHECK(protocol_fidelity(50, p, 0.9999) == doctest::Approx(0.9327389059166649).epsilon(1e-13));
  CHECK(protocol_fidelity(1'000'000'000'000, with_error(1e-9, 1.0 - 1e-9), 0.9999) ==
        doctest::Approx(0.5).epsilon(1e-8));
  double previous = 1.0;
  for (std::int64_t n = 1; n <= 5000; ++n) {
    const double f = protocol_fidelity(n, p, 0.9999);
    CHECK(f <= previous + 1e-15);
    previous = f;
  }
}

TEST_CASE("error vanishes with p_e") {
  for (double pe : {1e-2, 1e-4, 1e-6, 1e-8, 0.0}) {
    const AttemptProbabilities p{0.01, 0.99 - pe, pe};
    CHECK(sequence_error_probability(1000, p) <= pe * 1000.0 + 1e-15);
  }
}

TEST_CASE("attempt limit") {
  const AttemptProbabilities p = make(0.01, 0.97);
  CHECK(max_attempts(p, 0.9999, 0.9999).n == 1);
  const AttemptLimit open = max_attempts(make(0.01, 0.99), 0.9999, 0.99);
  CHECK(open.unbounded);
  CHECK_THROWS_AS(max_attempts(p, 0.98, 0.99), InfeasibleError);

  const AttemptLimit capped = max_attempts(AttemptProbabilities{1e-12, 1.0 - 2e-12, 1e-12}, 0.9999, 0.99, 1000);
  CHECK(capped.cap_reached);
  CHECK(capped.n == 1000);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double p_det = std::pow(10.0, -3.0 * u(rng) - 1.0);
    const double p_e = (1.0 - p_det) * 0.1 * u(rng);
    const double f0 = 0.999 + 0.001 * u(rng);
    const double target = 0.9 + (f0 - 0.9) * u(rng);
    const AttemptLimit lim = max_attempts(with_error(p_det, p_e), f0, target);
    CHECK(lim.n == oracle::n_max_scan(p_det, p_e, f0, target, 100000));
  }
}

TEST_CASE("design device at 10 dB") {
  ModelParameters m;
  m.set("loss_db", 10.0);
  const RateResult r = transfer_rate(m.pdr(), m.polarizer(), m.cavity(), m.link(), m.timing(), 0.99);
  CHECK(r.limit.n == 7);
  CHECK(r.limit.n == oracle::n_max_scan(r.probs.p_det, r.probs.p_e, r.f0, 0.99, 1000));
  CHECK(expected_failure_time(7, r.probs, m.timing()) == doctest::Approx(1.6857490714660412e-4).epsilon(1e-12));
  CHECK(expected_failure_time(7, r.probs, m.timing()) ==
        doctest::Approx(oracle::failure_time_sum(r.probs.p_det, 7, m.tau_reset, m.timing().slot())).epsilon(1e-12));
  CHECK(expected_success_time(7, r.probs, m.timing()) == doctest::Approx(3.0104928279923386e-05).epsilon(1e-12));
  CHECK(r.rate == doctest::Approx(1.0 / (r.t_failures + r.t_success)).epsilon(1e-15));
  CHECK(r.p_success == doctest::Approx(1.0 - std::pow(1.0 - r.probs.p_det, 7)).epsilon(1e-14));
}

TEST_CASE("timing examples") {
  ProtocolTiming t;
  const double slot = t.slot();
  CHECK(expected_failure_time(5, make(1.0, 0.0), t) == 0.0);
  CHECK(expected_failure_time(1, make(0.5, 0.5), t) == doctest::Approx(slot + t.tau_reset));
  CHECK(expected_success_time(9, make(1.0, 0.0), t) == doctest::Approx(t.tau_reset + slot));
  CHECK(expected_success_time(1, make(0.3, 0.7), t) == doctest::Approx(t.tau_reset + slot * 0.3));
  CHECK(conditional_success_time(1, make(0.3, 0.7), t) == doctest::Approx(t.tau_reset + slot));
  t.pulse_multiplier = 4.0;
  CHECK(t.slot() == doctest::Approx(4.0 * slot));
}

TEST_CASE("expected time per success agrees with the renewal argument") {
  // Every attempt costs a slot and every sequence a reset, so the mean time per
  // success is the mean number of each divided by P_success.
  const ProtocolTiming t;
  for (double p_det : {0.5, 0.05, 1e-3, 1e-5}) {
    const AttemptProbabilities p = make(p_det, 1.0 - 2.0 * p_det);
    for (std::int64_t n : {1, 3, 20, 700, 50000}) {
      const double ps = sequence_success_probability(n, p);
      const double attempts = ps / p_det;  // mean attempts per sequence
      const double want = (t.tau_reset + attempts * t.slot()) / ps;
      const double got = expected_failure_time(n, p, t) + conditional_success_time(n, p, t);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("repeaterless bound") {
  const ProtocolTiming t;
  CHECK(repeaterless_bound(0.5, t) == doctest::Approx(1.0 / t.slot()).epsilon(1e-15));
  CHECK(repeaterless_bound(1e-3, t) == doctest::Approx(8386.252012775249).epsilon(1e-12));
  CHECK(repeaterless_bound(1e-9, t) == doctest::Approx(1e-9 / (std::log(2.0) * t.slot())).epsilon(1e-8));
}

TEST_CASE("regimes") {
  const ProtocolTiming t;
  const AttemptProbabilities p = make(0.01, 0.98);
  CHECK(classify_regime(1, p, t) == Regime::Low);
  CHECK(classify_regime(3, p, t) == Regime::Low);
  CHECK(classify_regime(50, p, t) == Regime::ResetLimited);
  const auto twice = static_cast<std::int64_t>(std::ceil(2.0 * t.tau_reset / t.slot()));
  CHECK(classify_regime(twice, p, t) == Regime::ChannelLimited);

  ModelParameters m;
  m.set("loss_db", 20.0);
  const RateResult mid = transfer_rate(m.pdr(), m.polarizer(), m.cavity(), m.link(), m.timing(), 0.99);
  CHECK(mid.regime == Regime::ResetLimited);
}

TEST_CASE("lossless link runs one attempt per reset") {
  const ProtocolTiming t;
  const RateResult r = transfer_rate(make(1.0, 0.0), 1.0, t, 0.99);
  CHECK(r.rate == doctest::Approx(1.0 / (t.tau_reset + t.slot())).epsilon(1e-14));
}

TEST_CASE("rate orderings") {
  ModelParameters m;
  for (double db = 0.0; db <= 60.0; db += 2.5) {
    m.set("loss_db", db);
    double previous = INFINITY;
    for (double target : {0.95, 0.97, 0.98, 0.99}) {
      const RateResult r = transfer_rate(m.pdr(), m.polarizer(), m.cavity(), m.link(), m.timing(), target);
      CHECK(r.rate <= previous);
      CHECK(r.rate <= repeaterless_bound(m.eta_link, m.timing()) * (db == 0.0 ? INFINITY : 1.0));
      previous = r.rate;
    }
  }
}

TEST_CASE("rate falls with loss once many attempts share a reset") {
  ModelParameters m;
  double previous = INFINITY;
  for (double db = 20.0; db <= 60.0; db += 0.5) {
    m.set("loss_db", db);
    const RateResult r = transfer_rate(m.pdr(), m.polarizer(), m.cavity(), m.link(), m.timing(), 0.99);
    CHECK(r.rate <= previous);
    previous = r.rate;
  }
}

TEST_CASE("at low loss the attempt limit jumps can raise the rate") {
  // 0 -> 3 dB loses a third of the clicks; 3 -> 5 dB adds a second attempt per reset.
  ModelParameters m;
  auto rate = [&](double db) {
    m.set("loss_db", db);
    return transfer_rate(m.pdr(), m.polarizer(), m.cavity(), m.link(), m.timing(), 0.99).rate;
  };
  CHECK(rate(5.0) > rate(3.0));
}

TEST_CASE("single-polarization consistency") {
  // With H light fully reflected and no V reflection, clicks come only from V photons.
  const PdrParams pdr = PdrParams::from_powers(1.0, 0.0, 0.0, 1.0);
  const LinkParams link{0.3, 0.9, 0.0, 0.4, 0.7};
  const PolarizerParams pol{0.8, 0.1};
  const AttemptProbabilities p = attempt_probabilities(pdr, pol, link);
  CHECK(p.p_det == doctest::Approx(0.3 / 2.0 * (0.64 * 0.4 + 1.0) * 0.9).epsilon(1e-14));
}

TEST_CASE("false-herald correction lowers f0") {
  ModelParameters m;
  const double plain = single_attempt_fidelity(m.pdr(), m.polarizer(), m.cavity(), m.link(), false);
  const double corrected = single_attempt_fidelity(m.pdr(), m.polarizer(), m.cavity(), m.link(), true);
  CHECK(corrected < plain);
  CHECK(corrected > 0.5);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinlink/config.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/sweep.hpp"

using namespace spinlink;

namespace {

Axis axis(const std::string& name, double lo, double hi, std::int64_t n, Spacing s = Spacing::Linear) {
  return Axis{name, lo, hi, n, s};
}

}  // namespace

TEST_CASE("axis coordinates") {
  CHECK(axis("T_V", 0.5, 1.0, 3).coordinates() == std::vector<double>{0.5, 0.75, 1.0});
  const auto log = axis("cooperativity", 1.0, 100.0, 3, Spacing::Log).coordinates();
  CHECK(log[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(log.back() == 100.0);
  const Axis db = axis("eta_link", 0.0, 30.0, 4, Spacing::Db);
  CHECK(db.applied_value(30.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(axis("T_V", 0.9, 1.0, 1).coordinates() == std::vector<double>{0.9});
  CHECK(default_loss_axis().coordinates().size() == 121);
  CHECK_THROWS_AS(axis("T_V", 1.0, 0.5, 3).validate(), ValidationError);
  CHECK_THROWS_AS(axis("T_V", 0.5, 1.0, 0).validate(), ValidationError);
  CHECK_THROWS_AS(axis("cooperativity", 0.0, 1.0, 3, Spacing::Log).validate(), ValidationError);
  CHECK_THROWS_AS(axis("no_such_knob", 0.0, 1.0, 3).validate(), ValidationError);
}

TEST_CASE("one-cell grid equals a direct evaluation") {
  const ModelParameters base = preset_parameters("paper-design");
  SweepSpec spec;
  spec.axes = {axis("T_V", 0.99, 0.99, 1), axis("R_H", 0.15, 0.15, 1)};
  const SweepResult r = run_sweep(base, spec);
  REQUIRE(r.cell_count() == 1);
  CHECK(r.status[0] == CellStatus::Ok);
  CHECK(r.column("fidelity")[0] == transfer_fidelity(base.pdr(), base.polarizer(), base.cavity()).f_avg);
}

TEST_CASE("cells are independent of evaluation order and thread count") {
  const ModelParameters base = preset_parameters("paper-design");
  SweepSpec spec = pdr_fidelity_spec(21, 17);
  spec.threads = 1;
  const SweepResult serial = run_sweep(base, spec);
  spec.threads = 5;
  const SweepResult threaded = run_sweep(base, spec);
  CHECK(serial.values == threaded.values);
  CHECK(serial.status == threaded.status);

  // Reversed axes visit the same cells in a different order.
  SweepSpec swapped = spec;
  std::swap(swapped.axes[0], swapped.axes[1]);
  const SweepResult transposed = run_sweep(base, swapped);
  for (std::size_t cell = 0; cell < serial.cell_count(); ++cell) {
    const auto idx = serial.cell_indices(cell);
    const std::size_t other = idx[1] * serial.grids[0].size() + idx[0];
    CHECK(transposed.column("fidelity")[other] == serial.column("fidelity")[cell]);
  }
}

TEST_CASE("infeasible cells are tagged, not fatal") {
  ModelParameters base = preset_parameters("paper-design");
  base.zeta_V = 0.2;
  SweepSpec spec;
  spec.axes = {axis("T_V", 0.5, 1.0, 11)};
  const SweepResult r = run_sweep(base, spec);
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    const bool negative_rv = r.grids[0][i] + 0.2 > 1.0 + 1e-12;
    CHECK((r.status[i] == CellStatus::Invalid) == negative_rv);
    if (negative_rv) {
      CHECK(std::isnan(r.column("fidelity")[i]));
      CHECK_FALSE(r.notes[i].empty());
    }
  }

  SweepSpec rate;
  rate.axes = {axis("eta_pol_H", 0.1, 0.9, 5)};
  rate.quantity = Quantity::Rate;
  rate.f_target = 0.9999;
  const SweepResult rr = run_sweep(preset_parameters("paper-design"), rate);
  CHECK(std::count(rr.status.begin(), rr.status.end(), CellStatus::Infeasible) > 0);
}

TEST_CASE("overrides apply to every cell") {
  SweepSpec spec;
  spec.axes = {axis("T_V", 0.99, 0.99, 1)};
  spec.overrides = {{"cooperativity", 10.0}};
  ModelParameters base = preset_parameters("paper-design");
  const double got = run_sweep(base, spec).column("fidelity")[0];
  base.cooperativity = 10.0;
  CHECK(got == transfer_fidelity(base.pdr(), base.polarizer(), base.cavity()).f_avg);
}

TEST_CASE("PDR argmax approaches the continuum optimum under refinement") {
  const ModelParameters base = preset_parameters("paper-design");
  const ArgMax fine = argmax(sweep_fidelity_pdr(base, pdr_fidelity_spec(401, 401)), "fidelity");
  double previous = INFINITY;
  for (std::int64_t n : {26, 51, 101, 201}) {
    const ArgMax a = argmax(sweep_fidelity_pdr(base, pdr_fidelity_spec(n, n)), "fidelity");
    const double step_tv = 0.5 / static_cast<double>(n - 1), step_rh = 0.6 / static_cast<double>(n - 1);
    CHECK(std::abs(a.coordinates[0] - fine.coordinates[0]) <= step_tv + 1e-12);
    CHECK(std::abs(a.coordinates[1] - fine.coordinates[1]) <= step_rh + 1e-12);
    const double displacement = std::hypot(a.coordinates[0] - fine.coordinates[0],
                                           a.coordinates[1] - fine.coordinates[1]);
    CHECK(displacement <= previous + 1e-12);
    previous = displacement;
  }
}

TEST_CASE("cavity sweeps") {
  const ModelParameters base = preset_parameters("paper-design");
  const SweepResult c = sweep_fidelity_cavity(base, cooperativity_fidelity_spec());
  CHECK(c.cell_count() == 101);
  CHECK(c.grids[0].front() == doctest::Approx(0.5));
  CHECK(c.grids[0].back() == doctest::Approx(20.0));
  const SweepResult k = sweep_fidelity_cavity(base, coupling_fidelity_spec());
  CHECK(k.cell_count() == 96);
  CHECK(k.grids[0][1] - k.grids[0][0] == doctest::Approx(0.01));
  SweepSpec wrong = coupling_fidelity_spec();
  wrong.axes[0].parameter = "T_V";
  CHECK_THROWS_AS(sweep_fidelity_cavity(base, wrong), ValidationError);
}

TEST_CASE("rate curves") {
  const ModelParameters base = preset_parameters("paper-design");
  const auto curves = sweep_rate_vs_loss(base, default_loss_axis(), kDefaultConstraints, std::nullopt);
  REQUIRE(curves.size() == 4);
  const std::size_t cells = curves[0].cell_count();
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t c = 1; c < curves.size(); ++c)
      CHECK(curves[c].column("rate")[i] <= curves[c - 1].column("rate")[i]);
    CHECK(curves[0].column("bound")[i] == curves[3].column("bound")[i]);
  }
  for (const auto& curve : curves) {
    const auto& regime = curve.column("regime");
    CHECK(std::is_sorted(regime.begin(), regime.end()));
    CHECK(regime.front() == 1.0);
    CHECK(regime.back() == 3.0);
    const auto& n = curve.column("n_max");
    CHECK(std::is_sorted(n.begin(), n.end()));
  }
  const auto& g = curves[0].grids[0];
  const auto at30 = static_cast<std::size_t>(std::find(g.begin(), g.end(), 30.0) - g.begin());
  REQUIRE(at30 < g.size());
  CHECK(curves[0].column("rate")[at30] >= 1000.0);
}

TEST_CASE("rate sweep with Monte Carlo columns") {
  const ModelParameters base = preset_parameters("paper-design");
  McConfig mc;
  mc.trials = 200;
  mc.seed = 9;
  const auto curves = sweep_rate_vs_loss(base, axis("loss_db", 10.0, 20.0, 3), {0.99}, mc);
  const SweepResult& r = curves.at(0);
  for (const auto& name : quantity_columns(Quantity::Rate, true))
    CHECK(std::find(r.columns.begin(), r.columns.end(), name) != r.columns.end());
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    CHECK(r.column("mc_rate")[i] > 0.0);
    CHECK(std::abs(r.column("mc_rate")[i] - r.column("rate")[i]) <= 5.0 * r.column("mc_std_error")[i]);
  }
  const auto again = sweep_rate_vs_loss(base, axis("loss_db", 10.0, 20.0, 3), {0.99}, mc);
  CHECK(again[0].values == r.values);
}

TEST_CASE("names round-trip") {
  for (Quantity q : {Quantity::Fidelity, Quantity::Rate, Quantity::NMax, Quantity::Regime, Quantity::Bound})
    CHECK(parse_quantity(quantity_name(q)) == q);
  for (Spacing s : {Spacing::Linear, Spacing::Log, Spacing::Db}) CHECK(parse_spacing(spacing_name(s)) == s);
  CHECK_THROWS_AS(parse_quantity("speed"), ValidationError);
}

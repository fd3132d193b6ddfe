#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "shockcell/errors.hpp"
#include "shockcell/stepper.hpp"
#include "shockcell/verification.hpp"
#include "tempdir.hpp"

using namespace shockcell;

TEST_CASE("exact reference: transmitted shock into water, rarefaction back from the distal face") {
  const Scenario sc = verify_scenario(ScenarioConfig{}, 400);
  const ExactAirWaterAir ex = exact_air_water_air(sc);
  CHECK(ex.fan_a.right_kind == WaveKind::Shock);
  CHECK(ex.fan_a.left_kind == WaveKind::Shock);  // reflected from the nearly rigid water
  CHECK(ex.fan_b.left_kind == WaveKind::Rarefaction);
  CHECK(ex.fan_b.right_kind == WaveKind::Shock);
  // the water face reflects almost like a wall: p* close to the ideal-gas
  // normal reflection of the incident shock
  const double p1 = kAtmospherePa, p2 = ex.post_shock.p;
  const double g = 1.4;
  const double reflected_wall =
      p2 * ((3.0 * g - 1.0) * p2 - (g - 1.0) * p1) / ((g - 1.0) * p2 + (g + 1.0) * p1);
  CHECK(ex.fan_a.p_star == doctest::Approx(reflected_wall).epsilon(2e-3));
  CHECK(ex.fan_a.p_star ==
        doctest::Approx(oracle::star_pressure_bisection(ex.input_a.left, ex.air, ex.input_a.right, ex.water))
            .epsilon(1e-9));
  CHECK(ex.fan_b.p_star ==
        doctest::Approx(oracle::star_pressure_bisection(ex.input_b.left, ex.water, ex.input_b.right, ex.air))
            .epsilon(1e-9));
  CHECK(ex.t_a == doctest::Approx((0.010 - 0.005) / ex.shock_speed));
  CHECK(ex.t_b > ex.t_a);
  // continuity of the piecewise reference away from waves
  const PrimitiveState far = ex.at(0.039, ex.t_a);
  CHECK(far.rho == ex.ambient_air.rho);
}

TEST_CASE("verify1d needs a usable grid") {
  CHECK_THROWS_AS(verify1d(ScenarioConfig{}, 50), ConfigError);
  CHECK_THROWS_AS(converge(ScenarioConfig{}, {200}), ConfigError);
  CHECK_THROWS_AS(converge(ScenarioConfig{}, {400, 200}), ConfigError);
}

TEST_CASE("verify1d at 800 cells meets the L1 tolerance") {
  const Verify1DResult r = verify1d(ScenarioConfig{}, 800);
  REQUIRE(r.windows.size() == 4);
  CHECK(r.l1_a <= kVerifyTolerance);
  CHECK(r.l1_b <= kVerifyTolerance);
  CHECK(r.l1_pass);
  // at the arrival instants each material is still uniform; the delayed windows carry the comparison
  CHECK(r.windows[1].compared_cells > 50);
  CHECK(r.windows[3].compared_cells > 50);
  // the numeric transmitted overpressure follows the exact fan
  CHECK(r.transmitted_psi_numeric == doctest::Approx(r.transmitted_psi_exact).epsilon(0.05));
  TempDir dir("verify");
  write_verify_outputs(r, dir.path().string());
  std::ifstream in(dir.path() / "verify_summary.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["l1_pass"] == true);
  CHECK(std::filesystem::exists(dir.path() / "verify_B_6us.csv"));
}

TEST_CASE("verify1d runs at its minimum resolution") {
  const Verify1DResult r = verify1d(ScenarioConfig{}, 100);
  CHECK(std::isfinite(r.l1_a));
  CHECK(std::isfinite(r.l1_b));
}

TEST_CASE("errors against the exact solution drop under refinement") {
  const ConvergenceResult r = converge(ScenarioConfig{}, {100, 200});
  REQUIRE(r.l1_exact.size() == 2);
  CHECK(r.l1_exact[1] < r.l1_exact[0]);
  CHECK(r.decreasing);
  CHECK(std::isnan(r.order));
  REQUIRE(r.successive_diff.size() == 1);
  CHECK(std::isfinite(r.successive_diff[0]));
}

TEST_CASE("axis pressure against the planar run on a coarse grid") {
  ScenarioConfig cfg;
  cfg.grid.n_r = 40;
  cfg.grid.n_z = 80;
  cfg.t_end_us = 30.0;
  cfg.frame_times_us = {30.0};
  const Scenario sc = build_scenario(cfg);
  Stepper st(sc);
  SimulationState s = st.initial_state();
  while (s.time < 30e-6) st.advance(s, std::min(st.stable_dt(s), 30e-6 - s.time));
  std::vector<double> axis(cfg.grid.n_z);
  for (int j = 0; j < cfg.grid.n_z; ++j) axis[j] = st.pressure(s, 0, j);
  const EdgeDecay d = compare_axis_to_planar(sc, axis, 30e-6);
  CHECK(d.cells > 0);
  CHECK(d.z_front > sc.geometry.transwell.z_lo);
  CHECK(d.mean_1d > 0.0);
  CHECK(d.ratio == doctest::Approx(d.mean_2d / d.mean_1d));
  CHECK(d.z.size() == static_cast<std::size_t>(cfg.grid.n_z));
  // before anything reaches the water there is nothing to compare
  CHECK_THROWS_AS(compare_axis_to_planar(sc, axis, 1e-6), ConfigError);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "shockcell/domain.hpp"
#include "shockcell/errors.hpp"
#include "shockcell/observables.hpp"
#include "tempdir.hpp"

using namespace shockcell;

namespace {

Scenario small_scenario(bool hydrophone = false) {
  ScenarioConfig cfg;
  cfg.grid.n_r = 40;
  cfg.grid.n_z = 80;
  cfg.hydrophone.enabled = hydrophone;
  return build_scenario(cfg);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("nearest cell, ties to the lower index") {
  CHECK(nearest_cell(0.0, 0.0, 1.0, 10) == 0);
  CHECK(nearest_cell(0.5, 0.0, 1.0, 10) == 0);
  CHECK(nearest_cell(1.0, 0.0, 1.0, 10) == 0);  // equidistant from centres 0 and 1
  CHECK(nearest_cell(1.0000001, 0.0, 1.0, 10) == 1);
  CHECK(nearest_cell(2.0, 0.0, 1.0, 10) == 1);
  CHECK(nearest_cell(10.0, 0.0, 1.0, 10) == 9);
  CHECK(nearest_cell(10.5, 0.0, 1.0, 10) == -1);
  CHECK(nearest_cell(-0.1, 0.0, 1.0, 10) == -1);
  CHECK(nearest_cell(0.0185, 0.0, 1e-4, 400) == 184);
  CHECK(nearest_cell(3.0, 2.0, 0.5, 4) == 1);
}

TEST_CASE("gauges resolve to cells and flag polystyrene neighbours") {
  const Scenario sc = small_scenario(true);
  const auto specs = resolve_gauges(default_gauges(sc.config), sc.grid, sc.map);
  REQUIRE(specs.size() == 3);
  for (const auto& g : specs) {
    CHECK(g.i == nearest_cell(g.r, 0.0, sc.grid.d_r, sc.grid.n_r));
    CHECK(g.j == nearest_cell(g.z, 0.0, sc.grid.d_z, sc.grid.n_z));
    CHECK((g.irrelevant || sc.map.at(g.i, g.j) == MaterialId::Water));
  }
  // gauge 2 sits at the rod tip on the axis
  CHECK(specs[1].irrelevant);
  CHECK_FALSE(specs[0].irrelevant);
  CHECK_FALSE(specs[2].irrelevant);

  const Scenario plain = small_scenario(false);
  for (const auto& g : resolve_gauges(default_gauges(plain.config), plain.grid, plain.map)) CHECK_FALSE(g.irrelevant);

  CHECK_THROWS_AS(resolve_gauges({{"x", 0.0, 0.5}}, sc.grid, sc.map), ConfigError);
  CHECK_THROWS_AS(resolve_gauges({{"a", 0.0, 0.01}, {"a", 0.0, 0.02}}, sc.grid, sc.map), ConfigError);
  CHECK_THROWS_AS(resolve_gauges({{"", 0.0, 0.01}}, sc.grid, sc.map), ConfigError);
}

TEST_CASE("quiescent gauges read ambient pressure and zero psi") {
  const Scenario sc = small_scenario();
  Stepper st(sc);
  SimulationState s = st.initial_state();
  std::vector<GaugeSeries> series;
  for (const auto& g : resolve_gauges(default_gauges(sc.config), sc.grid, sc.map)) series.push_back({g, {}});
  record_gauges(s, st, series);
  s.time = 1e-6;
  record_gauges(s, st, series);
  for (const auto& g : series) {
    REQUIRE(g.samples.size() == 2);
    CHECK(g.samples[1].p_abs == doctest::Approx(kAtmospherePa).epsilon(1e-12));
    CHECK(std::abs(g.samples[1].p_gauge_psi) < 1e-9);
  }
  CHECK_THROWS_AS(record_gauges(s, st, series), InvalidStateError);
}

TEST_CASE("cavitation metrics") {
  const Scenario sc = small_scenario();
  Stepper st(sc);
  SimulationState s = st.initial_state();
  const Eos water = water_material().eos;
  const int nr = sc.grid.n_r, j = 30;
  REQUIRE(sc.map.at(5, j) == MaterialId::Water);
  s.at(3, j) = energy_from_primitive({1000.0, 0.0, 0.0, -5e4}, water);
  s.at(4, j) = energy_from_primitive({1000.0, 0.0, 0.0, 1000.0}, water);
  const CavitationEntry e = cavitation_metrics(s, st, 2339.0);
  CHECK(e.min_p == doctest::Approx(-5e4));
  CHECK(e.i_min == 3);
  CHECK(e.j_min == j);
  CHECK(e.below_vapor == 2);
  CHECK(e.water_cells == sc.map.count(MaterialId::Water));
  CHECK(e.mask.size() == sc.grid.cells());
  CHECK(e.mask[j * nr + 3] == 1);
  CHECK(e.mask[j * nr + 4] == 1);
  CHECK(e.mask[j * nr + 5] == 0);
  const CavitationEntry quick = water_pressure_minimum(s, st, 2339.0);
  CHECK(quick.min_p == e.min_p);
  CHECK(quick.below_vapor == e.below_vapor);
  CHECK(quick.mask.empty());
  CHECK_THROWS_AS(cavitation_metrics(s, st, 0.0), ConfigError);
}

TEST_CASE("property: cells below vapor pressure grow with the threshold") {
  const Scenario sc = small_scenario();
  Stepper st(sc);
  SimulationState s = st.initial_state();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2e5, 3e5);
  for (int j = 0; j < sc.grid.n_z; ++j)
    for (int i = 0; i < sc.grid.n_r; ++i)
      if (sc.map.at(i, j) == MaterialId::Water)
        s.at(i, j) = energy_from_primitive({1000.0, 0.0, 0.0, u(rng)}, water_material().eos);
  std::size_t prev = 0;
  for (double pv = 1.0; pv < 4e5; pv *= 1.7) {
    const CavitationEntry e = cavitation_metrics(s, st, pv);
    CHECK(e.below_vapor >= prev);
    std::size_t masked = 0;
    for (auto m : e.mask) masked += m;
    CHECK(masked == e.below_vapor);
    prev = e.below_vapor;
  }
}

TEST_CASE("frame files round-trip") {
  const Scenario sc = small_scenario(true);
  Stepper st(sc);
  SimulationState s = st.initial_state(0.005);
  st.advance(s, st.stable_dt(s));
  TempDir dir("frame");
  const FrameInfo info = write_frame(s, st, dir.path(), 7);
  CHECK(info.payload.filename() == "frame_0007.bin");
  CHECK(info.header.filename() == "frame_0007.json");
  CHECK(std::filesystem::file_size(info.payload) == 5 * sc.grid.cells() * 8);
  const FrameData f = read_frame(info.header);
  CHECK(f.grid.n_r == 40);
  CHECK(f.grid.n_z == 80);
  CHECK(f.time == s.time);
  CHECK(f.step == 1);
  for (int j = 0; j < 80; ++j)
    for (int i = 0; i < 40; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * 40 + i;
      CHECK(f.rho[k] == s.at(i, j).rho);
      CHECK(f.mom_r[k] == s.at(i, j).mom_r);
      CHECK(f.mom_z[k] == s.at(i, j).mom_z);
      CHECK(f.E[k] == s.at(i, j).E);
      CHECK(f.p[k] == st.pressure(s, i, j));
    }
  // first payload value is the density of cell (0, 0), little-endian
  const std::string bytes = slurp(info.payload);
  double first = 0.0;
  std::memcpy(&first, bytes.data(), 8);
  CHECK(first == s.at(0, 0).rho);
}

TEST_CASE("gauge CSV round-trip and exact formatting") {
  GaugeSeries g;
  g.spec.id = "1";
  g.samples = {{0.0, kAtmospherePa, 0.0}, {1.25e-6, 2e5, to_gauge_psi(2e5)}, {3.1e-5, 1.0 / 3.0, to_gauge_psi(1.0 / 3.0)}};
  TempDir dir("gauge");
  write_gauge_csv(g, dir.path() / "g.csv");
  const auto back = read_gauge_csv(dir.path() / "g.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back[k].t == g.samples[k].t * 1e6);
    CHECK(back[k].p_abs == g.samples[k].p_abs);
    CHECK(back[k].p_gauge_psi == g.samples[k].p_gauge_psi);
  }
  CHECK(slurp(dir.path() / "g.csv").rfind("t_us,p_abs_pa,p_gauge_psi\n", 0) == 0);
  CHECK_THROWS_AS(read_gauge_csv(dir.path() / "missing.csv"), IoError);
  CHECK_THROWS_AS(write_gauge_csv(g, dir.path() / "no" / "such" / "dir.csv"), IoError);
}

TEST_CASE("axis slice and material map") {
  const Scenario sc = small_scenario(true);
  Stepper st(sc);
  SimulationState s = st.initial_state();
  TempDir dir("axis");
  write_axis_slice(s, st, dir.path() / "axis.csv");
  std::ifstream in(dir.path() / "axis.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == sc.grid.n_z);
  write_material_map(sc.map, dir.path() / "m.bin");
  const std::string bytes = slurp(dir.path() / "m.bin");
  REQUIRE(bytes.size() == sc.grid.cells());
  CHECK(static_cast<int>(bytes[0]) == 0);
  CHECK(static_cast<std::size_t>(std::count(bytes.begin(), bytes.end(), char(2))) ==
        sc.map.count(MaterialId::Polystyrene));
}

TEST_CASE("observables leave the state untouched") {
  const Scenario sc = small_scenario(true);
  Stepper st(sc);
  SimulationState s = st.initial_state(0.005);
  for (int k = 0; k < 5; ++k) st.advance(s, st.stable_dt(s));
  const std::vector<ConservedState> before = s.q;
  std::vector<GaugeSeries> series;
  for (const auto& g : resolve_gauges(default_gauges(sc.config), sc.grid, sc.map)) series.push_back({g, {}});
  record_gauges(s, st, series);
  (void)cavitation_metrics(s, st, 2339.0);
  TempDir dir("noninv");
  (void)write_frame(s, st, dir.path(), 1);
  write_axis_slice(s, st, dir.path() / "a.csv");
  CHECK(s.q == before);
}

#include "shockcell/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "shockcell/errors.hpp"
#include "shockcell/stepper.hpp"

namespace shockcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Decay time of the incoming tail in the smooth-order runs.
constexpr double kSmoothTau = 20e-6;
// Coarse cells kept clear of sharp features when measuring the order.
constexpr int kSmoothBand = 8;
constexpr double kSmoothJump = 0.05;       // of the largest jump in the stretch
constexpr double kSmoothCurvature = 1e-3;

PrimitiveState axial(const NormalState& w) { return {w.rho, 0.0, w.un, w.p}; }

MaterialId material_of(const ExactAirWaterAir& ex, double z) {
  return (z >= ex.z_a && z < ex.z_b) ? MaterialId::Water : MaterialId::Air;
}

double xi_of(double z, double z0, double dt) {
  if (dt > 0.0) return (z - z0) / dt;
  return z < z0 ? -INFINITY : INFINITY;
}

struct Snapshots {
  GridSpec grid;
  MaterialMap map;
  std::vector<std::vector<PrimitiveState>> profiles;  // per requested time, per cell
};

// Runs the planar scenario and returns the primitive profile at each time.
Snapshots run_planar(const Scenario& sc, std::vector<double> times) {
  Stepper st(sc);
  SimulationState s = st.initial_state(sc.config.shock.initial_position);
  Snapshots out{sc.grid, sc.map, {}};
  std::vector<std::size_t> order(times.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
  out.profiles.resize(times.size());

  auto capture = [&](std::size_t slot) {
    auto& prof = out.profiles[slot];
    prof.resize(sc.grid.n_z);
    for (int j = 0; j < sc.grid.n_z; ++j) prof[j] = primitive_from_conserved(s.at(0, j), st.eos_at(0, j));
  };
  for (std::size_t k : order) {
    const double target = times[k];
    while (s.time < target) {
      double dt = st.stable_dt(s);
      bool lands = false;
      if (s.time + dt >= target) {
        dt = target - s.time;
        lands = true;
      } else if (s.time + 2.0 * dt > target) {
        dt = 0.5 * (target - s.time);
      }
      st.advance(s, dt);
      if (lands) s.time = target;
    }
    capture(k);
  }
  return out;
}

double distance_to(double z, const std::pair<double, double>& iv) {
  if (z < iv.first) return iv.first - z;
  if (z > iv.second) return z - iv.second;
  return 0.0;
}

ComparisonWindow make_window(const std::string& label, double t, double lo, double hi, const Snapshots& snap,
                             std::size_t slot, const ExactAirWaterAir& ex) {
  ComparisonWindow w;
  w.label = label;
  w.t = t;
  w.z_lo = lo;
  w.z_hi = hi;
  const GridSpec& g = snap.grid;
  const auto waves = ex.sharp_waves(t, g.d_z);
  for (int j = 0; j < g.n_z; ++j) {
    const double z = g.z_center(j);
    if (z < lo || z > hi) continue;
    ProfileRow row;
    row.z = z;
    row.material = snap.map.at(0, j);
    row.numeric = snap.profiles[slot][j];
    row.exact = ex.at(z, t);
    for (const auto& iv : waves)
      if (distance_to(z, iv) < kVerifyBand * g.d_z) row.excluded = true;
    w.rows.push_back(row);
  }

  double worst = 0.0;
  for (MaterialId m : {MaterialId::Air, MaterialId::Water}) {
    double lo_rho = INFINITY, hi_rho = -INFINITY, sum = 0.0;
    int n = 0;
    for (const auto& r : w.rows) {
      if (r.material != m) continue;
      lo_rho = std::min(lo_rho, r.exact.rho);
      hi_rho = std::max(hi_rho, r.exact.rho);
      if (r.excluded) continue;
      sum += std::abs(r.numeric.rho - r.exact.rho);
      ++n;
    }
    const double range = hi_rho - lo_rho;
    if (n == 0 || !(range > 0.0)) continue;
    w.compared_cells += n;
    worst = std::max(worst, sum / n / range);
  }
  w.l1 = worst;
  return w;
}

// Sum over materials of the window L1 density error (all cells) per jump scale.
double full_l1(const ComparisonWindow& w, double dz) {
  double total = 0.0;
  for (MaterialId m : {MaterialId::Air, MaterialId::Water}) {
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (const auto& r : w.rows) {
      if (r.material != m) continue;
      lo = std::min(lo, r.exact.rho);
      hi = std::max(hi, r.exact.rho);
      sum += std::abs(r.numeric.rho - r.exact.rho) * dz;
    }
    if (hi > lo) total += sum / (hi - lo);
  }
  return total;
}

std::vector<double> densities(const std::vector<PrimitiveState>& prof) {
  std::vector<double> out(prof.size());
  for (std::size_t k = 0; k < prof.size(); ++k) out[k] = prof[k].rho;
  return out;
}

std::vector<double> coarsen(const std::vector<double>& fine) {
  std::vector<double> out(fine.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (fine[2 * k] + fine[2 * k + 1]);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PrimitiveState ExactAirWaterAir::at(double z, double t) const {
  const MaterialId m = material_of(*this, z);
  if (t <= t_a) {
    if (z < z_shock0 + shock_speed * t) return post_shock;
    return m == MaterialId::Water ? ambient_water : ambient_air;
  }
  const double xa = xi_of(z, z_a, t - t_a);
  if (z < z_a) return axial(sample_fan_side(fan_a, input_a, xa, true));
  if (z < z_b) {
    if (t <= t_b) return axial(sample_fan_side(fan_a, input_a, xa, false));
    return axial(sample_fan_side(fan_b, input_b, xi_of(z, z_b, t - t_b), true));
  }
  if (t <= t_b) return ambient_air;
  return axial(sample_fan_side(fan_b, input_b, xi_of(z, z_b, t - t_b), false));
}

std::vector<std::pair<double, double>> ExactAirWaterAir::sharp_waves(double t, double min_width) const {
  std::vector<std::pair<double, double>> out;
  auto add = [&](double z0, double dt, double head, double tail, WaveKind kind) {
    const double p = z0 + head * dt, q = z0 + tail * dt;
    const std::pair<double, double> iv{std::min(p, q), std::max(p, q)};
    if (kind == WaveKind::Shock || iv.second - iv.first < min_width) out.push_back(iv);
  };
  if (t <= t_a) {
    const double zs = z_shock0 + shock_speed * t;
    out.push_back({zs, zs});
    return out;
  }
  add(z_a, t - t_a, fan_a.left_head, fan_a.left_tail, fan_a.left_kind);
  if (t <= t_b) {
    add(z_a, t - t_a, fan_a.right_head, fan_a.right_tail, fan_a.right_kind);
  } else {
    add(z_b, t - t_b, fan_b.left_head, fan_b.left_tail, fan_b.left_kind);
    add(z_b, t - t_b, fan_b.right_head, fan_b.right_tail, fan_b.right_kind);
  }
  return out;
}

Scenario verify_scenario(const ScenarioConfig& cfg, int cells) {
  if (cells < 100) throw ConfigError("verify1d needs at least 100 cells");
  ScenarioConfig c = cfg;
  c.grid.n_z = cells;
  c.hydrophone.enabled = false;
  c.shock.initial_position = kVerifyShockStart;
  c.shock.arrival_us = 0.0;
  return build_planar_scenario(c);
}

ExactAirWaterAir exact_air_water_air(const Scenario& sc) {
  if (!sc.config.shock.initial_position) throw ConfigError("exact reference needs an initial shock position");
  ExactAirWaterAir ex;
  ex.air = sc.material(MaterialId::Air).eos;
  ex.water = sc.material(MaterialId::Water).eos;
  ex.ambient_air = {sc.material(MaterialId::Air).rho_ref, 0.0, 0.0, sc.config.ambient_p};
  ex.ambient_water = {sc.material(MaterialId::Water).rho_ref, 0.0, 0.0, sc.config.ambient_p};
  const PostShock ps = post_shock_state(sc.profile.peak_overpressure, ex.ambient_air, ex.air);
  ex.post_shock = ps.state;
  ex.shock_speed = ps.shock_speed;
  ex.z_shock0 = *sc.config.shock.initial_position;
  ex.z_a = sc.geometry.transwell.z_lo;
  ex.z_b = sc.geometry.transwell.z_hi;
  ex.t_a = (ex.z_a - ex.z_shock0) / ex.shock_speed;

  ex.input_a = {{ps.state.rho, ps.state.u_z, 0.0, ps.state.p}, ex.air,
                {ex.ambient_water.rho, 0.0, 0.0, ex.ambient_water.p}, ex.water};
  ex.fan_a = exact_star(ex.input_a);
  if (ex.fan_a.right_kind != WaveKind::Shock) throw NumericalError("no transmitted shock at the proximal face", 0, 0, 0);
  ex.t_b = ex.t_a + (ex.z_b - ex.z_a) / ex.fan_a.right_head;
  ex.input_b = {{ex.fan_a.rho_star_right, ex.fan_a.u_star, 0.0, ex.fan_a.p_star}, ex.water,
                {ex.ambient_air.rho, 0.0, 0.0, ex.ambient_air.p}, ex.air};
  ex.fan_b = exact_star(ex.input_b);
  return ex;
}

Verify1DResult verify1d(const ScenarioConfig& cfg, int cells) {
  const Scenario sc = verify_scenario(cfg, cells);
  Verify1DResult res;
  res.cells = cells;
  res.exact = exact_air_water_air(sc);
  const ExactAirWaterAir& ex = res.exact;

  const std::vector<double> times{ex.t_a, ex.t_a + kVerifyDelay, ex.t_b, ex.t_b + kVerifyDelay};
  const Snapshots snap = run_planar(sc, times);
  const double pad = 0.005;
  res.windows.push_back(make_window("A", times[0], ex.z_a - pad, ex.z_b, snap, 0, ex));
  res.windows.push_back(make_window("A+6us", times[1], ex.z_a - pad, ex.z_b, snap, 1, ex));
  res.windows.push_back(make_window("B", times[2], ex.z_a, ex.z_b + pad, snap, 2, ex));
  res.windows.push_back(make_window("B+6us", times[3], ex.z_a, ex.z_b + pad, snap, 3, ex));
  res.l1_a = res.windows[1].l1;
  res.l1_b = res.windows[3].l1;
  res.l1_pass = res.l1_a <= kVerifyTolerance && res.l1_b <= kVerifyTolerance;

  res.transmitted_psi_exact = (ex.fan_b.p_star - ex.ambient_air.p) / kPaPerPsi;
  const double front = ex.z_b + ex.fan_b.right_head * kVerifyDelay;
  double sum = 0.0;
  int n = 0;
  for (const auto& r : res.windows[3].rows)
    if (r.material == MaterialId::Air && r.z > ex.z_b && r.z < front && !r.excluded) {
      sum += r.numeric.p;
      ++n;
    }
  res.transmitted_psi_numeric = n > 0 ? (sum / n - ex.ambient_air.p) / kPaPerPsi : NAN;
  res.transmitted_pass =
      std::abs(res.transmitted_psi_numeric - kReferenceTransmittedPsi) <= kTransmittedRelTol * kReferenceTransmittedPsi;
  return res;
}

void write_verify_outputs(const Verify1DResult& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  json windows = json::array();
  for (const auto& w : r.windows) {
    std::string name = w.label;
    std::replace(name.begin(), name.end(), '+', '_');
    const fs::path path = fs::path(dir) / ("verify_" + name + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "z_m,material,rho_num,rho_exact,u_num,u_exact,p_num,p_exact,excluded\n";
    for (const auto& row : w.rows)
      out << fmt(row.z) << ',' << static_cast<int>(row.material) << ',' << fmt(row.numeric.rho) << ','
          << fmt(row.exact.rho) << ',' << fmt(row.numeric.u_z) << ',' << fmt(row.exact.u_z) << ','
          << fmt(row.numeric.p) << ',' << fmt(row.exact.p) << ',' << (row.excluded ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
    windows.push_back({{"label", w.label}, {"t_us", w.t * 1e6}, {"z_lo", w.z_lo}, {"z_hi", w.z_hi},
                       {"l1_rel", w.l1}, {"compared_cells", w.compared_cells}, {"file", path.filename().string()}});
  }
  const auto& ex = r.exact;
  json j;
  j["cells"] = r.cells;
  j["tolerance"] = kVerifyTolerance;
  j["band_cells"] = kVerifyBand;
  j["l1_a"] = r.l1_a;
  j["l1_b"] = r.l1_b;
  j["l1_pass"] = r.l1_pass;
  j["transmitted_psi_exact"] = r.transmitted_psi_exact;
  j["transmitted_psi_numeric"] = r.transmitted_psi_numeric;
  j["transmitted_psi_reference"] = kReferenceTransmittedPsi;
  j["transmitted_pass"] = r.transmitted_pass;
  j["t_a_us"] = ex.t_a * 1e6;
  j["t_b_us"] = ex.t_b * 1e6;
  j["fan_a"] = {{"p_star", ex.fan_a.p_star}, {"u_star", ex.fan_a.u_star}};
  j["fan_b"] = {{"p_star", ex.fan_b.p_star}, {"u_star", ex.fan_b.u_star},
                {"reflected", ex.fan_b.left_kind == WaveKind::Shock ? "shock" : "rarefaction"}};
  j["windows"] = windows;
  std::ofstream out(fs::path(dir) / "verify_summary.json", std::ios::trunc);
  if (!out) throw IoError("cannot write verify_summary.json in " + dir);
  out << j.dump(2) << "\n";
}

ConvergenceResult converge(const ScenarioConfig& cfg, const std::vector<int>& cells) {
  if (cells.size() < 2) throw ConfigError("convergence needs at least two resolutions");
  for (std::size_t k = 1; k < cells.size(); ++k)
    if (cells[k] <= cells[k - 1]) throw ConfigError("resolutions must increase");
  ConvergenceResult res;
  res.cells = cells;
  std::vector<std::vector<double>> rho;
  for (int n : cells) {
    const Scenario sc = verify_scenario(cfg, n);
    const ExactAirWaterAir ex = exact_air_water_air(sc);
    const double t = ex.t_b + kVerifyDelay;
    const Snapshots snap = run_planar(sc, {t});
    ComparisonWindow w = make_window("B+6us", t, ex.z_a, ex.z_b + 0.005, snap, 0, ex);
    res.l1_exact.push_back(full_l1(w, sc.grid.d_z));
    res.profiles.push_back(std::move(w));
    rho.push_back(densities(snap.profiles[0]));
  }
  res.decreasing = true;
  for (std::size_t k = 1; k < res.l1_exact.size(); ++k)
    if (!(res.l1_exact[k] < res.l1_exact[k - 1])) res.decreasing = false;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (cells[k] != 2 * cells[k - 1]) {
      res.successive_diff.push_back(NAN);
      continue;
    }
    const auto c = coarsen(rho[k]);
    const double dz = (cfg.grid.z_max - cfg.grid.z_min) / cells[k - 1];
    double sum = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) sum += std::abs(c[j] - rho[k - 1][j]) * dz;
    res.successive_diff.push_back(sum);
  }
  const std::size_t m = cells.size();
  res.order = res.order_air = res.order_water = NAN;
  if (m >= 3 && cells[m - 1] == 2 * cells[m - 2] && cells[m - 2] == 2 * cells[m - 3]) {
    const SmoothOrder so = smooth_order(cfg, cells[m - 3]);
    res.order = so.total;
    res.order_air = so.air;
    res.order_water = so.water;
    res.order_cells = so.cells;
  }
  return res;
}

SmoothOrder smooth_order(const ScenarioConfig& cfg, int coarse_cells) {
  ScenarioConfig c = cfg;
  c.shock.profile = ProfileKind::StepExponential;
  c.shock.tau_us = kSmoothTau * 1e6;

  std::vector<std::vector<double>> rho;
  MaterialMap fine_map;
  double t = 0.0;
  for (int level = 0; level < 3; ++level) {
    const Scenario sc = verify_scenario(c, coarse_cells << level);
    if (level == 0) {
      const ExactAirWaterAir ex = exact_air_water_air(verify_scenario(cfg, coarse_cells));
      t = ex.t_b + kVerifyDelay;
    }
    rho.push_back(densities(run_planar(sc, {t}).profiles[0]));
    fine_map = sc.map;
  }

  // Sharp features located on the finest run, per stretch of one material:
  // jumps well above the local smooth variation, grid-scale wiggles such as
  // start-up errors, plus every material edge.
  const auto& f = rho[2];
  const int nf = static_cast<int>(f.size());
  std::vector<char> sharp(nf, 0);
  for (int a = 0; a < nf;) {
    int b = a;
    while (b + 1 < nf && fine_map.at(0, b + 1) == fine_map.at(0, a)) ++b;
    double dmax = 0.0;
    for (int k = a; k < b; ++k) dmax = std::max(dmax, std::abs(f[k + 1] - f[k]));
    for (int k = a; k < b; ++k)
      if (std::abs(f[k + 1] - f[k]) > kSmoothJump * dmax) sharp[k] = sharp[k + 1] = 1;
    for (int k = a + 1; k < b; ++k)
      if (std::abs(f[k + 1] - 2.0 * f[k] + f[k - 1]) > kSmoothCurvature * dmax) sharp[k - 1] = sharp[k] = sharp[k + 1] = 1;
    if (b + 1 < nf) sharp[b] = sharp[b + 1] = 1;
    a = b + 1;
  }
  sharp[0] = sharp[nf - 1] = 1;

  const int nc = coarse_cells;
  std::vector<char> keep(nc, 1);
  for (int k = 0; k < nf; ++k) {
    if (!sharp[k]) continue;
    const int kc = k / 4;
    for (int d = -kSmoothBand; d <= kSmoothBand; ++d)
      if (kc + d >= 0 && kc + d < nc) keep[kc + d] = 0;
  }

  const auto mid = coarsen(rho[1]);
  const auto fine_on_mid = coarsen(rho[2]);
  double e1[2] = {0.0, 0.0}, e2[2] = {0.0, 0.0};
  SmoothOrder so;
  for (int k = 0; k < nc; ++k) {
    if (!keep[k]) continue;
    const int w = fine_map.at(0, 4 * k) == MaterialId::Water ? 1 : 0;
    e1[w] += std::abs(mid[k] - rho[0][k]);
    e2[w] += 0.5 * (std::abs(fine_on_mid[2 * k] - rho[1][2 * k]) + std::abs(fine_on_mid[2 * k + 1] - rho[1][2 * k + 1]));
    ++so.cells;
  }
  auto order = [](double a, double b) { return a > 0.0 && b > 0.0 ? std::log2(a / b) : NAN; };
  so.total = order(e1[0] + e1[1], e2[0] + e2[1]);
  so.air = order(e1[0], e2[0]);
  so.water = order(e1[1], e2[1]);
  return so;
}

void write_convergence_outputs(const ConvergenceResult& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  json j;
  j["cells"] = r.cells;
  j["l1_exact"] = r.l1_exact;
  json diffs = json::array();
  for (double d : r.successive_diff) diffs.push_back(std::isfinite(d) ? json(d) : json(nullptr));
  j["successive_diff"] = diffs;
  j["decreasing"] = r.decreasing;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["order"] = num(r.order);
  j["order_air"] = num(r.order_air);
  j["order_water"] = num(r.order_water);
  j["order_cells"] = r.order_cells;
  for (std::size_t k = 0; k < r.profiles.size(); ++k) {
    const fs::path path = fs::path(dir) / ("converge_" + std::to_string(r.cells[k]) + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "z_m,material,rho_num,rho_exact,p_num,p_exact\n";
    for (const auto& row : r.profiles[k].rows)
      out << fmt(row.z) << ',' << static_cast<int>(row.material) << ',' << fmt(row.numeric.rho) << ','
          << fmt(row.exact.rho) << ',' << fmt(row.numeric.p) << ',' << fmt(row.exact.p) << '\n';
  }
  std::ofstream out(fs::path(dir) / "converge_summary.json", std::ios::trunc);
  if (!out) throw IoError("cannot write converge_summary.json in " + dir);
  out << j.dump(2) << "\n";
}

EdgeDecay compare_axis_to_planar(const Scenario& sc2d, const std::vector<double>& axis_p, double t) {
  const int nz = sc2d.grid.n_z;
  if (static_cast<int>(axis_p.size()) != nz) throw ConfigError("axis profile does not match the grid");
  const Scenario planar = build_planar_scenario(sc2d.config);
  const Snapshots snap = run_planar(planar, {t});
  const auto& prof = snap.profiles[0];
  const double amb = sc2d.config.ambient_p;

  EdgeDecay d;
  d.t = t;
  auto water = [&](int j) { return planar.map.at(0, j) == MaterialId::Water; };
  double peak = 0.0;
  for (int j = 0; j < nz; ++j)
    if (water(j)) peak = std::max(peak, prof[j].p - amb);
  if (!(peak > 0.0)) throw ConfigError("no transmitted shock in the water at the comparison time");
  int front = -1;
  for (int j = nz - 1; j >= 0 && front < 0; --j)
    if (water(j) && prof[j].p - amb > 0.5 * peak) front = j;
  d.z_front = sc2d.grid.z_center(front);

  double s2 = 0.0, s1 = 0.0;
  for (int j = 0; j < nz; ++j) {
    d.z.push_back(sc2d.grid.z_center(j));
    d.p_2d.push_back(axis_p[j]);
    d.p_1d.push_back(prof[j].p);
    if (!water(j) || sc2d.map.at(0, j) != MaterialId::Water || j > front - kVerifyBand) continue;
    s2 += axis_p[j] - amb;
    s1 += prof[j].p - amb;
    ++d.cells;
  }
  if (d.cells == 0) throw ConfigError("the transmitted shock has not cleared the comparison band");
  d.mean_2d = s2 / d.cells;
  d.mean_1d = s1 / d.cells;
  d.ratio = d.mean_2d / d.mean_1d;
  return d;
}

void write_edge_decay(const EdgeDecay& d, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "z_m,p_axis_2d_pa,p_planar_pa\n";
  for (std::size_t k = 0; k < d.z.size(); ++k) out << fmt(d.z[k]) << ',' << fmt(d.p_2d[k]) << ',' << fmt(d.p_1d[k]) << '\n';
}

}  // namespace shockcell

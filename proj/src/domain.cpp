#include "shockcell/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shockcell/errors.hpp"

namespace shockcell {

namespace {

int snap_index(double x, double origin, double d) { return static_cast<int>(std::lround((x - origin) / d)); }

ShockProfile make_profile(const ScenarioConfig& cfg) {
  ShockProfile p;
  p.peak_overpressure = cfg.shock.peak_psi * kPaPerPsi;
  p.kind = cfg.shock.profile;
  p.tau = cfg.shock.tau_us * 1e-6;
  p.arrival = cfg.shock.arrival_us * 1e-6;
  p.ambient = {cfg.air.rho_ref, 0.0, 0.0, cfg.ambient_p};
  return p;
}

std::array<MaterialParams, kMaterialCount> material_table(const ScenarioConfig& cfg) {
  return {cfg.air, cfg.water, cfg.polystyrene};
}

void check_transwell_fits(const ScenarioConfig& cfg) {
  const auto& tw = cfg.transwell;
  const auto& g = cfg.grid;
  if (!(tw.radius > 0.0)) throw ConfigError("transwell.radius must be > 0");
  if (!(tw.length > 0.0)) throw ConfigError("transwell.length must be > 0");
  if (!(tw.z_start > g.z_min && tw.z_start + tw.length < g.z_max))
    throw ConfigError("transwell does not fit axially inside the domain");
}

}  // namespace

void GridSpec::validate(int min_r) const {
  if (n_r < min_r) throw ConfigError("grid.n_r must be >= " + std::to_string(min_r));
  if (n_z < 4) throw ConfigError("grid.n_z must be >= 4");
  if (!(d_r > 0.0) || !(d_z > 0.0)) throw ConfigError("grid spacings must be positive");
}

std::size_t MaterialMap::count(MaterialId id) const {
  return static_cast<std::size_t>(std::count(ids_.begin(), ids_.end(), id));
}

double ShockProfile::overpressure_at(double t) const {
  if (t < arrival) return 0.0;
  if (kind == ProfileKind::StepExponential) return peak_overpressure * std::exp(-(t - arrival) / tau);
  return peak_overpressure;
}

PostShock post_shock_state(double overpressure, const PrimitiveState& ambient, const Eos& air) {
  const double g = air.gamma;
  const double big_p1 = ambient.p + air.p_inf;
  const double ratio = (big_p1 + overpressure) / big_p1;
  const double mu = (g - 1.0) / (g + 1.0);
  const double c1 = std::sqrt(g * big_p1 / ambient.rho);
  PostShock out;
  out.mach = std::sqrt((g + 1.0) / (2.0 * g) * (ratio - 1.0) + 1.0);
  out.shock_speed = ambient.u_z + out.mach * c1;
  const double rho2 = ambient.rho * (ratio + mu) / (mu * ratio + 1.0);
  // Mass flux through the shock: rho1 (S - u1) = rho2 (S - u2).
  const double u2 = out.shock_speed - ambient.rho * (out.shock_speed - ambient.u_z) / rho2;
  out.state = {rho2, 0.0, u2, ambient.p + overpressure};
  return out;
}

PrimitiveState inflow_state_from_overpressure(const ShockProfile& profile, const MaterialParams& air) {
  return post_shock_state(profile.peak_overpressure, profile.ambient, air.eos).state;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  check_transwell_fits(cfg);
  const auto& gc = cfg.grid;
  if (!(gc.r_max > 0.0) || !(gc.z_max > gc.z_min)) throw ConfigError("grid extents are empty");

  Scenario s;
  s.config = cfg;
  s.grid = {gc.n_r, gc.n_z, gc.r_max / gc.n_r, (gc.z_max - gc.z_min) / gc.n_z, gc.z_min};
  s.grid.validate(4);
  s.materials = material_table(cfg);
  s.profile = make_profile(cfg);

  const GridSpec& g = s.grid;
  ScenarioGeometry& geo = s.geometry;
  geo.r_max = gc.r_max;
  geo.z_min = gc.z_min;
  geo.z_max = gc.z_max;

  const auto& tw = cfg.transwell;
  if (!(tw.radius < gc.r_max)) throw ConfigError("transwell does not fit radially inside the domain");
  SnappedBox& box = geo.transwell;
  box.i0 = 0;
  box.i1 = snap_index(tw.radius, 0.0, g.d_r);
  box.j0 = snap_index(tw.z_start, g.z_origin, g.d_z);
  box.j1 = snap_index(tw.z_start + tw.length, g.z_origin, g.d_z);
  if (box.i1 < 1 || box.j1 <= box.j0)
    throw ConfigError("transwell is too small to be resolved by the grid");
  if (box.i1 >= g.n_r || box.j0 < 1 || box.j1 >= g.n_z)
    throw ConfigError("snapped transwell touches the domain boundary");
  box.r_lo = 0.0;
  box.r_hi = box.i1 * g.d_r;
  box.z_lo = g.z_origin + box.j0 * g.d_z;
  box.z_hi = g.z_origin + box.j1 * g.d_z;
  geo.max_snap_displacement = std::max({std::abs(box.r_hi - tw.radius), std::abs(box.z_lo - tw.z_start),
                                        std::abs(box.z_hi - (tw.z_start + tw.length))});

  s.map = MaterialMap(g.n_r, g.n_z, MaterialId::Air);
  for (int j = box.j0; j < box.j1; ++j)
    for (int i = box.i0; i < box.i1; ++i) s.map.set(i, j, MaterialId::Water);

  const auto& hy = cfg.hydrophone;
  geo.hydrophone = hy.enabled;
  if (hy.enabled) {
    if (!(hy.radius > 0.0)) throw ConfigError("hydrophone.radius must be > 0");
    const double z_tip = hy.z_tip.value_or(tw.z_start + 0.5 * tw.length);
    const double z_end = hy.z_end.value_or(tw.z_start + tw.length);
    SnappedBox& rod = geo.rod;
    rod.i0 = 0;
    rod.i1 = snap_index(hy.radius, 0.0, g.d_r);
    rod.j0 = snap_index(z_tip, g.z_origin, g.d_z);
    rod.j1 = snap_index(z_end, g.z_origin, g.d_z);
    if (rod.i1 < 2) throw ConfigError("grid too coarse: hydrophone radius needs at least 2 cells");
    if (rod.j1 <= rod.j0) throw ConfigError("hydrophone axial extent is empty after snapping");
    if (rod.i1 >= box.i1 || rod.j0 < box.j0 || rod.j1 > box.j1)
      throw ConfigError("hydrophone must lie inside the transwell water region");
    rod.r_hi = rod.i1 * g.d_r;
    rod.z_lo = g.z_origin + rod.j0 * g.d_z;
    rod.z_hi = g.z_origin + rod.j1 * g.d_z;
    geo.max_snap_displacement = std::max({geo.max_snap_displacement, std::abs(rod.r_hi - hy.radius),
                                          std::abs(rod.z_lo - z_tip), std::abs(rod.z_hi - z_end)});
    for (int j = rod.j0; j < rod.j1; ++j)
      for (int i = rod.i0; i < rod.i1; ++i) s.map.set(i, j, MaterialId::Polystyrene);
  }

  if (cfg.shock.initial_position) {
    const double zs = *cfg.shock.initial_position;
    if (!(zs > gc.z_min && zs < box.z_lo)) throw ConfigError("shock.initial_position must lie in the air ahead of the transwell");
  }
  return s;
}

Scenario build_planar_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  check_transwell_fits(cfg);
  const auto& gc = cfg.grid;
  if (!(gc.r_max > 0.0) || !(gc.z_max > gc.z_min)) throw ConfigError("grid extents are empty");

  Scenario s;
  s.config = cfg;
  s.planar = true;
  s.grid = {1, gc.n_z, gc.r_max, (gc.z_max - gc.z_min) / gc.n_z, gc.z_min};
  s.grid.validate(1);
  s.materials = material_table(cfg);
  s.profile = make_profile(cfg);
  s.boundaries = {BoundaryKind::Wall, BoundaryKind::Wall, BoundaryKind::Inflow, BoundaryKind::Extrapolate};
  s.config.numerics.transverse = TransverseMode::None;
  s.config.numerics.source_terms = false;

  const GridSpec& g = s.grid;
  ScenarioGeometry& geo = s.geometry;
  geo.r_max = gc.r_max;
  geo.z_min = gc.z_min;
  geo.z_max = gc.z_max;
  const auto& tw = cfg.transwell;
  SnappedBox& box = geo.transwell;
  box.i1 = 1;
  box.j0 = snap_index(tw.z_start, g.z_origin, g.d_z);
  box.j1 = snap_index(tw.z_start + tw.length, g.z_origin, g.d_z);
  if (box.j1 <= box.j0) throw ConfigError("transwell is too small to be resolved by the grid");
  if (box.j0 < 1 || box.j1 >= g.n_z) throw ConfigError("snapped transwell touches the domain boundary");
  box.r_hi = g.d_r;
  box.z_lo = g.z_origin + box.j0 * g.d_z;
  box.z_hi = g.z_origin + box.j1 * g.d_z;
  geo.max_snap_displacement =
      std::max(std::abs(box.z_lo - tw.z_start), std::abs(box.z_hi - (tw.z_start + tw.length)));

  s.map = MaterialMap(1, g.n_z, MaterialId::Air);
  for (int j = box.j0; j < box.j1; ++j) s.map.set(0, j, MaterialId::Water);

  const auto& hy = cfg.hydrophone;
  geo.hydrophone = hy.enabled;
  if (hy.enabled) {
    const double z_tip = hy.z_tip.value_or(tw.z_start + 0.5 * tw.length);
    const double z_end = hy.z_end.value_or(tw.z_start + tw.length);
    SnappedBox& rod = geo.rod;
    rod.i1 = 1;
    rod.j0 = snap_index(z_tip, g.z_origin, g.d_z);
    rod.j1 = snap_index(z_end, g.z_origin, g.d_z);
    if (rod.j1 <= rod.j0 || rod.j0 < box.j0 || rod.j1 > box.j1)
      throw ConfigError("hydrophone must lie inside the transwell water region");
    rod.r_hi = g.d_r;
    rod.z_lo = g.z_origin + rod.j0 * g.d_z;
    rod.z_hi = g.z_origin + rod.j1 * g.d_z;
    for (int j = rod.j0; j < rod.j1; ++j) s.map.set(0, j, MaterialId::Polystyrene);
  }
  if (cfg.shock.initial_position) {
    const double zs = *cfg.shock.initial_position;
    if (!(zs > gc.z_min && zs < box.z_lo)) throw ConfigError("shock.initial_position must lie in the air ahead of the transwell");
  }
  return s;
}

}  // namespace shockcell

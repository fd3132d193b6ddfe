#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shockcell/config.hpp"
#include "shockcell/eos.hpp"

namespace shockcell {

/// Cell-centred grid in (r, z): r_i = (i + 1/2) d_r, z_j = z_origin + (j + 1/2) d_z.
struct GridSpec {
  int n_r = 0;
  int n_z = 0;
  double d_r = 0.0;
  double d_z = 0.0;
  double z_origin = 0.0;

  double r_center(int i) const { return (i + 0.5) * d_r; }
  double z_center(int j) const { return z_origin + (j + 0.5) * d_z; }
  std::size_t cells() const { return static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_z); }

  /// Throws ConfigError. `min_r` is 4 for 2D grids and 1 for planar runs.
  void validate(int min_r = 4) const;
};

enum class MaterialId : std::uint8_t { Air = 0, Water = 1, Polystyrene = 2 };
inline constexpr int kMaterialCount = 3;

/// Per-cell material, radial index fastest. Immutable once built.
class MaterialMap {
public:
  MaterialMap() = default;
  MaterialMap(int n_r, int n_z, MaterialId fill)
      : n_r_(n_r), n_z_(n_z), ids_(static_cast<std::size_t>(n_r) * n_z, fill) {}

  int n_r() const { return n_r_; }
  int n_z() const { return n_z_; }
  MaterialId at(int i, int j) const { return ids_[static_cast<std::size_t>(j) * n_r_ + i]; }
  void set(int i, int j, MaterialId id) { ids_[static_cast<std::size_t>(j) * n_r_ + i] = id; }
  std::size_t count(MaterialId id) const;
  const std::vector<MaterialId>& raw() const { return ids_; }

  bool operator==(const MaterialMap&) const = default;

private:
  int n_r_ = 0;
  int n_z_ = 0;
  std::vector<MaterialId> ids_;
};

/// Cell-index box [i0, i1) x [j0, j1) plus the physical extents it was snapped from.
struct SnappedBox {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  double r_lo = 0.0, r_hi = 0.0, z_lo = 0.0, z_hi = 0.0;  // snapped coordinates
};

struct ScenarioGeometry {
  double r_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  SnappedBox transwell;
  bool hydrophone = false;
  SnappedBox rod;
  double max_snap_displacement = 0.0;  // largest interface move caused by snapping, m
};

struct ShockProfile {
  double peak_overpressure = 0.0;  // Pa
  ProfileKind kind = ProfileKind::StepHold;
  double tau = 0.0;      // s
  double arrival = 0.0;  // s, time the shock enters through the inflow face
  PrimitiveState ambient;

  /// Overpressure of the incoming air at time t (0 before arrival).
  double overpressure_at(double t) const;
};

struct PostShock {
  PrimitiveState state;  // u_z > 0, u_r = 0
  double shock_speed = 0.0;
  double mach = 1.0;
};

/// Rankine-Hugoniot post-shock air for a right-going shock running into
/// `ambient` with the given overpressure.
PostShock post_shock_state(double overpressure, const PrimitiveState& ambient, const Eos& air);

/// Post-shock state for the profile peak.
PrimitiveState inflow_state_from_overpressure(const ShockProfile& profile, const MaterialParams& air);

enum class BoundaryKind { Wall, Extrapolate, Inflow };

struct BoundarySet {
  BoundaryKind r_lo = BoundaryKind::Wall;  // the symmetry axis
  BoundaryKind r_hi = BoundaryKind::Extrapolate;
  BoundaryKind z_lo = BoundaryKind::Inflow;
  BoundaryKind z_hi = BoundaryKind::Extrapolate;
};

struct Scenario {
  ScenarioConfig config;
  GridSpec grid;
  MaterialMap map;
  ScenarioGeometry geometry;
  std::array<MaterialParams, kMaterialCount> materials;
  ShockProfile profile;
  BoundarySet boundaries;
  bool planar = false;  // one radial cell, no transverse or source terms

  const MaterialParams& material(MaterialId id) const { return materials[static_cast<int>(id)]; }
};

/// Axisymmetric transwell scenario (optionally with the hydrophone rod).
Scenario build_scenario(const ScenarioConfig& cfg);

/// The axial cross-section of the same scenario as a one-dimensional run:
/// n_r = 1, transverse and source terms disabled.
Scenario build_planar_scenario(const ScenarioConfig& cfg);

}  // namespace shockcell

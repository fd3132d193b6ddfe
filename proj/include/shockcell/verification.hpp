#pragma once

// One-dimensional air|water|air verification against the exact solution made
// of two Riemann fans: A where the incoming shock meets the proximal water
// face, B where the transmitted shock reaches the distal face.

#include <cmath>
#include <string>
#include <vector>

#include "shockcell/domain.hpp"
#include "shockcell/riemann.hpp"

namespace shockcell {

inline constexpr double kVerifyShockStart = 0.005;  // m, initial shock position
inline constexpr double kVerifyDelay = 6e-6;        // s, after each arrival
inline constexpr double kVerifyBand = 5.0;          // cells excluded on each side of a shock
inline constexpr double kVerifyTolerance = 0.01;    // L1 error / jump scale

/// The exact reference for the planar problem.
struct ExactAirWaterAir {
  Eos air, water;
  PrimitiveState ambient_air, ambient_water, post_shock;
  double shock_speed = 0.0;
  double z_shock0 = 0.0;  // incident shock position at t = 0
  double z_a = 0.0;       // proximal water face
  double z_b = 0.0;       // distal water face
  double t_a = 0.0;
  double t_b = 0.0;
  RiemannInput input_a, input_b;
  RiemannFan fan_a, fan_b;

  /// Exact state at (z, t) for the fixed material layout.
  PrimitiveState at(double z, double t) const;
  /// Positions of shocks and fans narrower than `min_width` at time t.
  std::vector<std::pair<double, double>> sharp_waves(double t, double min_width) const;
};

ExactAirWaterAir exact_air_water_air(const Scenario& planar);

/// Planar scenario used by verify1d: the configured materials and transwell,
/// `cells` axial cells, the shock starting at kVerifyShockStart.
Scenario verify_scenario(const ScenarioConfig& cfg, int cells);

struct ProfileRow {
  double z = 0.0;
  MaterialId material = MaterialId::Air;
  PrimitiveState numeric, exact;
  bool excluded = false;
};

struct ComparisonWindow {
  std::string label;  // A, A+6us, B, B+6us
  double t = 0.0;
  double z_lo = 0.0, z_hi = 0.0;
  std::vector<ProfileRow> rows;
  double l1 = 0.0;  // largest per-material L1 density error / jump scale
  int compared_cells = 0;
};

struct Verify1DResult {
  int cells = 0;
  ExactAirWaterAir exact;
  std::vector<ComparisonWindow> windows;
  double l1_a = 0.0;  // at A+6us
  double l1_b = 0.0;  // at B+6us
  double transmitted_psi_exact = 0.0;
  double transmitted_psi_numeric = 0.0;
  bool l1_pass = false;
  bool transmitted_pass = false;  // within 30% of 0.013 psi
};

inline constexpr double kReferenceTransmittedPsi = 0.013;
inline constexpr double kTransmittedRelTol = 0.30;

Verify1DResult verify1d(const ScenarioConfig& cfg, int cells);

/// Writes verify_<label>.csv per window and verify_summary.json.
void write_verify_outputs(const Verify1DResult& r, const std::string& dir);

struct ConvergenceResult {
  std::vector<int> cells;
  std::vector<double> l1_exact;  // at B+6us against the exact fans
  std::vector<double> successive_diff;  // L1 density difference N vs 2N, on the coarse grid
  bool decreasing = false;
  double order = 0.0;  // Richardson estimate in smooth regions (three finest runs)
  double order_air = 0.0;
  double order_water = 0.0;
  int order_cells = 0;  // coarse cells that entered the estimate
  std::vector<ComparisonWindow> profiles;
};

/// Resolutions must be increasing; order needs three runs doubling each time.
ConvergenceResult converge(const ScenarioConfig& cfg, const std::vector<int>& cells);

struct SmoothOrder {
  double total = NAN;
  double air = NAN;    // same estimate restricted to air cells
  double water = NAN;
  int cells = 0;
};

/// Richardson order from three successively doubled runs of a problem with a
/// smooth decaying tail; differences are taken away from every sharp feature.
SmoothOrder smooth_order(const ScenarioConfig& cfg, int coarse_cells);

void write_convergence_outputs(const ConvergenceResult& r, const std::string& dir);

/// Axis pressure of the 2D run against the planar run with the same axial
/// grid, materials and inflow, over the water between the proximal face and
/// the planar transmitted front.
struct EdgeDecay {
  double t = 0.0;
  double z_front = 0.0;  // planar transmitted shock, m
  double mean_2d = 0.0;  // mean overpressure over the window, Pa
  double mean_1d = 0.0;
  double ratio = 0.0;    // mean_2d / mean_1d
  int cells = 0;
  std::vector<double> z, p_2d, p_1d;  // whole axis, absolute Pa
};

inline constexpr double kEdgeDecayRatio = 0.9;  // ratio below this counts as decay
inline constexpr double kEdgeDecayTime = 30e-6;  // s, first frame after the shock enters the water

/// `axis_p` holds the pressure in the axis cells (i = 0) of the 2D run at `t`.
EdgeDecay compare_axis_to_planar(const Scenario& sc2d, const std::vector<double>& axis_p, double t);

void write_edge_decay(const EdgeDecay& d, const std::string& path);

}  // namespace shockcell

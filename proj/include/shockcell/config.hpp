#pragma once

// Run configuration. Every field has a default; a JSON document only needs to
// carry the values it changes. Lengths in metres, times in the unit named by
// the field suffix.

#include <optional>
#include <string>
#include <vector>

#include "shockcell/eos.hpp"

namespace shockcell {

enum class ProfileKind { StepHold, StepExponential };
enum class LimiterKind { None, MonotonizedCentral };
enum class TransverseMode { None, Increment, Full };
enum class Splitting { Godunov, Strang };

struct GridConfig {
  int n_r = 200;
  int n_z = 400;
  double r_max = 0.02;
  double z_min = 0.0;
  double z_max = 0.04;
};

struct TranswellConfig {
  double z_start = 0.010;
  double length = 0.017;
  double radius = 0.0085;
};

struct HydrophoneConfig {
  bool enabled = false;
  double radius = 0.001425;
  // Rod occupies [z_tip, z_end] on the axis; unset means mid-plane and the
  // distal face of the transwell.
  std::optional<double> z_tip;
  std::optional<double> z_end;
};

struct ShockConfig {
  double peak_psi = 13.0;
  ProfileKind profile = ProfileKind::StepHold;
  double tau_us = 3000.0;  // decay constant of the exponential tail
  double arrival_us = 0.0;
  // When set, the shock starts as a discontinuity at this z instead of
  // entering through the inflow boundary.
  std::optional<double> initial_position;
};

struct NumericsConfig {
  double cfl = 0.45;
  LimiterKind limiter = LimiterKind::MonotonizedCentral;
  TransverseMode transverse = TransverseMode::Full;
  bool source_terms = true;
  Splitting splitting = Splitting::Godunov;
  int threads = 1;
};

struct GaugeConfig {
  std::string id;
  double r = 0.0;
  double z = 0.0;
};

struct ScenarioConfig {
  GridConfig grid;
  MaterialParams air = air_material();
  MaterialParams water = water_material();
  MaterialParams polystyrene = polystyrene_material();
  double ambient_p = kAtmospherePa;
  TranswellConfig transwell;
  HydrophoneConfig hydrophone;
  ShockConfig shock;
  NumericsConfig numerics;
  double t_end_us = 134.4;
  std::vector<double> frame_times_us{30.0, 60.0, 63.2, 69.6, 84.8, 134.4};
  std::optional<std::vector<GaugeConfig>> gauges;  // unset: default transwell gauges
  double p_vapor = 2339.0;                         // Pa, absolute
  std::string output_dir = "shockcell_out";
};

/// Parses a JSON document (possibly with `overrides_json` merged on top, RFC
/// 7386 merge-patch). Throws ConfigError with line/column on malformed input
/// and on unknown keys or out-of-range values.
ScenarioConfig parse_config(const std::string& json_text, const std::string& overrides_json = {});

/// Fully resolved configuration as JSON text (every field explicit).
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

/// Range checks that do not need the grid (the scenario builder checks geometry).
void validate_config(const ScenarioConfig& cfg);

/// Default gauges: on-axis 1 mm inside the proximal face, on-axis at the
/// transwell midpoint, and 0.5 mm from the distal face one hydrophone diameter
/// off the axis.
std::vector<GaugeConfig> default_gauges(const ScenarioConfig& cfg);

}  // namespace shockcell

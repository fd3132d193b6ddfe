#pragma once

// Gauges, frame snapshots, axis slices and cavitation metrics. Everything here
// only reads the simulation state.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shockcell/stepper.hpp"

namespace shockcell {

/// Nearest cell centre along one axis, ties going to the lower index. Returns
/// -1 when x lies outside [origin, origin + n d].
int nearest_cell(double x, double origin, double d, int n);

struct GaugeSpec {
  std::string id;
  double r = 0.0;
  double z = 0.0;
  int i = 0;  // resolved cell
  int j = 0;
  bool irrelevant = false;  // cell in, or face-adjacent to, polystyrene
};

/// Throws ConfigError for gauges outside the domain or with duplicate ids.
std::vector<GaugeSpec> resolve_gauges(const std::vector<GaugeConfig>& gauges, const GridSpec& grid,
                                      const MaterialMap& map);

struct GaugeSample {
  double t = 0.0;      // s
  double p_abs = 0.0;  // Pa
  double p_gauge_psi = 0.0;
};

struct GaugeSeries {
  GaugeSpec spec;
  std::vector<GaugeSample> samples;
};

/// Appends one sample per gauge. Throws InvalidStateError if the time does not
/// increase.
void record_gauges(const SimulationState& s, const Stepper& st, std::vector<GaugeSeries>& series);

struct CavitationEntry {
  int frame = 0;
  double t = 0.0;
  double min_p = 0.0;  // over water cells, Pa
  int i_min = -1;
  int j_min = -1;
  std::size_t below_vapor = 0;
  std::size_t water_cells = 0;
  std::vector<std::uint8_t> mask;  // 1 where a water cell sits below p_vapor, radial index fastest
};

CavitationEntry cavitation_metrics(const SimulationState& s, const Stepper& st, double p_vapor);

/// Cheaper per-step variant: minimum water pressure and its cell, no mask.
CavitationEntry water_pressure_minimum(const SimulationState& s, const Stepper& st, double p_vapor);

// File formats. All writers throw IoError with the offending path.

/// CSV with header `t_us,p_abs_pa,p_gauge_psi`, 17 significant digits.
void write_gauge_csv(const GaugeSeries& series, const std::filesystem::path& path);
/// Samples come back with t in microseconds, exactly as stored.
std::vector<GaugeSample> read_gauge_csv(const std::filesystem::path& path);

struct FrameInfo {
  int index = 0;
  double time = 0.0;
  long step = 0;
  std::filesystem::path payload;
  std::filesystem::path header;
};

/// frame_####.bin (little-endian float64 rho, mom_r, mom_z, E, p, each n_r*n_z
/// with the radial index fastest) plus frame_####.json.
FrameInfo write_frame(const SimulationState& s, const Stepper& st, const std::filesystem::path& dir, int index);

struct FrameData {
  GridSpec grid;
  double time = 0.0;
  long step = 0;
  std::vector<double> rho, mom_r, mom_z, E, p;
};
FrameData read_frame(const std::filesystem::path& header_path);

/// axis_####.csv: one row per axial cell of the first radial column.
void write_axis_slice(const SimulationState& s, const Stepper& st, const std::filesystem::path& path);

/// Material ids as uint8, radial index fastest.
void write_material_map(const MaterialMap& map, const std::filesystem::path& path);

void write_cavitation_csv(const std::vector<CavitationEntry>& frames, const std::filesystem::path& path);

}  // namespace shockcell

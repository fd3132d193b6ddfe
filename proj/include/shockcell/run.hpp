#pragma once

// Time loop for a scenario: CFL-controlled steps clipped onto the frame
// times, gauge sampling every step, frame/axis/cavitation output and a run
// manifest.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "shockcell/observables.hpp"

namespace shockcell {

struct RunOptions {
  std::filesystem::path output_dir;  // empty: nothing written to disk
  bool write_frames = true;
  bool write_axis = true;
  bool cavitation_series = true;  // per-step minimum water pressure, cavitation_series.csv
  // Called after every accepted step with the new state.
  std::function<void(const SimulationState&)> observer;
};

struct RunResult {
  std::vector<GaugeSeries> gauges;
  std::vector<CavitationEntry> frames;      // one per written frame, with mask
  std::vector<CavitationEntry> water_min;   // per step (when enabled), no mask
  std::vector<FrameInfo> frame_files;
  long steps = 0;
  long fallback_cells = 0;  // cell updates redone with first-order edges
  double final_time = 0.0;
  bool failed = false;
  std::string error;
};

/// Runs `sc` from its initial state to config.t_end_us. On a numerical failure
/// all partial outputs plus the last stable state (as frame_9999) are written,
/// the manifest records the failure, and the NumericalError is rethrown.
RunResult run_scenario(const Scenario& sc, const RunOptions& opts);

/// Same, continuing from a caller-owned stepper and state.
RunResult run_scenario(const Scenario& sc, Stepper& st, SimulationState& s, const RunOptions& opts);

}  // namespace shockcell

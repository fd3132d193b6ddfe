#include "shockcell/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "shockcell/errors.hpp"
#include "shockcell/version.hpp"

namespace shockcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string axis_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "axis_%04d.csv", index);
  return buf;
}

void write_series_csv(const std::vector<CavitationEntry>& series, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "t_us,min_water_p_pa,i_r,j_z,below_vapor_cells\n";
  char buf[128];
  for (const auto& e : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%zu\n", e.t * 1e6, e.min_p, e.i_min, e.j_min, e.below_vapor);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path.string());
}

json box_json(const SnappedBox& b) {
  return {{"i0", b.i0}, {"i1", b.i1}, {"j0", b.j0}, {"j1", b.j1},
          {"r_lo", b.r_lo}, {"r_hi", b.r_hi}, {"z_lo", b.z_lo}, {"z_hi", b.z_hi}};
}

void write_manifest(const Scenario& sc, const RunResult& res, const std::vector<GaugeSpec>& gauges,
                    const fs::path& dir) {
  json m;
  m["version"] = kVersion;
  m["config"] = json::parse(config_to_json(sc.config));
  m["grid"] = {{"n_r", sc.grid.n_r}, {"n_z", sc.grid.n_z}, {"d_r", sc.grid.d_r},
               {"d_z", sc.grid.d_z}, {"z_origin", sc.grid.z_origin}};
  m["geometry"] = {{"transwell", box_json(sc.geometry.transwell)},
                   {"hydrophone", sc.geometry.hydrophone},
                   {"max_snap_displacement_m", sc.geometry.max_snap_displacement}};
  if (sc.geometry.hydrophone) m["geometry"]["rod"] = box_json(sc.geometry.rod);
  json g = json::array();
  for (const auto& spec : gauges)
    g.push_back({{"id", spec.id}, {"r", spec.r}, {"z", spec.z}, {"i_r", spec.i}, {"j_z", spec.j},
                 {"irrelevant", spec.irrelevant}, {"file", "gauge_" + spec.id + ".csv"}});
  m["gauges"] = g;
  json f = json::array();
  for (const auto& fr : res.frame_files)
    f.push_back({{"index", fr.index}, {"t_us", fr.time * 1e6}, {"step", fr.step},
                 {"header", fr.header.filename().string()}, {"payload", fr.payload.filename().string()}});
  m["frames"] = f;
  m["steps"] = res.steps;
  m["first_order_fallback_cells"] = res.fallback_cells;
  m["final_time_us"] = res.final_time * 1e6;
  m["status"] = res.failed ? "failed" : "ok";
  if (res.failed) m["error"] = res.error;
  m["material_map"] = {{"file", "materials.bin"}, {"dtype", "uint8"}, {"ids", {"air", "water", "polystyrene"}}};

  std::ofstream out(dir / "run_manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot open " + (dir / "run_manifest.json").string() + " for writing");
  out << m.dump(2) << "\n";
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opts) {
  Stepper st(sc);
  SimulationState s = st.initial_state(sc.config.shock.initial_position);
  return run_scenario(sc, st, s, opts);
}

RunResult run_scenario(const Scenario& sc, Stepper& st, SimulationState& s, const RunOptions& opts) {
  const ScenarioConfig& cfg = sc.config;
  const bool to_disk = !opts.output_dir.empty();
  if (to_disk) {
    std::error_code ec;
    fs::create_directories(opts.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + opts.output_dir.string() + ": " + ec.message());
  }

  const double t_end = cfg.t_end_us * 1e-6;
  if (!(t_end > s.time)) throw ConfigError("t_end must lie after the start time");
  std::vector<double> frame_times;
  for (double t_us : cfg.frame_times_us) {
    const double t = t_us * 1e-6;
    if (t >= s.time && t <= t_end) frame_times.push_back(t);
  }
  std::sort(frame_times.begin(), frame_times.end());
  frame_times.erase(std::unique(frame_times.begin(), frame_times.end()), frame_times.end());

  RunResult res;
  const std::vector<GaugeSpec> specs =
      resolve_gauges(cfg.gauges ? *cfg.gauges : default_gauges(cfg), sc.grid, sc.map);
  for (const auto& spec : specs) res.gauges.push_back({spec, {}});

  std::size_t next_frame = 0;
  int frame_index = 0;
  auto emit_frame = [&](const SimulationState& state, int index) {
    CavitationEntry e = cavitation_metrics(state, st, cfg.p_vapor);
    e.frame = index;
    res.frames.push_back(std::move(e));
    if (!to_disk) return;
    if (opts.write_frames) res.frame_files.push_back(write_frame(state, st, opts.output_dir, index));
    if (opts.write_axis) write_axis_slice(state, st, opts.output_dir / axis_name(index));
  };
  auto flush = [&]() {
    if (!to_disk) return;
    for (const auto& g : res.gauges) write_gauge_csv(g, opts.output_dir / ("gauge_" + g.spec.id + ".csv"));
    write_cavitation_csv(res.frames, opts.output_dir / "cavitation.csv");
    if (opts.cavitation_series) write_series_csv(res.water_min, opts.output_dir / "cavitation_series.csv");
    write_material_map(sc.map, opts.output_dir / "materials.bin");
    write_manifest(sc, res, specs, opts.output_dir);
  };
  auto sample = [&](const SimulationState& state) {
    record_gauges(state, st, res.gauges);
    if (opts.cavitation_series) res.water_min.push_back(water_pressure_minimum(state, st, cfg.p_vapor));
  };

  sample(s);
  while (next_frame < frame_times.size() && frame_times[next_frame] <= s.time) {
    emit_frame(s, ++frame_index);
    ++next_frame;
  }

  SimulationState last_good = s;
  try {
    while (s.time < t_end) {
      const double target = next_frame < frame_times.size() ? frame_times[next_frame] : t_end;
      double dt = st.stable_dt(s);
      bool lands = false;
      if (s.time + dt >= target) {
        dt = target - s.time;
        lands = true;
      } else if (s.time + 2.0 * dt > target) {
        // split the remainder evenly instead of leaving a sliver step
        dt = 0.5 * (target - s.time);
      }
      last_good.q = s.q;
      last_good.time = s.time;
      last_good.step = s.step;
      st.advance(s, dt);
      if (lands) s.time = target;
      sample(s);
      if (opts.observer) opts.observer(s);
      while (next_frame < frame_times.size() && frame_times[next_frame] <= s.time) {
        emit_frame(s, ++frame_index);
        ++next_frame;
      }
    }
  } catch (const NumericalError& e) {
    res.failed = true;
    res.error = e.what();
    res.steps = last_good.step;
    res.final_time = last_good.time;
    res.fallback_cells = st.fallback_cells();
    if (to_disk && opts.write_frames) res.frame_files.push_back(write_frame(last_good, st, opts.output_dir, 9999));
    flush();
    throw;
  }
  res.steps = s.step;
  res.final_time = s.time;
  res.fallback_cells = st.fallback_cells();
  flush();
  return res;
}

}  // namespace shockcell

// shockcell command line: run | verify1d | converge | validate.
// Exit codes: 0 ok, 1 a pass criterion failed, 2 configuration error,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shockcell/shockcell.h"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;

struct Common {
  std::string config_path;
  std::string output_dir;
  std::optional<int> threads;
};

int report(shockcell_status st) {
  if (st != SHOCKCELL_OK && st != SHOCKCELL_THRESHOLD_FAILED)
    std::fprintf(stderr, "shockcell: %s: %s\n", shockcell_status_name(st), shockcell_last_error());
  switch (st) {
    case SHOCKCELL_OK:
      return 0;
    case SHOCKCELL_THRESHOLD_FAILED:
      return 1;
    case SHOCKCELL_CONFIG_ERROR:
    case SHOCKCELL_INVALID_ARGUMENT:
    case SHOCKCELL_IO_ERROR:
      return kExitConfig;
    case SHOCKCELL_NUMERICAL_ERROR:
      return 3;
    default:
      return 4;
  }
}

// Config file contents, or "{}" when no path was given.
bool read_config(const std::string& path, std::string& text) {
  if (path.empty()) {
    text = "{}";
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "shockcell: config error: cannot read %s\n", path.c_str());
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

void apply_common(const Common& c, json& patch) {
  if (!c.output_dir.empty()) patch["output"]["dir"] = c.output_dir;
  if (c.threads) patch["numerics"]["threads"] = *c.threads;
}

// Resolves config + patch; returns the resolved document or nullopt after
// printing the diagnostic.
std::optional<json> resolve(const std::string& text, const json& patch, int& exit_code) {
  char* out = nullptr;
  const std::string p = patch.dump();
  const shockcell_status st = shockcell_config_resolve(text.c_str(), p.c_str(), &out);
  if (st != SHOCKCELL_OK) {
    exit_code = report(st);
    return std::nullopt;
  }
  json j = json::parse(out);
  shockcell_string_free(out);
  return j;
}

bool parse_resolution(const std::string& s, int& n_r, int& n_z) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) return false;
  try {
    std::size_t a = 0, b = 0;
    n_r = std::stoi(s.substr(0, x), &a);
    n_z = std::stoi(s.substr(x + 1), &b);
    return a == x && b == s.size() - x - 1 && n_r > 0 && n_z > 0;
  } catch (const std::exception&) {
    return false;
  }
}

std::string fmt_psi(double pa) { return std::to_string((pa - 101325.0) / 6894.757); }

int cmd_run(const Common& c, bool hydrophone, const std::string& resolution, std::optional<double> peak_psi,
            std::optional<double> t_end_us) {
  std::string text;
  if (!read_config(c.config_path, text)) return kExitConfig;
  json patch = json::object();
  apply_common(c, patch);
  if (hydrophone) patch["hydrophone"]["enabled"] = true;
  if (!resolution.empty()) {
    int n_r = 0, n_z = 0;
    if (!parse_resolution(resolution, n_r, n_z)) {
      std::fprintf(stderr, "shockcell: config error: --resolution expects NRxNZ, got '%s'\n", resolution.c_str());
      return kExitConfig;
    }
    patch["grid"]["n_r"] = n_r;
    patch["grid"]["n_z"] = n_z;
  }
  if (peak_psi) patch["shock"]["peak_psi"] = *peak_psi;

  int code = 0;
  if (t_end_us) {
    // frames past a shortened end time are dropped
    const auto base = resolve(text, patch, code);
    if (!base) return code;
    json frames = json::array();
    for (double t : (*base)["run"]["frame_times_us"].get<std::vector<double>>())
      if (t <= *t_end_us) frames.push_back(t);
    patch["run"]["t_end_us"] = *t_end_us;
    patch["run"]["frame_times_us"] = frames;
  }
  const auto resolved = resolve(text, patch, code);
  if (!resolved) return code;
  const std::string out_dir = (*resolved)["output"]["dir"].get<std::string>();

  shockcell_sim* sim = nullptr;
  const std::string p = patch.dump();
  shockcell_status st = shockcell_sim_create(text.c_str(), p.c_str(), &sim);
  if (st != SHOCKCELL_OK) return report(st);
  int n_r = 0, n_z = 0;
  shockcell_sim_shape(sim, &n_r, &n_z);
  std::printf("run: %dx%d cells, output %s\n", n_r, n_z, out_dir.c_str());
  std::fflush(stdout);

  shockcell_run_summary sum{};
  st = shockcell_sim_run(sim, out_dir.c_str(), &sum);
  shockcell_sim_destroy(sim);
  if (st != SHOCKCELL_OK) {
    if (sum.failed) std::fprintf(stderr, "shockcell: partial output and last stable frame in %s\n", out_dir.c_str());
    return report(st);
  }
  std::printf("steps %ld, t_end %.3f us, frames %d, gauges %d\n", sum.steps, sum.final_time_us, sum.frames_written,
              sum.gauges);
  if (std::isfinite(sum.min_water_p_pa))
    std::printf("min water pressure %.1f Pa (%s psi gauge) at %.3f us\n", sum.min_water_p_pa,
                fmt_psi(sum.min_water_p_pa).c_str(), sum.min_water_p_t_us);
  return 0;
}

int cmd_verify1d(const Common& c, int cells) {
  std::string text;
  if (!read_config(c.config_path, text)) return kExitConfig;
  json patch = json::object();
  apply_common(c, patch);
  int code = 0;
  const auto resolved = resolve(text, patch, code);
  if (!resolved) return code;
  const std::string out_dir = (*resolved)["output"]["dir"].get<std::string>();
  const std::string p = patch.dump();

  shockcell_verify_summary sum{};
  const shockcell_status st = shockcell_verify1d(text.c_str(), p.c_str(), cells, out_dir.c_str(), &sum);
  if (st != SHOCKCELL_OK && st != SHOCKCELL_THRESHOLD_FAILED) return report(st);
  std::printf("verify1d: %d cells, output %s\n", cells, out_dir.c_str());
  std::printf("L1 density error / jump scale: A+6us %.3e, B+6us %.3e (limit 1e-2) %s\n", sum.l1_a, sum.l1_b,
              sum.l1_pass ? "PASS" : "FAIL");
  std::printf("transmitted overpressure into air: numeric %.5f psi, exact %.5f psi, reference 0.013 psi +-30%% %s\n",
              sum.transmitted_psi_numeric, sum.transmitted_psi_exact, sum.transmitted_pass ? "PASS" : "FAIL");
  return report(st);
}

int cmd_converge(const Common& c, const std::vector<int>& cells) {
  std::string text;
  if (!read_config(c.config_path, text)) return kExitConfig;
  json patch = json::object();
  apply_common(c, patch);
  int code = 0;
  const auto resolved = resolve(text, patch, code);
  if (!resolved) return code;
  const std::string out_dir = (*resolved)["output"]["dir"].get<std::string>();
  const std::string p = patch.dump();

  std::vector<double> l1(cells.size(), NAN);
  shockcell_converge_summary sum{};
  const shockcell_status st = shockcell_converge(text.c_str(), p.c_str(), cells.data(), static_cast<int>(cells.size()),
                                                 out_dir.c_str(), l1.data(), &sum);
  if (st != SHOCKCELL_OK && st != SHOCKCELL_THRESHOLD_FAILED) return report(st);
  std::printf("converge: output %s\n", out_dir.c_str());
  for (std::size_t k = 0; k < cells.size(); ++k) std::printf("  %5d cells  L1 density error %.4e\n", cells[k], l1[k]);
  std::printf("errors strictly decreasing: %s\n", sum.decreasing ? "yes" : "no");
  const std::size_t m = cells.size();
  if (std::isfinite(sum.order))
    std::printf("smooth-region order %.3f (air %.3f, water %.3f)\n", sum.order, sum.order_air, sum.order_water);
  else if (m >= 3 && cells[m - 1] == 2 * cells[m - 2] && cells[m - 2] == 2 * cells[m - 3])
    std::printf("smooth-region order n/a: no smooth cells on the coarsest grid\n");
  return report(st);
}

int cmd_validate(const Common& c) {
  std::string text;
  if (!read_config(c.config_path, text)) return kExitConfig;
  json patch = json::object();
  apply_common(c, patch);
  const std::string p = patch.dump();
  const shockcell_status st = shockcell_config_validate(text.c_str(), p.c_str());
  if (st != SHOCKCELL_OK) return report(st);
  int code = 0;
  const auto resolved = resolve(text, patch, code);
  if (!resolved) return code;
  std::printf("%s\n", resolved->dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric shock simulator for a fluid-filled transwell in a shock tube"};
  app.set_version_flag("--version", std::string(shockcell_version()));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool positional_config) {
    if (positional_config)
      sub->add_option("config", common.config_path, "JSON config file (defaults when omitted)");
    else
      sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--output-dir", common.output_dir, "Directory for all outputs");
    sub->add_option("--threads", common.threads, "Worker threads (results do not depend on it)")
        ->envname("SHOCKCELL_THREADS")
        ->check(CLI::Range(1, 1024));
  };

  bool hydrophone = false;
  std::string resolution;
  std::optional<double> peak_psi, t_end_us;
  CLI::App* run = app.add_subcommand("run", "Run the 2D transwell scenario");
  add_common(run, true);
  run->add_flag("--with-hydrophone", hydrophone, "Insert the polystyrene hydrophone rod");
  run->add_option("--resolution", resolution, "Grid as NRxNZ, e.g. 200x400");
  run->add_option("--peak-psi", peak_psi, "Peak incident overpressure, psi");
  run->add_option("--t-end-us", t_end_us, "End time, microseconds");

  int cells = 800;
  CLI::App* ver = app.add_subcommand("verify1d", "Planar air|water|air check against the exact solution");
  add_common(ver, false);
  ver->add_option("--cells", cells, "Axial cells (at least 100)");

  std::vector<int> levels{200, 400, 800};
  CLI::App* conv = app.add_subcommand("converge", "Grid convergence of the planar problem");
  add_common(conv, false);
  conv->add_option("--cells", levels, "Comma separated resolutions")->delimiter(',');

  CLI::App* val = app.add_subcommand("validate", "Check a config and print it fully resolved");
  add_common(val, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return cmd_run(common, hydrophone, resolution, peak_psi, t_end_us);
  if (*ver) return cmd_verify1d(common, cells);
  if (*conv) return cmd_converge(common, levels);
  return cmd_validate(common);
}

#include "shockcell/observables.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shockcell/errors.hpp"

namespace shockcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d", index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void append_le(std::string& buf, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int k = 0; k < 8; ++k) swapped |= ((bits >> (8 * k)) & 0xffu) << (8 * (7 - k));
    bits = swapped;
  }
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  buf.append(bytes, 8);
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int k = 0; k < 8; ++k) swapped |= ((bits >> (8 * k)) & 0xffu) << (8 * (7 - k));
    bits = swapped;
  }
  return std::bit_cast<double>(bits);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool touches_polystyrene(const MaterialMap& map, int i, int j) {
  auto is_ps = [&](int a, int b) {
    return a >= 0 && a < map.n_r() && b >= 0 && b < map.n_z() && map.at(a, b) == MaterialId::Polystyrene;
  };
  return is_ps(i, j) || is_ps(i - 1, j) || is_ps(i + 1, j) || is_ps(i, j - 1) || is_ps(i, j + 1);
}

}  // namespace

int nearest_cell(double x, double origin, double d, int n) {
  const double s = (x - origin) / d;
  if (!(s >= 0.0 && s <= n)) return -1;
  // centre k sits at s = k + 1/2; a tie at s = k + 1 goes to k
  const double k = std::ceil(s - 1.0);
  const int idx = static_cast<int>(std::max(k, 0.0));
  return std::min(std::max(idx, 0), n - 1);
}

std::vector<GaugeSpec> resolve_gauges(const std::vector<GaugeConfig>& gauges, const GridSpec& grid,
                                      const MaterialMap& map) {
  std::vector<GaugeSpec> out;
  std::set<std::string> ids;
  for (const auto& g : gauges) {
    if (g.id.empty()) throw ConfigError("gauge id must not be empty");
    if (!ids.insert(g.id).second) throw ConfigError("duplicate gauge id '" + g.id + "'");
    GaugeSpec spec{g.id, g.r, g.z};
    spec.i = nearest_cell(g.r, 0.0, grid.d_r, grid.n_r);
    spec.j = nearest_cell(g.z, grid.z_origin, grid.d_z, grid.n_z);
    if (spec.i < 0 || spec.j < 0) {
      std::ostringstream os;
      os << "gauge '" << g.id << "' at (r=" << g.r << ", z=" << g.z << ") lies outside the domain";
      throw ConfigError(os.str());
    }
    spec.irrelevant = touches_polystyrene(map, spec.i, spec.j);
    out.push_back(spec);
  }
  return out;
}

void record_gauges(const SimulationState& s, const Stepper& st, std::vector<GaugeSeries>& series) {
  for (auto& g : series) {
    if (!g.samples.empty() && !(s.time > g.samples.back().t))
      throw InvalidStateError("gauge samples must have increasing time");
    const double p = st.pressure(s, g.spec.i, g.spec.j);
    g.samples.push_back({s.time, p, to_gauge_psi(p)});
  }
}

CavitationEntry water_pressure_minimum(const SimulationState& s, const Stepper& st, double p_vapor) {
  CavitationEntry e;
  e.t = s.time;
  e.min_p = INFINITY;
  const MaterialMap& map = *s.map;
  for (int j = 0; j < s.grid.n_z; ++j)
    for (int i = 0; i < s.grid.n_r; ++i) {
      if (map.at(i, j) != MaterialId::Water) continue;
      ++e.water_cells;
      const double p = st.pressure(s, i, j);
      if (p < p_vapor) ++e.below_vapor;
      if (p < e.min_p) {
        e.min_p = p;
        e.i_min = i;
        e.j_min = j;
      }
    }
  return e;
}

CavitationEntry cavitation_metrics(const SimulationState& s, const Stepper& st, double p_vapor) {
  if (!(p_vapor > 0.0)) throw ConfigError("vapor pressure must be positive");
  CavitationEntry e = water_pressure_minimum(s, st, p_vapor);
  e.mask.assign(s.grid.cells(), 0);
  const MaterialMap& map = *s.map;
  for (int j = 0; j < s.grid.n_z; ++j)
    for (int i = 0; i < s.grid.n_r; ++i)
      if (map.at(i, j) == MaterialId::Water && st.pressure(s, i, j) < p_vapor)
        e.mask[static_cast<std::size_t>(j) * s.grid.n_r + i] = 1;
  return e;
}

void write_gauge_csv(const GaugeSeries& series, const fs::path& path) {
  std::string text = "t_us,p_abs_pa,p_gauge_psi\n";
  for (const auto& smp : series.samples) {
    text += fmt17(smp.t * 1e6);
    text += ',';
    text += fmt17(smp.p_abs);
    text += ',';
    text += fmt17(smp.p_gauge_psi);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<GaugeSample> read_gauge_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "t_us,p_abs_pa,p_gauge_psi") throw IoError("unexpected gauge header in " + path.string());
  std::vector<GaugeSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    GaugeSample smp;
    double t_us = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t_us, &smp.p_abs, &smp.p_gauge_psi) != 3)
      throw IoError("malformed gauge row in " + path.string() + ": " + line);
    smp.t = t_us;  // kept in microseconds as written
    out.push_back(smp);
  }
  return out;
}

FrameInfo write_frame(const SimulationState& s, const Stepper& st, const fs::path& dir, int index) {
  const GridSpec& g = s.grid;
  const std::size_t n = g.cells();
  std::string payload;
  payload.reserve(5 * n * 8);
  for (int field = 0; field < 5; ++field)
    for (int j = 0; j < g.n_z; ++j)
      for (int i = 0; i < g.n_r; ++i) {
        const ConservedState& q = s.at(i, j);
        double v = 0.0;
        switch (field) {
          case 0: v = q.rho; break;
          case 1: v = q.mom_r; break;
          case 2: v = q.mom_z; break;
          case 3: v = q.E; break;
          default: v = st.pressure(s, i, j); break;
        }
        append_le(payload, v);
      }

  FrameInfo info;
  info.index = index;
  info.time = s.time;
  info.step = s.step;
  info.payload = dir / (frame_stem(index) + ".bin");
  info.header = dir / (frame_stem(index) + ".json");
  write_text(info.payload, payload);

  json h;
  h["format"] = "shockcell-frame";
  h["payload"] = info.payload.filename().string();
  h["shape"] = {g.n_z, g.n_r};
  h["n_r"] = g.n_r;
  h["n_z"] = g.n_z;
  h["d_r"] = g.d_r;
  h["d_z"] = g.d_z;
  h["z_origin"] = g.z_origin;
  h["time_s"] = s.time;
  h["time_us"] = s.time * 1e6;
  h["step"] = s.step;
  h["variables"] = {"rho", "mom_r", "mom_z", "E", "p"};
  h["units"] = {"kg/m^3", "kg/(m^2 s)", "kg/(m^2 s)", "J/m^3", "Pa"};
  h["dtype"] = "float64";
  h["endianness"] = "little";
  h["layout"] = "variable-major, then z, radial index fastest";
  write_text(info.header, h.dump(2) + "\n");
  return info;
}

FrameData read_frame(const fs::path& header_path) {
  std::ifstream in(header_path);
  if (!in) throw IoError("cannot open " + header_path.string());
  json h;
  try {
    h = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("bad frame header " + header_path.string() + ": " + e.what());
  }
  FrameData f;
  f.grid.n_r = h.at("n_r").get<int>();
  f.grid.n_z = h.at("n_z").get<int>();
  f.grid.d_r = h.at("d_r").get<double>();
  f.grid.d_z = h.at("d_z").get<double>();
  f.grid.z_origin = h.at("z_origin").get<double>();
  f.time = h.at("time_s").get<double>();
  f.step = h.at("step").get<long>();
  const fs::path payload = header_path.parent_path() / h.at("payload").get<std::string>();
  std::ifstream bin(payload, std::ios::binary);
  if (!bin) throw IoError("cannot open " + payload.string());
  std::string bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  const std::size_t n = f.grid.cells();
  if (bytes.size() != 5 * n * 8) throw IoError("frame payload has unexpected length: " + payload.string());
  std::vector<double>* fields[5] = {&f.rho, &f.mom_r, &f.mom_z, &f.E, &f.p};
  for (int k = 0; k < 5; ++k) {
    fields[k]->resize(n);
    for (std::size_t c = 0; c < n; ++c) (*fields[k])[c] = read_le(bytes.data() + (k * n + c) * 8);
  }
  return f;
}

void write_axis_slice(const SimulationState& s, const Stepper& st, const fs::path& path) {
  std::string text = "z_m,p_abs_pa,p_gauge_psi,rho,u_z\n";
  for (int j = 0; j < s.grid.n_z; ++j) {
    const ConservedState& q = s.at(0, j);
    const double p = st.pressure(s, 0, j);
    text += fmt17(s.grid.z_center(j)) + ',' + fmt17(p) + ',' + fmt17(to_gauge_psi(p)) + ',' + fmt17(q.rho) + ',' +
            fmt17(q.mom_z / q.rho) + '\n';
  }
  write_text(path, text);
}

void write_material_map(const MaterialMap& map, const fs::path& path) {
  std::string bytes;
  bytes.reserve(map.raw().size());
  for (MaterialId id : map.raw()) bytes.push_back(static_cast<char>(id));
  write_text(path, bytes);
}

void write_cavitation_csv(const std::vector<CavitationEntry>& frames, const fs::path& path) {
  std::string text = "frame,t_us,min_water_p_pa,i_r,j_z,below_vapor_cells,water_cells\n";
  for (const auto& e : frames)
    text += std::to_string(e.frame) + ',' + fmt17(e.t * 1e6) + ',' + fmt17(e.min_p) + ',' + std::to_string(e.i_min) +
            ',' + std::to_string(e.j_min) + ',' + std::to_string(e.below_vapor) + ',' +
            std::to_string(e.water_cells) + '\n';
  write_text(path, text);
}

}  // namespace shockcell

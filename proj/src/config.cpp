#include "shockcell/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "shockcell/errors.hpp"

namespace shockcell {

using nlohmann::json;

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the position one past the offending character.
  if (col > 1) --col;
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": malformed JSON at " + line_col(text, e.byte) + ": " + e.what());
  }
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

template <class T>
void read_opt(const json& obj, const char* key, const std::string& path, std::optional<T>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(obj, key, path, v);
  out = v;
}

template <class E>
E read_enum(const json& obj, const char* key, const std::string& path, E current,
            std::initializer_list<std::pair<const char*, E>> names) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return current;
  if (!it->is_string()) throw ConfigError(path + "." + key + ": expected a string");
  const auto s = it->get<std::string>();
  for (const auto& [name, value] : names)
    if (s == name) return value;
  throw ConfigError(path + "." + key + ": unknown value '" + s + "'");
}

template <class E>
const char* enum_name(E value, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [name, v] : names)
    if (v == value) return name;
  return "?";
}

const std::initializer_list<std::pair<const char*, ProfileKind>> kProfiles{
    {"step-hold", ProfileKind::StepHold}, {"step-exponential", ProfileKind::StepExponential}};
const std::initializer_list<std::pair<const char*, LimiterKind>> kLimiters{
    {"none", LimiterKind::None}, {"mc", LimiterKind::MonotonizedCentral}};
const std::initializer_list<std::pair<const char*, TransverseMode>> kTransverse{
    {"none", TransverseMode::None}, {"increment", TransverseMode::Increment}, {"full", TransverseMode::Full}};
const std::initializer_list<std::pair<const char*, Splitting>> kSplitting{
    {"godunov", Splitting::Godunov}, {"strang", Splitting::Strang}};

void read_material(const json& root, const char* key, MaterialParams& m) {
  auto it = root.find(key);
  if (it == root.end()) return;
  const std::string path = std::string("materials.") + key;
  reject_unknown(*it, path, {"gamma", "p_inf", "rho_ref"});
  read(*it, "gamma", path, m.eos.gamma);
  read(*it, "p_inf", path, m.eos.p_inf);
  read(*it, "rho_ref", path, m.rho_ref);
}

json material_json(const MaterialParams& m) {
  return {{"gamma", m.eos.gamma}, {"p_inf", m.eos.p_inf}, {"rho_ref", m.rho_ref}};
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

ScenarioConfig from_json(const json& root) {
  ScenarioConfig c;
  reject_unknown(root, "config",
                 {"grid", "materials", "ambient", "transwell", "hydrophone", "shock", "numerics", "run",
                  "gauges", "cavitation", "output"});
  if (auto it = root.find("grid"); it != root.end()) {
    reject_unknown(*it, "grid", {"n_r", "n_z", "r_max", "z_min", "z_max"});
    read(*it, "n_r", "grid", c.grid.n_r);
    read(*it, "n_z", "grid", c.grid.n_z);
    read(*it, "r_max", "grid", c.grid.r_max);
    read(*it, "z_min", "grid", c.grid.z_min);
    read(*it, "z_max", "grid", c.grid.z_max);
  }
  if (auto it = root.find("materials"); it != root.end()) {
    reject_unknown(*it, "materials", {"air", "water", "polystyrene"});
    read_material(*it, "air", c.air);
    read_material(*it, "water", c.water);
    read_material(*it, "polystyrene", c.polystyrene);
  }
  if (auto it = root.find("ambient"); it != root.end()) {
    reject_unknown(*it, "ambient", {"p_pa"});
    read(*it, "p_pa", "ambient", c.ambient_p);
  }
  if (auto it = root.find("transwell"); it != root.end()) {
    reject_unknown(*it, "transwell", {"z_start", "length", "radius"});
    read(*it, "z_start", "transwell", c.transwell.z_start);
    read(*it, "length", "transwell", c.transwell.length);
    read(*it, "radius", "transwell", c.transwell.radius);
  }
  if (auto it = root.find("hydrophone"); it != root.end()) {
    reject_unknown(*it, "hydrophone", {"enabled", "radius", "z_tip", "z_end"});
    read(*it, "enabled", "hydrophone", c.hydrophone.enabled);
    read(*it, "radius", "hydrophone", c.hydrophone.radius);
    read_opt(*it, "z_tip", "hydrophone", c.hydrophone.z_tip);
    read_opt(*it, "z_end", "hydrophone", c.hydrophone.z_end);
  }
  if (auto it = root.find("shock"); it != root.end()) {
    reject_unknown(*it, "shock", {"peak_psi", "profile", "tau_us", "arrival_us", "initial_position"});
    read(*it, "peak_psi", "shock", c.shock.peak_psi);
    c.shock.profile = read_enum(*it, "profile", "shock", c.shock.profile, kProfiles);
    read(*it, "tau_us", "shock", c.shock.tau_us);
    read(*it, "arrival_us", "shock", c.shock.arrival_us);
    read_opt(*it, "initial_position", "shock", c.shock.initial_position);
  }
  if (auto it = root.find("numerics"); it != root.end()) {
    reject_unknown(*it, "numerics", {"cfl", "limiter", "transverse", "source_terms", "splitting", "threads"});
    read(*it, "cfl", "numerics", c.numerics.cfl);
    c.numerics.limiter = read_enum(*it, "limiter", "numerics", c.numerics.limiter, kLimiters);
    c.numerics.transverse = read_enum(*it, "transverse", "numerics", c.numerics.transverse, kTransverse);
    read(*it, "source_terms", "numerics", c.numerics.source_terms);
    c.numerics.splitting = read_enum(*it, "splitting", "numerics", c.numerics.splitting, kSplitting);
    read(*it, "threads", "numerics", c.numerics.threads);
  }
  if (auto it = root.find("run"); it != root.end()) {
    reject_unknown(*it, "run", {"t_end_us", "frame_times_us"});
    read(*it, "t_end_us", "run", c.t_end_us);
    read(*it, "frame_times_us", "run", c.frame_times_us);
  }
  if (auto it = root.find("gauges"); it != root.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError("gauges: expected an array");
    std::vector<GaugeConfig> gauges;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& g = (*it)[k];
      const std::string path = "gauges[" + std::to_string(k) + "]";
      reject_unknown(g, path, {"id", "r", "z"});
      GaugeConfig gc;
      gc.id = std::to_string(k + 1);
      read(g, "id", path, gc.id);
      read(g, "r", path, gc.r);
      read(g, "z", path, gc.z);
      gauges.push_back(gc);
    }
    c.gauges = std::move(gauges);
  }
  if (auto it = root.find("cavitation"); it != root.end()) {
    reject_unknown(*it, "cavitation", {"p_vapor_pa"});
    read(*it, "p_vapor_pa", "cavitation", c.p_vapor);
  }
  if (auto it = root.find("output"); it != root.end()) {
    reject_unknown(*it, "output", {"dir"});
    read(*it, "dir", "output", c.output_dir);
  }
  return c;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text, const std::string& overrides_json) {
  json root = json_text.empty() ? json::object() : parse_json(json_text, "config");
  if (!overrides_json.empty()) root.merge_patch(parse_json(overrides_json, "overrides"));
  ScenarioConfig cfg = from_json(root);
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const ScenarioConfig& c, int indent) {
  json gauges = json::array();
  for (const auto& g : c.gauges ? *c.gauges : default_gauges(c))
    gauges.push_back({{"id", g.id}, {"r", g.r}, {"z", g.z}});
  json root = {
      {"grid", {{"n_r", c.grid.n_r}, {"n_z", c.grid.n_z}, {"r_max", c.grid.r_max}, {"z_min", c.grid.z_min},
                {"z_max", c.grid.z_max}}},
      {"materials",
       {{"air", material_json(c.air)}, {"water", material_json(c.water)},
        {"polystyrene", material_json(c.polystyrene)}}},
      {"ambient", {{"p_pa", c.ambient_p}}},
      {"transwell", {{"z_start", c.transwell.z_start}, {"length", c.transwell.length},
                     {"radius", c.transwell.radius}}},
      {"hydrophone", {{"enabled", c.hydrophone.enabled}, {"radius", c.hydrophone.radius},
                      {"z_tip", opt_json(c.hydrophone.z_tip)}, {"z_end", opt_json(c.hydrophone.z_end)}}},
      {"shock", {{"peak_psi", c.shock.peak_psi}, {"profile", enum_name(c.shock.profile, kProfiles)},
                 {"tau_us", c.shock.tau_us}, {"arrival_us", c.shock.arrival_us},
                 {"initial_position", opt_json(c.shock.initial_position)}}},
      {"numerics", {{"cfl", c.numerics.cfl}, {"limiter", enum_name(c.numerics.limiter, kLimiters)},
                    {"transverse", enum_name(c.numerics.transverse, kTransverse)},
                    {"source_terms", c.numerics.source_terms},
                    {"splitting", enum_name(c.numerics.splitting, kSplitting)},
                    {"threads", c.numerics.threads}}},
      {"run", {{"t_end_us", c.t_end_us}, {"frame_times_us", c.frame_times_us}}},
      {"gauges", gauges},
      {"cavitation", {{"p_vapor_pa", c.p_vapor}}},
      {"output", {{"dir", c.output_dir}}},
  };
  return root.dump(indent);
}

void validate_config(const ScenarioConfig& c) {
  c.air.validate();
  c.water.validate();
  c.polystyrene.validate();
  if (c.air.eos.p_inf != 0.0) throw ConfigError("materials.air: p_inf must be 0 (ideal gas)");
  if (!(c.ambient_p > 0.0)) throw ConfigError("ambient.p_pa must be > 0");
  if (!(c.shock.peak_psi > 0.0)) throw ConfigError("shock.peak_psi must be > 0");
  if (c.shock.profile == ProfileKind::StepExponential && !(c.shock.tau_us > 0.0))
    throw ConfigError("shock.tau_us must be > 0");
  if (!(c.numerics.cfl > 0.0 && c.numerics.cfl < 1.0)) throw ConfigError("numerics.cfl must lie in (0, 1)");
  if (c.numerics.threads < 1) throw ConfigError("numerics.threads must be >= 1");
  if (!(c.t_end_us > 0.0)) throw ConfigError("run.t_end_us must be > 0");
  for (double t : c.frame_times_us)
    if (!(t > 0.0 && t <= c.t_end_us)) throw ConfigError("run.frame_times_us must lie in (0, t_end_us]");
  if (!std::is_sorted(c.frame_times_us.begin(), c.frame_times_us.end()) ||
      std::adjacent_find(c.frame_times_us.begin(), c.frame_times_us.end()) != c.frame_times_us.end())
    throw ConfigError("run.frame_times_us must be strictly increasing");
  if (!(c.p_vapor > 0.0)) throw ConfigError("cavitation.p_vapor_pa must be > 0");
  if (c.gauges) {
    for (std::size_t a = 0; a < c.gauges->size(); ++a)
      for (std::size_t b = a + 1; b < c.gauges->size(); ++b)
        if ((*c.gauges)[a].id == (*c.gauges)[b].id)
          throw ConfigError("gauges: duplicate id '" + (*c.gauges)[a].id + "'");
  }
}

std::vector<GaugeConfig> default_gauges(const ScenarioConfig& c) {
  const double z0 = c.transwell.z_start;
  const double z1 = c.transwell.z_start + c.transwell.length;
  return {
      {"1", 0.0, z0 + 0.001},
      {"2", 0.0, 0.5 * (z0 + z1)},
      {"3", 2.0 * c.hydrophone.radius, z1 - 0.0005},
  };
}

}  // namespace shockcell

#pragma once

// Tammann (stiffened gas) equation of state: p = (gamma - 1) rho e - gamma p_inf.

#include <string>

namespace shockcell {

inline constexpr double kAtmospherePa = 101325.0;
inline constexpr double kPaPerPsi = 6894.757;

/// Absolute pressure (Pa) to gauge psi, atmospheric pressure mapping to 0.
inline double to_gauge_psi(double p_abs) { return (p_abs - kAtmospherePa) / kPaPerPsi; }
inline double from_gauge_psi(double psi) { return kAtmospherePa + psi * kPaPerPsi; }

struct Eos {
  double gamma = 1.4;
  double p_inf = 0.0;  // Pa

  bool operator==(const Eos&) const = default;
};

struct MaterialParams {
  std::string label;
  Eos eos;
  double rho_ref = 1.0;  // ambient density, kg/m^3

  /// Throws ConfigError unless gamma > 1, p_inf >= 0 and rho_ref > 0.
  void validate() const;
};

MaterialParams air_material();
MaterialParams water_material();
MaterialParams polystyrene_material();

struct PrimitiveState {
  double rho = 0.0;
  double u_r = 0.0;
  double u_z = 0.0;
  double p = 0.0;  // absolute; liquids may sit in tension as long as p + p_inf > 0
};

struct ConservedState {
  double rho = 0.0;
  double mom_r = 0.0;
  double mom_z = 0.0;
  double E = 0.0;

  bool operator==(const ConservedState&) const = default;
};

/// Internal energy per unit volume, rho e = (p + gamma p_inf) / (gamma - 1).
inline double internal_energy_density(double p, const Eos& m) {
  return (p + m.gamma * m.p_inf) / (m.gamma - 1.0);
}

/// Pressure from rho e; no admissibility checks. Used by the hot loops.
inline double pressure_from_internal(double rho_e, const Eos& m) {
  return (m.gamma - 1.0) * rho_e - m.gamma * m.p_inf;
}

double pressure_from_conserved(const ConservedState& q, const Eos& m);
ConservedState energy_from_primitive(const PrimitiveState& w, const Eos& m);
PrimitiveState primitive_from_conserved(const ConservedState& q, const Eos& m);
double sound_speed(const PrimitiveState& w, const Eos& m);
double acoustic_impedance(const PrimitiveState& w, const Eos& m);

inline double pressure_from_conserved(const ConservedState& q, const MaterialParams& m) {
  return pressure_from_conserved(q, m.eos);
}
inline ConservedState energy_from_primitive(const PrimitiveState& w, const MaterialParams& m) {
  return energy_from_primitive(w, m.eos);
}
inline double sound_speed(const PrimitiveState& w, const MaterialParams& m) {
  return sound_speed(w, m.eos);
}
inline double acoustic_impedance(const PrimitiveState& w, const MaterialParams& m) {
  return acoustic_impedance(w, m.eos);
}

}  // namespace shockcell

#include "shockcell/eos.hpp"

#include <cmath>
#include <sstream>

#include "shockcell/errors.hpp"

namespace shockcell {

namespace {

[[noreturn]] void throw_invalid(const char* where, double rho, double p, const Eos& m) {
  std::ostringstream os;
  os.precision(17);
  os << where << ": inadmissible state rho=" << rho << " p=" << p << " (gamma=" << m.gamma
     << ", p_inf=" << m.p_inf << ")";
  throw InvalidStateError(os.str());
}

void check_admissible(const char* where, double rho, double p, const Eos& m) {
  if (!(rho > 0.0) || !(p + m.p_inf > 0.0)) throw_invalid(where, rho, p, m);
}

}  // namespace

void MaterialParams::validate() const {
  if (!(eos.gamma > 1.0)) throw ConfigError("material '" + label + "': gamma must be > 1");
  if (!(eos.p_inf >= 0.0)) throw ConfigError("material '" + label + "': p_inf must be >= 0");
  if (!(rho_ref > 0.0)) throw ConfigError("material '" + label + "': rho_ref must be > 0");
}

MaterialParams air_material() { return {"air", {1.4, 0.0}, 1.2}; }
MaterialParams water_material() { return {"water", {7.15, 0.3e9}, 1000.0}; }
MaterialParams polystyrene_material() { return {"polystyrene", {1.1, 4.79e9}, 1050.0}; }

double pressure_from_conserved(const ConservedState& q, const Eos& m) {
  if (!(q.rho > 0.0)) throw_invalid("pressure_from_conserved", q.rho, NAN, m);
  const double kinetic = 0.5 * (q.mom_r * q.mom_r + q.mom_z * q.mom_z) / q.rho;
  const double p = pressure_from_internal(q.E - kinetic, m);
  check_admissible("pressure_from_conserved", q.rho, p, m);
  return p;
}

ConservedState energy_from_primitive(const PrimitiveState& w, const Eos& m) {
  check_admissible("energy_from_primitive", w.rho, w.p, m);
  const double kinetic = 0.5 * w.rho * (w.u_r * w.u_r + w.u_z * w.u_z);
  return {w.rho, w.rho * w.u_r, w.rho * w.u_z, internal_energy_density(w.p, m) + kinetic};
}

PrimitiveState primitive_from_conserved(const ConservedState& q, const Eos& m) {
  const double p = pressure_from_conserved(q, m);
  return {q.rho, q.mom_r / q.rho, q.mom_z / q.rho, p};
}

double sound_speed(const PrimitiveState& w, const Eos& m) {
  check_admissible("sound_speed", w.rho, w.p, m);
  return std::sqrt(m.gamma * (w.p + m.p_inf) / w.rho);
}

double acoustic_impedance(const PrimitiveState& w, const Eos& m) {
  return w.rho * sound_speed(w, m);
}

}  // namespace shockcell

#include "shockcell/axisource.hpp"

#include <cmath>

#include "shockcell/errors.hpp"

namespace shockcell {

PrimitiveState source_step_exact(const PrimitiveState& w, const Eos& m, double r, double dt) {
  if (!(r > 0.0)) throw InvalidStateError("source_step_exact: radius must be positive");
  const double a = dt * w.u_r / r;
  const double g = m.gamma;
  // e1 = exp(-a), eg = exp(-gamma a), carried through expm1 for small a.
  const double em1 = std::expm1(-a);
  const double egm1 = std::expm1(-g * a);
  const double speed2 = w.u_r * w.u_r + w.u_z * w.u_z;

  PrimitiveState out = w;
  out.rho = (1.0 + em1) * w.rho;
  out.p = (1.0 + egm1) * w.p + m.p_inf * egm1 - 0.5 * w.rho * speed2 * (em1 - egm1);
  if (!(out.rho > 0.0) || !(out.p + m.p_inf > 0.0))
    throw InvalidStateError("source_step_exact: update leaves the admissible set");
  return out;
}

ConservedState source_step_exact(const ConservedState& q, const Eos& m, double r, double dt) {
  const PrimitiveState w = primitive_from_conserved(q, m);
  if (w.u_r == 0.0) return q;
  return energy_from_primitive(source_step_exact(w, m, r, dt), m);
}

}  // namespace shockcell

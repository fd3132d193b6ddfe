#pragma once

#include "shockcell/eos.hpp"

namespace shockcell {

/// Exact flow over `dt` of the geometric source ODE of the axisymmetric Euler
/// equations at radius r > 0:
///   d rho/dt = -(u_r/r) rho,  d u_r/dt = d u_z/dt = 0,
///   d p/dt   = -(u_r/r) (gamma (p + p_inf) + (gamma - 1)/2 rho |u|^2).
/// Velocities come back bit-identical. Throws InvalidStateError when the
/// updated state is inadmissible.
PrimitiveState source_step_exact(const PrimitiveState& w, const Eos& m, double r, double dt);

/// Conserved-variable wrapper; velocities are preserved up to the rounding of
/// mom = rho u.
ConservedState source_step_exact(const ConservedState& q, const Eos& m, double r, double dt);

}  // namespace shockcell

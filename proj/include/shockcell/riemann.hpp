#pragma once

// One-dimensional normal Riemann solvers for the Euler equations with the
// Tammann EOS. All states are expressed in the frame of the sweep: `un` is the
// velocity along the edge normal, `ut` the passively advected transverse one.
// Four-vectors are ordered (rho, normal momentum, transverse momentum, E).

#include <array>

#include "shockcell/eos.hpp"

namespace shockcell {

using Vec4 = std::array<double, 4>;

struct NormalState {
  double rho = 0.0;
  double un = 0.0;
  double ut = 0.0;
  double p = 0.0;
};

struct RiemannInput {
  NormalState left;
  Eos eos_left;
  NormalState right;
  Eos eos_right;
};

enum class WaveKind { Shock, Rarefaction };

struct RiemannFan {
  double p_star = 0.0;
  double u_star = 0.0;
  double rho_star_left = 0.0;
  double rho_star_right = 0.0;
  WaveKind left_kind = WaveKind::Rarefaction;
  WaveKind right_kind = WaveKind::Rarefaction;
  // For a shock head == tail == shock speed. For a rarefaction the head is the
  // characteristic bounding the undisturbed state.
  double left_head = 0.0;
  double left_tail = 0.0;
  double right_head = 0.0;
  double right_tail = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |f_L + f_R + du| / velocity scale at p_star
};

struct Fluctuations {
  Vec4 amdq{};  // A^- dQ: net effect of left-going waves on the left cell
  Vec4 apdq{};  // A^+ dQ: net effect of right-going waves on the right cell
  std::array<Vec4, 3> waves{};
  std::array<double, 3> speeds{};
};

struct ExactSolverOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

/// Conserved 4-vector of a normal-frame state.
Vec4 conserved(const NormalState& w, const Eos& m);
/// Physical normal flux of a normal-frame state.
Vec4 normal_flux(const NormalState& w, const Eos& m);

/// Star state of the two-material Riemann problem. Throws Error(NoConvergence)
/// or Error(Vacuum); InvalidStateError when either input is inadmissible.
RiemannFan exact_star(const RiemannInput& inp, const ExactSolverOptions& opts = {});

/// Self-similar solution on the ray x/t = xi.
NormalState sample_fan(const RiemannFan& fan, const RiemannInput& inp, double xi);

/// Same as sample_fan but restricted to one side of the contact: used when a
/// fixed material map decides which material a point belongs to.
NormalState sample_fan_side(const RiemannFan& fan, const RiemannInput& inp, double xi, bool left_side);

/// Three-wave HLLC solve with Davis speed bounds. Both sides must share one EOS.
Fluctuations hllc_fluctuations(const RiemannInput& inp);

/// Fluctuations at a material interface from the exact star state, with the
/// contact held on the edge: amdq = f(q*L) - f(qL), apdq = f(qR) - f(q*R).
Fluctuations interface_fluctuations(const RiemannInput& inp);

/// Picks interface_fluctuations or hllc_fluctuations by comparing the EOS.
Fluctuations hybrid_edge_solve(const RiemannInput& inp);

/// True when the edge separates two different materials.
inline bool is_material_edge(const RiemannInput& inp) { return !(inp.eos_left == inp.eos_right); }

}  // namespace shockcell

#include "shockcell/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shockcell/errors.hpp"

namespace shockcell {

namespace {

void check_side(const NormalState& w, const Eos& m, const char* side) {
  if (!(w.rho > 0.0) || !(w.p + m.p_inf > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "riemann: inadmissible " << side << " state rho=" << w.rho << " p=" << w.p
       << " p_inf=" << m.p_inf;
    throw InvalidStateError(os.str());
  }
}

// Precomputed per-side data for the pressure function.
struct Side {
  double rho, u, p, c;
  double big_p;  // p + p_inf
  double gamma, p_inf;
  double shock_a, shock_b;  // A_K, B_K of the shock branch
};

Side make_side(const NormalState& w, const Eos& m) {
  Side s{};
  s.rho = w.rho;
  s.u = w.un;
  s.p = w.p;
  s.gamma = m.gamma;
  s.p_inf = m.p_inf;
  s.big_p = w.p + m.p_inf;
  s.c = std::sqrt(m.gamma * s.big_p / w.rho);
  s.shock_a = 2.0 / ((m.gamma + 1.0) * w.rho);
  s.shock_b = ((m.gamma - 1.0) * w.p + 2.0 * m.gamma * m.p_inf) / (m.gamma + 1.0);
  return s;
}

// Velocity jump across the K-wave as a function of star pressure, and its slope.
void wave_function(const Side& s, double p, double& f, double& df) {
  if (p > s.p) {
    const double root = std::sqrt(s.shock_a / (p + s.shock_b));
    f = (p - s.p) * root;
    df = root * (1.0 - 0.5 * (p - s.p) / (p + s.shock_b));
  } else {
    const double k = (s.gamma - 1.0) / (2.0 * s.gamma);
    const double log_ratio = std::log1p((p - s.p) / s.big_p);
    f = 2.0 * s.c / (s.gamma - 1.0) * std::expm1(k * log_ratio);
    df = std::exp(-(s.gamma + 1.0) / (2.0 * s.gamma) * log_ratio) / (s.rho * s.c);
  }
}

double star_density(const Side& s, double p_star) {
  const double ratio = (p_star + s.p_inf) / s.big_p;
  if (p_star > s.p) {
    const double mu = (s.gamma - 1.0) / (s.gamma + 1.0);
    return s.rho * (ratio + mu) / (mu * ratio + 1.0);
  }
  return s.rho * std::pow(ratio, 1.0 / s.gamma);
}

Vec4 sub(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }

Vec4 axpy(const Vec4& y, double a, const Vec4& x) {
  return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2], y[3] + a * x[3]};
}

// Interior of a rarefaction fan; sign = -1 for the left family, +1 for the right.
NormalState fan_interior(const NormalState& w, const Eos& m, double c, double xi, double sign) {
  const double g = m.gamma;
  const double u = 2.0 / (g + 1.0) * (-sign * c + 0.5 * (g - 1.0) * w.un + xi);
  const double cf = 2.0 / (g + 1.0) * (c - sign * 0.5 * (g - 1.0) * (w.un - xi));
  const double ratio = cf / c;
  const double rho = w.rho * std::pow(ratio, 2.0 / (g - 1.0));
  const double big_p = (w.p + m.p_inf) * std::pow(ratio, 2.0 * g / (g - 1.0));
  return {rho, u, w.ut, big_p - m.p_inf};
}

}  // namespace

Vec4 conserved(const NormalState& w, const Eos& m) {
  const double kinetic = 0.5 * w.rho * (w.un * w.un + w.ut * w.ut);
  return {w.rho, w.rho * w.un, w.rho * w.ut, internal_energy_density(w.p, m) + kinetic};
}

Vec4 normal_flux(const NormalState& w, const Eos& m) {
  const double mass = w.rho * w.un;
  const double energy = internal_energy_density(w.p, m) + 0.5 * w.rho * (w.un * w.un + w.ut * w.ut);
  return {mass, mass * w.un + w.p, mass * w.ut, w.un * (energy + w.p)};
}

RiemannFan exact_star(const RiemannInput& inp, const ExactSolverOptions& opts) {
  check_side(inp.left, inp.eos_left, "left");
  check_side(inp.right, inp.eos_right, "right");
  if (!(opts.tol > 0.0)) throw ConfigError("exact_star: tol must be > 0");

  const Side l = make_side(inp.left, inp.eos_left);
  const Side r = make_side(inp.right, inp.eos_right);
  const double du = r.u - l.u;
  const double vel_scale = std::max({1.0, std::abs(l.u), std::abs(r.u), l.c, r.c});

  auto residual = [&](double p, double& dF) {
    double fl, dfl, fr, dfr;
    wave_function(l, p, fl, dfl);
    wave_function(r, p, fr, dfr);
    dF = dfl + dfr;
    return fl + fr + du;
  };

  // Admissible star pressures satisfy p + p_inf > 0 on both sides.
  const double p_floor = -std::min(l.p_inf, r.p_inf);
  const double p_scale = std::max(l.big_p, r.big_p);
  double lo = p_floor + 1e-14 * p_scale;
  double dF = 0.0;
  const double f_lo = residual(lo, dF);
  if (f_lo > 0.0) {
    std::ostringstream os;
    os.precision(6);
    os << "exact_star: velocity jump " << du << " m/s exceeds the vacuum bound";
    throw Error(ErrorKind::Vacuum, os.str());
  }

  // Acoustic (impedance-weighted) initial guess.
  const double zl = l.rho * l.c;
  const double zr = r.rho * r.c;
  double p = (zr * l.p + zl * r.p - zl * zr * du) / (zl + zr);

  double hi = std::max({p, l.p, r.p, lo});
  while (residual(hi, dF) < 0.0) hi = p_floor + 2.0 * (hi - p_floor) + p_scale;
  if (!(p > lo && p <= hi)) p = 0.5 * (lo + hi);

  RiemannFan fan;
  bool converged = f_lo == 0.0;
  if (converged) p = lo;
  int it = 0;
  while (!converged) {
    const double f = residual(p, dF);
    if (std::abs(f) <= opts.tol * vel_scale) {
      converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    ++it;
    if (f < 0.0) lo = p; else hi = p;
    double next = p - f / dF;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == p || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(p - p_floor)) {
      p = next;
      converged = std::abs(residual(p, dF)) <= opts.tol * vel_scale;
      break;
    }
    p = next;
  }
  if (!converged) {
    std::ostringstream os;
    os << "exact_star: no convergence after " << it << " iterations";
    throw Error(ErrorKind::NoConvergence, os.str());
  }

  double fl, dfl, fr, dfr;
  wave_function(l, p, fl, dfl);
  wave_function(r, p, fr, dfr);
  fan.p_star = p;
  fan.u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);
  fan.iterations = it;
  fan.residual = std::abs(fl + fr + du) / vel_scale;
  fan.rho_star_left = star_density(l, p);
  fan.rho_star_right = star_density(r, p);

  const double pl_ratio = (p + l.p_inf) / l.big_p;
  const double pr_ratio = (p + r.p_inf) / r.big_p;
  if (p > l.p) {
    fan.left_kind = WaveKind::Shock;
    const double g = l.gamma;
    fan.left_head = fan.left_tail =
        l.u - l.c * std::sqrt((g + 1.0) / (2.0 * g) * pl_ratio + (g - 1.0) / (2.0 * g));
  } else {
    fan.left_kind = WaveKind::Rarefaction;
    const double c_star = l.c * std::pow(pl_ratio, (l.gamma - 1.0) / (2.0 * l.gamma));
    fan.left_head = l.u - l.c;
    fan.left_tail = fan.u_star - c_star;
  }
  if (p > r.p) {
    fan.right_kind = WaveKind::Shock;
    const double g = r.gamma;
    fan.right_head = fan.right_tail =
        r.u + r.c * std::sqrt((g + 1.0) / (2.0 * g) * pr_ratio + (g - 1.0) / (2.0 * g));
  } else {
    fan.right_kind = WaveKind::Rarefaction;
    const double c_star = r.c * std::pow(pr_ratio, (r.gamma - 1.0) / (2.0 * r.gamma));
    fan.right_head = r.u + r.c;
    fan.right_tail = fan.u_star + c_star;
  }
  return fan;
}

NormalState sample_fan_side(const RiemannFan& fan, const RiemannInput& inp, double xi, bool left_side) {
  if (left_side) {
    const NormalState& w = inp.left;
    const NormalState star{fan.rho_star_left, fan.u_star, w.ut, fan.p_star};
    if (fan.left_kind == WaveKind::Shock) return xi < fan.left_head ? w : star;
    if (xi <= fan.left_head) return w;
    if (xi >= fan.left_tail) return star;
    const double c = std::sqrt(inp.eos_left.gamma * (w.p + inp.eos_left.p_inf) / w.rho);
    return fan_interior(w, inp.eos_left, c, xi, -1.0);
  }
  const NormalState& w = inp.right;
  const NormalState star{fan.rho_star_right, fan.u_star, w.ut, fan.p_star};
  if (fan.right_kind == WaveKind::Shock) return xi > fan.right_head ? w : star;
  if (xi >= fan.right_head) return w;
  if (xi <= fan.right_tail) return star;
  const double c = std::sqrt(inp.eos_right.gamma * (w.p + inp.eos_right.p_inf) / w.rho);
  return fan_interior(w, inp.eos_right, c, xi, 1.0);
}

NormalState sample_fan(const RiemannFan& fan, const RiemannInput& inp, double xi) {
  return sample_fan_side(fan, inp, xi, xi < fan.u_star);
}

Fluctuations hllc_fluctuations(const RiemannInput& inp) {
  check_side(inp.left, inp.eos_left, "left");
  check_side(inp.right, inp.eos_right, "right");
  const NormalState& wl = inp.left;
  const NormalState& wr = inp.right;
  const Eos& m = inp.eos_left;

  const double cl = std::sqrt(m.gamma * (wl.p + m.p_inf) / wl.rho);
  const double cr = std::sqrt(inp.eos_right.gamma * (wr.p + inp.eos_right.p_inf) / wr.rho);
  const double sl = std::min(wl.un - cl, wr.un - cr);
  const double sr = std::max(wl.un + cl, wr.un + cr);
  const double ml = wl.rho * (sl - wl.un);
  const double mr = wr.rho * (sr - wr.un);
  const double s_star = (wr.p - wl.p + ml * wl.un - mr * wr.un) / (ml - mr);

  const Vec4 ql = conserved(wl, m);
  const Vec4 qr = conserved(wr, inp.eos_right);
  auto star = [&](const NormalState& w, const Vec4& q, double s) {
    const double fac = (s - w.un) / (s - s_star);
    const double e_star = q[3] + (s_star - w.un) * (w.rho * s_star + w.p / (s - w.un));
    return Vec4{fac * w.rho, fac * w.rho * s_star, fac * q[2], fac * e_star};
  };
  const Vec4 qsl = star(wl, ql, sl);
  const Vec4 qsr = star(wr, qr, sr);

  Fluctuations out;
  out.waves = {sub(qsl, ql), sub(qsr, qsl), sub(qr, qsr)};
  out.speeds = {sl, s_star, sr};

  const Vec4 fl = normal_flux(wl, m);
  const Vec4 fr = normal_flux(wr, inp.eos_right);
  Vec4 f;
  if (sl >= 0.0) f = fl;
  else if (s_star >= 0.0) f = axpy(fl, sl, out.waves[0]);
  else if (sr > 0.0) f = axpy(fr, -sr, out.waves[2]);
  else f = fr;
  out.amdq = sub(f, fl);
  out.apdq = sub(fr, f);
  return out;
}

Fluctuations hybrid_edge_solve(const RiemannInput& inp) {
  return is_material_edge(inp) ? interface_fluctuations(inp) : hllc_fluctuations(inp);
}

Fluctuations interface_fluctuations(const RiemannInput& inp) {
  const RiemannFan fan = exact_star(inp);
  const NormalState sl{fan.rho_star_left, fan.u_star, inp.left.ut, fan.p_star};
  const NormalState sr{fan.rho_star_right, fan.u_star, inp.right.ut, fan.p_star};
  const Vec4 ql = conserved(inp.left, inp.eos_left);
  const Vec4 qr = conserved(inp.right, inp.eos_right);
  const Vec4 qsl = conserved(sl, inp.eos_left);
  const Vec4 qsr = conserved(sr, inp.eos_right);

  Fluctuations out;
  out.waves = {sub(qsl, ql), sub(qsr, qsl), sub(qr, qsr)};
  out.speeds = {0.5 * (fan.left_head + fan.left_tail), 0.0, 0.5 * (fan.right_head + fan.right_tail)};

  // Contact held on the edge: each side only sees its own waves. The jump
  // u* (q*R - q*L) carried by the contact is dropped, so a moving contact is
  // not conservative to O(u*).
  out.amdq = sub(normal_flux(sl, inp.eos_left), normal_flux(inp.left, inp.eos_left));
  out.apdq = sub(normal_flux(inp.right, inp.eos_right), normal_flux(sr, inp.eos_right));
  return out;
}

}  // namespace shockcell

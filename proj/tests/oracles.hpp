#pragma once

// Reference computations written independently of the library code paths
// they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>

#include "shockcell/eos.hpp"
#include "shockcell/riemann.hpp"

namespace oracle {

using shockcell::Eos;
using shockcell::NormalState;

// Distance in units in the last place between two finite doubles.
inline std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  auto key = [](double x) {
    std::int64_t i;
    std::memcpy(&i, &x, sizeof i);
    return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
  };
  const std::int64_t ka = key(a), kb = key(b);
  return ka > kb ? static_cast<std::uint64_t>(ka - kb) : static_cast<std::uint64_t>(kb - ka);
}

// Pressure function of one side of the Riemann problem, shock or rarefaction
// branch, for the stiffened gas.
inline double side_function(double p, const NormalState& w, const Eos& m) {
  const double g = m.gamma, pi = m.p_inf;
  if (p > w.p) {
    // ideal-gas shock branch in the shifted pressure P = p + p_inf
    const double a = 2.0 / ((g + 1.0) * w.rho);
    const double b = (g - 1.0) / (g + 1.0) * (w.p + pi);
    return (p - w.p) * std::sqrt(a / (p + pi + b));
  }
  const double c = std::sqrt(g * (w.p + pi) / w.rho);
  return 2.0 * c / (g - 1.0) * (std::pow((p + pi) / (w.p + pi), (g - 1.0) / (2.0 * g)) - 1.0);
}

// Star pressure by plain bisection on the monotone pressure function.
inline double star_pressure_bisection(const NormalState& l, const Eos& ml, const NormalState& r, const Eos& mr) {
  const double floor = -std::min(ml.p_inf, mr.p_inf);
  double lo = floor + 1e-12 * std::max(1.0, std::abs(floor));
  double hi = std::max({l.p, r.p, 1.0});
  auto f = [&](double p) { return side_function(p, l, ml) + side_function(p, r, mr) + (r.un - l.un); };
  while (f(hi) < 0.0) hi = 2.0 * hi + std::abs(floor);
  for (int k = 0; k < 400 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Textbook HLLC edge flux with Davis speed bounds, single material.
inline std::array<double, 4> hllc_flux(const NormalState& l, const NormalState& r, const Eos& m) {
  auto c = [&](const NormalState& w) { return std::sqrt(m.gamma * (w.p + m.p_inf) / w.rho); };
  auto energy = [&](const NormalState& w) {
    return (w.p + m.gamma * m.p_inf) / (m.gamma - 1.0) + 0.5 * w.rho * (w.un * w.un + w.ut * w.ut);
  };
  const double sl = std::min(l.un - c(l), r.un - c(r));
  const double sr = std::max(l.un + c(l), r.un + c(r));
  const double sm = (r.p - l.p + l.rho * l.un * (sl - l.un) - r.rho * r.un * (sr - r.un)) /
                    (l.rho * (sl - l.un) - r.rho * (sr - r.un));
  auto flux = [&](const NormalState& w) {
    const double e = energy(w);
    return std::array<double, 4>{w.rho * w.un, w.rho * w.un * w.un + w.p, w.rho * w.un * w.ut, w.un * (e + w.p)};
  };
  auto star = [&](const NormalState& w, double s) {
    const double e = energy(w);
    const double d = w.rho * (s - w.un) / (s - sm);
    return std::array<double, 4>{d, d * sm, d * w.ut, d * (e / w.rho + (sm - w.un) * (sm + w.p / (w.rho * (s - w.un))))};
  };
  auto q = [&](const NormalState& w) {
    return std::array<double, 4>{w.rho, w.rho * w.un, w.rho * w.ut, energy(w)};
  };
  std::array<double, 4> out{};
  if (sl >= 0.0) return flux(l);
  if (sr <= 0.0) return flux(r);
  const NormalState& w = sm >= 0.0 ? l : r;
  const double s = sm >= 0.0 ? sl : sr;
  const auto f = flux(w), qs = star(w, s), q0 = q(w);
  for (int k = 0; k < 4; ++k) out[k] = f[k] + s * (qs[k] - q0[k]);
  return out;
}

struct IdealShock {
  double mach, speed, rho2, u2, p2;
};

// Normal shock running into gas at rest, from the pressure jump, by bisection
// on the Mach number.
inline IdealShock ideal_gas_shock(double overpressure, double rho1, double p1, double gamma) {
  const double target = (p1 + overpressure) / p1;
  double lo = 1.0, hi = 50.0;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    const double ratio = 1.0 + 2.0 * gamma / (gamma + 1.0) * (m * m - 1.0);
    (ratio < target ? lo : hi) = m;
  }
  const double m = 0.5 * (lo + hi);
  const double c1 = std::sqrt(gamma * p1 / rho1);
  const double rho2 = rho1 * (gamma + 1.0) * m * m / ((gamma - 1.0) * m * m + 2.0);
  const double s = m * c1;
  return {m, s, rho2, s * (1.0 - rho1 / rho2), p1 + overpressure};
}

// Classical RK4 on the axisymmetric source system with frozen velocities.
inline shockcell::PrimitiveState source_rk4(const shockcell::PrimitiveState& w, const Eos& m, double r, double dt,
                                            int substeps) {
  const double k = w.u_r / r;
  const double ke = 0.5 * (m.gamma - 1.0) * (w.u_r * w.u_r + w.u_z * w.u_z);
  auto rhs = [&](double rho, double p, double& drho, double& dp) {
    drho = -k * rho;
    dp = -k * (m.gamma * (p + m.p_inf) + ke * rho);
  };
  double rho = w.rho, p = w.p;
  const double h = dt / substeps;
  for (int n = 0; n < substeps; ++n) {
    double r1, p1, r2, p2, r3, p3, r4, p4;
    rhs(rho, p, r1, p1);
    rhs(rho + 0.5 * h * r1, p + 0.5 * h * p1, r2, p2);
    rhs(rho + 0.5 * h * r2, p + 0.5 * h * p2, r3, p3);
    rhs(rho + h * r3, p + h * p3, r4, p4);
    rho += h / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
    p += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
  }
  return {rho, w.u_r, w.u_z, p};
}

// State on the ray x/t = xi inside a left-facing ideal-gas rarefaction.
inline NormalState left_rarefaction_state(const NormalState& l, double gamma, double xi) {
  const double cl = std::sqrt(gamma * l.p / l.rho);
  const double u = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * l.un + xi);
  const double c = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * (l.un - xi));
  const double rho = l.rho * std::pow(c / cl, 2.0 / (gamma - 1.0));
  return {rho, u, l.ut, l.p * std::pow(rho / l.rho, gamma)};
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace oracle

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shockcell/axisource.hpp"
#include "shockcell/errors.hpp"

using namespace shockcell;

namespace {

const Eos& material(int k) {
  static const Eos m[3] = {{1.4, 0.0}, {7.15, 3e8}, {1.1, 4.79e9}};
  return m[k];
}
const double kRho[3] = {1.2, 1000.0, 1050.0};

double relerr(double a, double b, double scale) { return std::abs(a - b) / scale; }

}  // namespace

TEST_CASE("no radial velocity means no change") {
  const PrimitiveState w{1000.0, 0.0, 12.0, 3e5};
  const PrimitiveState out = source_step_exact(w, material(1), 0.004, 1e-6);
  CHECK(out.rho == w.rho);
  CHECK(out.p == w.p);
  CHECK(out.u_z == w.u_z);
  const ConservedState q = energy_from_primitive(w, material(1));
  CHECK(source_step_exact(q, material(1), 0.004, 1e-6) == q);
}

TEST_CASE("density factor example") {
  const PrimitiveState out = source_step_exact(PrimitiveState{1000.0, 1.0, 0.0, 101325.0}, material(1), 0.01, 1e-6);
  CHECK(out.rho == doctest::Approx(1000.0 * std::exp(-1e-4)).epsilon(1e-15));
  CHECK(out.rho == doctest::Approx(999.90000).epsilon(1e-8));
}

TEST_CASE("ideal gas drops the stiffness term") {
  const PrimitiveState w{1.5, 40.0, 10.0, 2e5};
  const double r = 0.002, dt = 1e-6;
  const PrimitiveState out = source_step_exact(w, material(0), r, dt);
  const double a = std::exp(-dt * w.u_r / r), b = std::exp(-dt * 1.4 * w.u_r / r);
  const double expect = b * w.p - 0.5 * w.rho * (w.u_r * w.u_r + w.u_z * w.u_z) * (a - b);
  CHECK(out.p == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("inadmissible result is reported") {
  // strong radial outflow near the axis drives water far into tension
  CHECK_THROWS_AS(source_step_exact(PrimitiveState{1000.0, 500.0, 0.0, 101325.0}, material(1), 1e-5, 1e-6),
                  InvalidStateError);
}

TEST_CASE("property: closed form against a 10^4-substep RK4 oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const int m = pick(rng);
    PrimitiveState w;
    w.rho = kRho[m] * oracle::log_uniform(rng, 0.5, 2.0);
    w.p = oracle::log_uniform(rng, 1e4, 1e7);
    const double c = std::sqrt(material(m).gamma * (w.p + material(m).p_inf) / w.rho);
    w.u_r = 0.3 * c * u(rng);
    w.u_z = 0.3 * c * u(rng);
    const double r = oracle::log_uniform(rng, 5e-5, 0.02);
    // a CFL-sized step: at most ~half a cell crossing at this radius
    const double dt = 0.3 * oracle::log_uniform(rng, 0.01, 1.0) * r / (std::abs(w.u_r) + c);
    PrimitiveState exact;
    try {
      exact = source_step_exact(w, material(m), r, dt);
    } catch (const InvalidStateError&) {
      continue;
    }
    const PrimitiveState ref = oracle::source_rk4(w, material(m), r, dt, 10000);
    worst = std::max(worst, relerr(exact.rho, ref.rho, ref.rho));
    worst = std::max(worst, relerr(exact.p, ref.p, std::abs(ref.p) + material(m).p_inf));
    CHECK(exact.u_r == w.u_r);
    CHECK(exact.u_z == w.u_z);
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("property: semigroup") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0), frac(0.05, 0.95);
  std::uniform_int_distribution<int> pick(0, 2);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const int m = pick(rng);
    PrimitiveState w;
    w.rho = kRho[m] * oracle::log_uniform(rng, 0.5, 2.0);
    w.p = oracle::log_uniform(rng, 1e4, 1e7);
    const double c = std::sqrt(material(m).gamma * (w.p + material(m).p_inf) / w.rho);
    w.u_r = 0.3 * c * u(rng);
    w.u_z = 0.3 * c * u(rng);
    const double r = oracle::log_uniform(rng, 5e-5, 0.02);
    const double dt = 0.3 * r / (std::abs(w.u_r) + c);
    const double dt1 = frac(rng) * dt, dt2 = dt - dt1;
    PrimitiveState one, two;
    try {
      one = source_step_exact(w, material(m), r, dt1 + dt2);
      two = source_step_exact(source_step_exact(w, material(m), r, dt1), material(m), r, dt2);
    } catch (const InvalidStateError&) {
      continue;
    }
    worst = std::max(worst, relerr(one.rho, two.rho, one.rho));
    worst = std::max(worst, relerr(one.p, two.p, std::abs(one.p) + material(m).p_inf));
  }
  CHECK(worst <= 1e-12);
}

#include "shockcell/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "shockcell/axisource.hpp"
#include "shockcell/errors.hpp"
#include "shockcell/transverse.hpp"

namespace shockcell {

namespace {

inline Vec4 add(const Vec4& a, const Vec4& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
inline Vec4 sub(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
inline Vec4 scale(double a, const Vec4& x) { return {a * x[0], a * x[1], a * x[2], a * x[3]}; }
inline double dot(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }
// Sweep frame of the z-direction to global (rho, mom_r, mom_z, E) and back.
inline Vec4 swap_momenta(const Vec4& v) { return {v[0], v[2], v[1], v[3]}; }

inline double mc_limiter(double theta) {
  return std::max(0.0, std::min({0.5 * (1.0 + theta), 2.0, 2.0 * theta}));
}

// Flux change of state w for an isentropic perturbation (dp, du).
Vec4 acoustic_flux_jump(const NormalState& w, const Eos& m, double dp, double du) {
  const double drho = dp * w.rho / (m.gamma * (w.p + m.p_inf));
  const double u = w.un, ut = w.ut;
  const double e = internal_energy_density(w.p, m) + 0.5 * w.rho * (u * u + ut * ut);
  const double de = dp / (m.gamma - 1.0) + 0.5 * (u * u + ut * ut) * drho + w.rho * u * du;
  const double dmass = u * drho + w.rho * du;
  return {dmass, u * dmass + w.rho * u * du + dp, ut * dmass, du * (e + w.p) + u * (de + dp)};
}

double impedance(const NormalState& w, const Eos& m) { return std::sqrt(m.gamma * (w.p + m.p_inf) * w.rho); }

NormalState normal_state(const Vec4& q, const Eos& m) {
  const double un = q[1] / q[0], ut = q[2] / q[0];
  return {q[0], un, ut, pressure_from_internal(q[3] - 0.5 * q[0] * (un * un + ut * ut), m)};
}

[[noreturn]] void positivity_failure(const char* what, int i, int j, long step, double rho, double p) {
  std::ostringstream os;
  os.precision(10);
  os << what << " at cell (i_r=" << i << ", j_z=" << j << ") in step " << step << ": rho=" << rho << " p=" << p;
  throw NumericalError(os.str(), i, j, step);
}

}  // namespace

void parallel_for(int begin, int end, int threads, const std::function<void(int)>& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int k = begin; k < end; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  auto chunk = [&](int w) {
    const int lo = begin + static_cast<int>(static_cast<long>(n) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
    try {
      for (int k = lo; k < hi; ++k) body(k);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  for (int w = 1; w < workers; ++w) pool.emplace_back(chunk, w);
  chunk(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StepperOptions stepper_options(const Scenario& sc) {
  const auto& n = sc.config.numerics;
  StepperOptions o;
  o.cfl = n.cfl;
  o.limiter = n.limiter;
  o.transverse = n.transverse;
  o.source_terms = n.source_terms;
  o.splitting = n.splitting;
  o.threads = n.threads;
  o.boundaries = sc.boundaries;
  if (sc.planar) {
    o.transverse = TransverseMode::None;
    o.source_terms = false;
  }
  return o;
}

Stepper::Stepper(const Scenario& sc)
    : Stepper(sc.grid, sc.map, sc.materials, sc.profile, stepper_options(sc)) {}

Stepper::Stepper(const GridSpec& grid, MaterialMap map, std::array<MaterialParams, kMaterialCount> materials,
                 ShockProfile profile, StepperOptions opts)
    : grid_(grid),
      map_(std::make_shared<const MaterialMap>(std::move(map))),
      materials_(std::move(materials)),
      profile_(profile),
      opts_(opts) {
  grid_.validate(1);
  if (map_->n_r() != grid_.n_r || map_->n_z() != grid_.n_z)
    throw ConfigError("material map shape does not match the grid");
  stride_ = grid_.n_r + 2 * kGhost;
  padded_ = static_cast<std::size_t>(stride_) * (grid_.n_z + 2 * kGhost);
  build_ghost_materials();
  prim_.resize(padded_);
  for (auto* buf : {&dq_r_, &dq_z_, &flux_r_, &flux_z_, &flux_r_hi_, &flux_z_hi_, &g_up_, &g_down_, &f_right_, &f_left_})
    buf->assign(padded_, Vec4{});
  delta_.assign(padded_, Vec4{});
  drop_r_.assign(padded_, 0);
  drop_z_.assign(padded_, 0);
}

void Stepper::build_ghost_materials() {
  const int nr = grid_.n_r, nz = grid_.n_z;
  mat_pad_.assign(padded_, 0);
  auto src_r = [&](int i) {
    if (i >= 0 && i < nr) return i;
    if (i < 0)
      return opts_.boundaries.r_lo == BoundaryKind::Wall ? std::min(-1 - i, nr - 1) : 0;
    return opts_.boundaries.r_hi == BoundaryKind::Wall ? std::max(2 * nr - 1 - i, 0) : nr - 1;
  };
  auto src_z = [&](int j) {
    if (j >= 0 && j < nz) return j;
    if (j < 0) return opts_.boundaries.z_lo == BoundaryKind::Wall ? std::min(-1 - j, nz - 1) : 0;
    return opts_.boundaries.z_hi == BoundaryKind::Wall ? std::max(2 * nz - 1 - j, 0) : nz - 1;
  };
  for (int j = -kGhost; j < nz + kGhost; ++j)
    for (int i = -kGhost; i < nr + kGhost; ++i) {
      MaterialId id = map_->at(src_r(i), src_z(j));
      if ((j < 0 && opts_.boundaries.z_lo == BoundaryKind::Inflow) ||
          (j >= nz && opts_.boundaries.z_hi == BoundaryKind::Inflow))
        id = MaterialId::Air;
      mat_pad_[pad_index(i, j)] = static_cast<std::uint8_t>(id);
    }
}

SimulationState Stepper::initial_state(const std::optional<double>& shock_position) const {
  SimulationState s;
  s.grid = grid_;
  s.map = map_;
  s.q.assign(padded_, ConservedState{});
  const double p0 = profile_.ambient.p;
  PrimitiveState behind{};
  if (shock_position) {
    const double over = profile_.overpressure_at(profile_.arrival);
    behind = post_shock_state(over, profile_.ambient, material(MaterialId::Air).eos).state;
  }
  for (int j = 0; j < grid_.n_z; ++j)
    for (int i = 0; i < grid_.n_r; ++i) {
      const MaterialId id = map_->at(i, j);
      const MaterialParams& m = material(id);
      PrimitiveState w{m.rho_ref, 0.0, 0.0, p0};
      if (id == MaterialId::Air && shock_position && grid_.z_center(j) < *shock_position) w = behind;
      s.at(i, j) = energy_from_primitive(w, m.eos);
    }
  apply_boundaries(s);
  return s;
}

double Stepper::pressure(const SimulationState& s, int i, int j) const {
  const ConservedState& q = s.at(i, j);
  const double kinetic = 0.5 * (q.mom_r * q.mom_r + q.mom_z * q.mom_z) / q.rho;
  return pressure_from_internal(q.E - kinetic, eos_at(i, j));
}

double Stepper::stable_dt(const SimulationState& s) const { return stable_dt(s, opts_.cfl); }

double Stepper::stable_dt(const SimulationState& s, double cfl) const {
  if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
  double smax = 0.0;
  for (int j = 0; j < grid_.n_z; ++j)
    for (int i = 0; i < grid_.n_r; ++i) {
      const PrimitiveState w = primitive_from_conserved(s.at(i, j), eos_at(i, j));
      const double speed = std::sqrt(w.u_r * w.u_r + w.u_z * w.u_z) + sound_speed(w, eos_at(i, j));
      smax = std::max(smax, speed);
    }
  return cfl * std::min(grid_.d_r, grid_.d_z) / smax;
}

void Stepper::apply_boundaries(SimulationState& s, double t) const {
  const int nr = grid_.n_r, nz = grid_.n_z;
  const BoundarySet& b = opts_.boundaries;

  ConservedState inflow{};
  if (b.z_lo == BoundaryKind::Inflow || b.z_hi == BoundaryKind::Inflow) {
    const Eos& air = material(MaterialId::Air).eos;
    const double over = profile_.overpressure_at(t);
    PrimitiveState w = profile_.ambient;
    if (over > 0.0) w = post_shock_state(over, profile_.ambient, air).state;
    inflow = energy_from_primitive(w, air);
  }

  auto fill_z = [&](int ghost, int interior, BoundaryKind kind, int wall_src, bool upper) {
    for (int i = 0; i < nr; ++i) {
      ConservedState& g = s.at(i, ghost);
      switch (kind) {
        case BoundaryKind::Inflow:
          g = inflow;
          if (upper) g.mom_z = -g.mom_z;
          break;
        case BoundaryKind::Extrapolate:
          g = s.at(i, interior);
          break;
        case BoundaryKind::Wall:
          g = s.at(i, wall_src);
          g.mom_z = -g.mom_z;
          break;
      }
    }
  };
  for (int k = 1; k <= kGhost; ++k) {
    fill_z(-k, 0, b.z_lo, std::min(k - 1, nz - 1), false);
    fill_z(nz - 1 + k, nz - 1, b.z_hi, std::max(nz - k, 0), true);
  }

  for (int j = -kGhost; j < nz + kGhost; ++j) {
    for (int k = 1; k <= kGhost; ++k) {
      ConservedState& lo = s.at(-k, j);
      if (b.r_lo == BoundaryKind::Wall) {
        lo = s.at(std::min(k - 1, nr - 1), j);
        lo.mom_r = -lo.mom_r;
      } else {
        lo = s.at(0, j);
      }
      ConservedState& hi = s.at(nr - 1 + k, j);
      if (b.r_hi == BoundaryKind::Wall) {
        hi = s.at(std::max(nr - k, 0), j);
        hi.mom_r = -hi.mom_r;
      } else {
        hi = s.at(nr - 1, j);
      }
    }
  }
}

void Stepper::compute_primitives(const SimulationState& s) {
  for (std::size_t k = 0; k < padded_; ++k) {
    const ConservedState& q = s.q[k];
    const Eos& m = materials_[mat_pad_[k]].eos;
    CellPrim& w = prim_[k];
    w.rho = q.rho;
    w.ur = q.mom_r / q.rho;
    w.uz = q.mom_z / q.rho;
    w.p = pressure_from_internal(q.E - 0.5 * (q.mom_r * w.ur + q.mom_z * w.uz), m);
    w.c = std::sqrt(m.gamma * (w.p + m.p_inf) / q.rho);
  }
}

void Stepper::limited_corrections(SweepScratch& w, int n_edges, double dtdx) const {
  const auto& fl = w.fl;
  const auto& iface = w.iface;
  auto term = [&](int k, int p, int ku) {
    const Vec4& wave = fl[k].waves[p];
    const double norm2 = dot(wave, wave);
    if (norm2 == 0.0 || ku < 0 || ku >= n_edges) return Vec4{};
    const double phi = mc_limiter(dot(fl[ku].waves[p], wave) / norm2);
    const double a = std::abs(fl[k].speeds[p]);
    return scale(a * (1.0 - dtdx * a) * phi, wave);
  };
  for (int k = 1; k + 1 < n_edges; ++k) {
    if (iface[k]) {
      // Half-step interface state from the incoming characteristics, each
      // slope taken from two edges inside its own material, then mapped onto
      // both flux functions.
      const auto& c = w.ch;
      double in_l = 0.0, in_r = 0.0;
      if (c[k].s_left > 0.0 && k >= 2 && !iface[k - 1] && !iface[k - 2] && c[k - 1].r_plus != 0.0)
        in_l = 0.5 * (1.0 - dtdx * c[k].s_left) * mc_limiter(c[k - 2].r_plus / c[k - 1].r_plus) * c[k - 1].r_plus;
      if (c[k].s_right < 0.0 && k + 2 < n_edges && !iface[k + 1] && !iface[k + 2] && c[k + 1].r_minus != 0.0)
        in_r = -0.5 * (1.0 + dtdx * c[k].s_right) * mc_limiter(c[k + 2].r_minus / c[k + 1].r_minus) *
               c[k + 1].r_minus;
      if (in_l == 0.0 && in_r == 0.0) continue;
      const auto& st = w.star[k];
      const double zl = impedance(st.left, *st.eos_left), zr = impedance(st.right, *st.eos_right);
      const double dp = (zr * in_l + zl * in_r) / (zl + zr);
      const double du = (in_l - in_r) / (zl + zr);
      w.cq[k] = scale(2.0, acoustic_flux_jump(st.left, *st.eos_left, dp, du));
      w.cqr[k] = scale(2.0, acoustic_flux_jump(st.right, *st.eos_right, dp, du));
      continue;
    }
    Vec4 acc{};
    for (int p = 0; p < 3; ++p) {
      const double s = fl[k].speeds[p];
      if (s == 0.0) continue;
      const int ku = s > 0.0 ? k - 1 : k + 1;
      // Across a material edge only the acoustic wave that lives on this side
      // is comparable.
      if (iface[ku] && !((s > 0.0 && p == 2) || (s < 0.0 && p == 0))) continue;
      acc = add(acc, term(k, p, ku));
    }
    w.cq[k] = acc;
    w.cqr[k] = acc;
  }
}

void Stepper::solve_edges(SweepScratch& w, int n_edges, bool radial, int line) const {
  w.fl.resize(n_edges);
  w.iface.resize(n_edges);
  w.cq.assign(n_edges, Vec4{});
  w.cqr.assign(n_edges, Vec4{});
  w.ch.resize(n_edges);
  w.star.resize(n_edges);
  for (int k = 0; k < n_edges; ++k) {
    const int e = k - 1;  // edge e sits between cells e-1 and e
    const std::size_t il = radial ? pad_index(e - 1, line) : pad_index(line, e - 1);
    const std::size_t ir = radial ? pad_index(e, line) : pad_index(line, e);
    const CellPrim& a = prim_[il];
    const CellPrim& b = prim_[ir];
    const double an = radial ? a.ur : a.uz, at = radial ? a.uz : a.ur;
    const double bn = radial ? b.ur : b.uz, bt = radial ? b.uz : b.ur;
    RiemannInput inp{{a.rho, an, at, a.p}, materials_[mat_pad_[il]].eos, {b.rho, bn, bt, b.p},
                     materials_[mat_pad_[ir]].eos};
    w.iface[k] = mat_pad_[il] != mat_pad_[ir];
    const double z = 0.5 * (a.rho * a.c + b.rho * b.c);
    w.ch[k] = {(b.p - a.p) + z * (bn - an), (b.p - a.p) - z * (bn - an), an + a.c, bn - b.c};
    if (!w.iface[k]) {
      w.fl[k] = hllc_fluctuations(inp);
      continue;
    }
    w.fl[k] = interface_fluctuations(inp);
    const Fluctuations& f = w.fl[k];
    w.star[k] = {normal_state(add(conserved(inp.left, inp.eos_left), f.waves[0]), inp.eos_left),
                 normal_state(sub(conserved(inp.right, inp.eos_right), f.waves[2]), inp.eos_right), &materials_[mat_pad_[il]].eos,
                 &materials_[mat_pad_[ir]].eos};
  }
}

void Stepper::sweep_r(int j, double dt, SweepScratch& w) {
  const int n = grid_.n_r;
  const double dtdx = dt / grid_.d_r;
  const int n_edges = n + 3;  // edges e = -1 .. n+1 stored at k = e + 1
  solve_edges(w, n_edges, true, j);
  if (opts_.limiter != LimiterKind::None) limited_corrections(w, n_edges, dtdx);
  const auto& fl = w.fl;

  if (j >= 0 && j < grid_.n_z) {
    for (int i = 0; i < n; ++i)
      dq_r_[pad_index(i, j)] = scale(-dtdx, add(fl[i + 1].apdq, fl[i + 2].amdq));
    for (int e = 0; e <= n; ++e) {
      flux_r_[pad_index(e, j)] = scale(0.5, w.cq[e + 1]);
      flux_r_hi_[pad_index(e, j)] = scale(0.5, w.cqr[e + 1]);
    }
  }

  if (opts_.transverse == TransverseMode::None) return;
  const bool full = opts_.transverse == TransverseMode::Full;
  const double half = -0.5 * dtdx;
  for (int i = 0; i < n; ++i) {
    // A+dQ from the edge on the left of cell i and A-dQ from the edge on its right.
    Vec4 from_left = fl[i + 1].apdq;
    Vec4 from_right = fl[i + 2].amdq;
    if (full) {
      from_left = sub(from_left, w.cqr[i + 1]);
      from_right = add(from_right, w.cq[i + 2]);
    }
    const double c1 = prim_[pad_index(i, j - 1)].c;
    const double c2 = prim_[pad_index(i, j)].c;
    const double c3 = prim_[pad_index(i, j + 1)].c;
    const TransverseSplit a = transverse_split({from_left, c1, c2, c3});
    const TransverseSplit b = transverse_split({from_right, c1, c2, c3});
    g_up_[pad_index(i, j)] = scale(half, add(a.up, b.up));
    g_down_[pad_index(i, j)] = scale(half, add(a.down, b.down));
  }
}

void Stepper::sweep_z(int i, double dt, SweepScratch& w) {
  const int n = grid_.n_z;
  const double dtdx = dt / grid_.d_z;
  const int n_edges = n + 3;
  solve_edges(w, n_edges, false, i);
  if (opts_.limiter != LimiterKind::None) limited_corrections(w, n_edges, dtdx);
  const auto& fl = w.fl;

  if (i >= 0 && i < grid_.n_r) {
    for (int j = 0; j < n; ++j)
      dq_z_[pad_index(i, j)] = swap_momenta(scale(-dtdx, add(fl[j + 1].apdq, fl[j + 2].amdq)));
    for (int e = 0; e <= n; ++e) {
      flux_z_[pad_index(i, e)] = swap_momenta(scale(0.5, w.cq[e + 1]));
      flux_z_hi_[pad_index(i, e)] = swap_momenta(scale(0.5, w.cqr[e + 1]));
    }
  }

  if (opts_.transverse == TransverseMode::None) return;
  const bool full = opts_.transverse == TransverseMode::Full;
  const double half = -0.5 * dtdx;
  for (int j = 0; j < n; ++j) {
    Vec4 from_left = fl[j + 1].apdq;
    Vec4 from_right = fl[j + 2].amdq;
    if (full) {
      from_left = sub(from_left, w.cqr[j + 1]);
      from_right = add(from_right, w.cq[j + 2]);
    }
    const double c1 = prim_[pad_index(i - 1, j)].c;
    const double c2 = prim_[pad_index(i, j)].c;
    const double c3 = prim_[pad_index(i + 1, j)].c;
    const TransverseSplit a = transverse_split({from_left, c1, c2, c3});
    const TransverseSplit b = transverse_split({from_right, c1, c2, c3});
    f_right_[pad_index(i, j)] = swap_momenta(scale(half, add(a.up, b.up)));
    f_left_[pad_index(i, j)] = swap_momenta(scale(half, add(a.down, b.down)));
  }
}

void Stepper::homogeneous_step(SimulationState& s, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  // inflow data centred in the step
  apply_boundaries(s, s.time + 0.5 * dt);
  compute_primitives(s);

  const int nr = grid_.n_r, nz = grid_.n_z;
  const bool transverse = opts_.transverse != TransverseMode::None;
  const int threads = opts_.threads;

  // Rows (and columns) one layer into the ghost region only feed transverse terms.
  const int pad = transverse ? 1 : 0;
  parallel_for(-pad, nz + pad, threads, [&](int j) {
    thread_local SweepScratch w;
    sweep_r(j, dt, w);
  });
  parallel_for(-pad, nr + pad, threads, [&](int i) {
    thread_local SweepScratch w;
    sweep_z(i, dt, w);
  });

  const double dtdr = dt / grid_.d_r;
  const double dtdz = dt / grid_.d_z;
  const long step = s.step;

  // Edge flags: r-edges and z-edges stored at their upper cell. A dropped
  // edge carries only its first-order fluctuations, for both neighbours.
  std::fill(drop_r_.begin(), drop_r_.end(), 0);
  std::fill(drop_z_.begin(), drop_z_.end(), 0);
  auto cell_delta = [&](int i, int j) {
    const std::size_t c = pad_index(i, j);
    const std::size_t cr = pad_index(i + 1, j), cu = pad_index(i, j + 1);
    Vec4 fr_hi = drop_r_[cr] ? Vec4{} : flux_r_[cr];
    Vec4 fr_lo = drop_r_[c] ? Vec4{} : flux_r_hi_[c];
    Vec4 gz_hi = drop_z_[cu] ? Vec4{} : flux_z_[cu];
    Vec4 gz_lo = drop_z_[c] ? Vec4{} : flux_z_hi_[c];
    if (transverse) {
      // Nothing transverse crosses a material edge: the acoustic split would
      // carry liquid-scale mass into gas cells.
      const std::uint8_t mc = mat_pad_[c];
      if (mat_pad_[cr] == mc && !drop_r_[cr]) fr_hi = add(fr_hi, add(f_right_[c], f_left_[cr]));
      if (mat_pad_[pad_index(i - 1, j)] == mc && !drop_r_[c])
        fr_lo = add(fr_lo, add(f_right_[pad_index(i - 1, j)], f_left_[c]));
      if (mat_pad_[cu] == mc && !drop_z_[cu]) gz_hi = add(gz_hi, add(g_up_[c], g_down_[cu]));
      if (mat_pad_[pad_index(i, j - 1)] == mc && !drop_z_[c])
        gz_lo = add(gz_lo, add(g_up_[pad_index(i, j - 1)], g_down_[c]));
    }
    return sub(add(dq_r_[c], dq_z_[c]), add(scale(dtdr, sub(fr_hi, fr_lo)), scale(dtdz, sub(gz_hi, gz_lo))));
  };
  auto admissible = [&](int i, int j, const Vec4& d, double& rho, double& p) {
    const ConservedState& q = s.q[pad_index(i, j)];
    rho = q.rho + d[0];
    const double mr = q.mom_r + d[1], mz = q.mom_z + d[2];
    const Eos& m = materials_[mat_pad_[pad_index(i, j)]].eos;
    p = pressure_from_internal(q.E + d[3] - 0.5 * (mr * mr + mz * mz) / rho, m);
    return rho > 0.0 && p + m.p_inf > 0.0;
  };

  std::vector<std::uint8_t> bad_row(nz, 0);
  parallel_for(0, nz, threads, [&](int j) {
    for (int i = 0; i < nr; ++i) {
      const std::size_t c = pad_index(i, j);
      delta_[c] = cell_delta(i, j);
      double rho, p;
      if (!admissible(i, j, delta_[c], rho, p)) bad_row[j] = 1;
    }
  });

  // Rare: fall back to first order around inadmissible cells, serially so
  // the result does not depend on the thread count.
  if (std::find(bad_row.begin(), bad_row.end(), 1) != bad_row.end()) {
    std::vector<std::pair<int, int>> bad;
    for (int j = 0; j < nz; ++j)
      if (bad_row[j])
        for (int i = 0; i < nr; ++i) {
          double rho, p;
          if (!admissible(i, j, delta_[pad_index(i, j)], rho, p)) bad.emplace_back(i, j);
        }
    for (int round = 0; round < 3 && !bad.empty(); ++round) {
      for (auto [i, j] : bad) {
        drop_r_[pad_index(i, j)] = drop_r_[pad_index(i + 1, j)] = 1;
        drop_z_[pad_index(i, j)] = drop_z_[pad_index(i, j + 1)] = 1;
      }
      std::vector<std::pair<int, int>> touched;
      for (auto [i, j] : bad)
        for (auto [di, dj] : {std::pair{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}})
          if (i + di >= 0 && i + di < nr && j + dj >= 0 && j + dj < nz) touched.emplace_back(i + di, j + dj);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      bad.clear();
      for (auto [i, j] : touched) {
        const std::size_t c = pad_index(i, j);
        delta_[c] = cell_delta(i, j);
        double rho, p;
        if (!admissible(i, j, delta_[c], rho, p)) bad.emplace_back(i, j);
      }
      fallback_cells_ += static_cast<long>(touched.size());
    }
    if (!bad.empty()) {
      double rho, p;
      const auto [i, j] = bad.front();
      admissible(i, j, delta_[pad_index(i, j)], rho, p);
      positivity_failure("positivity failure", i, j, step, rho, p);
    }
  }

  parallel_for(0, nz, threads, [&](int j) {
    for (int i = 0; i < nr; ++i) {
      const std::size_t c = pad_index(i, j);
      const Vec4& d = delta_[c];
      ConservedState& q = s.q[c];
      q.rho += d[0];
      q.mom_r += d[1];
      q.mom_z += d[2];
      q.E += d[3];
    }
  });
}

void Stepper::source_step(SimulationState& s, double dt) const {
  const long step = s.step;
  parallel_for(0, grid_.n_z, opts_.threads, [&](int j) {
    for (int i = 0; i < grid_.n_r; ++i) {
      ConservedState& q = s.at(i, j);
      if (q.mom_r == 0.0) continue;
      const Eos& m = eos_at(i, j);
      try {
        q = source_step_exact(q, m, grid_.r_center(i), dt);
      } catch (const InvalidStateError&) {
        positivity_failure("source step failure", i, j, step, q.rho, pressure(s, i, j));
      }
    }
  });
}

void Stepper::advance(SimulationState& s, double dt) {
  const bool source = opts_.source_terms;
  if (source && opts_.splitting == Splitting::Strang) {
    source_step(s, 0.5 * dt);
    homogeneous_step(s, dt);
    source_step(s, 0.5 * dt);
  } else {
    homogeneous_step(s, dt);
    if (source) source_step(s, dt);
  }
  s.time += dt;
  ++s.step;
  apply_boundaries(s);
}

}  // namespace shockcell

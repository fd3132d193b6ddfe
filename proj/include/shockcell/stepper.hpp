#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "shockcell/domain.hpp"
#include "shockcell/eos.hpp"
#include "shockcell/riemann.hpp"

namespace shockcell {

inline constexpr int kGhost = 2;

/// Conserved field on the padded grid (kGhost layers per side, radial index
/// fastest) plus the clock. Owned by the stepping loop.
struct SimulationState {
  GridSpec grid;
  std::shared_ptr<const MaterialMap> map;
  std::vector<ConservedState> q;
  double time = 0.0;
  long step = 0;

  int stride() const { return grid.n_r + 2 * kGhost; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + kGhost) * stride() + static_cast<std::size_t>(i + kGhost);
  }
  ConservedState& at(int i, int j) { return q[index(i, j)]; }
  const ConservedState& at(int i, int j) const { return q[index(i, j)]; }
};

struct StepperOptions {
  double cfl = 0.45;
  LimiterKind limiter = LimiterKind::MonotonizedCentral;  // None: first-order Godunov
  TransverseMode transverse = TransverseMode::Full;
  bool source_terms = true;
  Splitting splitting = Splitting::Godunov;
  int threads = 1;
  BoundarySet boundaries;
};

StepperOptions stepper_options(const Scenario& sc);

/// Unsplit wave-propagation update for the axisymmetric Euler equations with
/// fixed material interfaces. Holds scratch buffers, so one Stepper must not
/// advance two states concurrently.
class Stepper {
public:
  explicit Stepper(const Scenario& sc);
  Stepper(const GridSpec& grid, MaterialMap map, std::array<MaterialParams, kMaterialCount> materials,
          ShockProfile profile, StepperOptions opts);

  const GridSpec& grid() const { return grid_; }
  const StepperOptions& options() const { return opts_; }
  StepperOptions& options() { return opts_; }
  const std::shared_ptr<const MaterialMap>& map() const { return map_; }
  const MaterialParams& material(MaterialId id) const { return materials_[static_cast<int>(id)]; }
  const Eos& eos_at(int i, int j) const { return materials_[static_cast<int>(map_->at(i, j))].eos; }

  /// Every material at ambient pressure and reference density, at rest. With
  /// `shock_position` set, air behind it carries the post-shock state.
  SimulationState initial_state(const std::optional<double>& shock_position = std::nullopt) const;

  /// cfl * min(d_r, d_z) / max(|u| + c); throws InvalidStateError on an
  /// inadmissible cell.
  double stable_dt(const SimulationState& s) const;
  double stable_dt(const SimulationState& s, double cfl) const;

  /// Fills both ghost layers, inflow data taken at time t (default: the state's time).
  void apply_boundaries(SimulationState& s) const { apply_boundaries(s, s.time); }
  void apply_boundaries(SimulationState& s, double t) const;

  /// One step of length dt: homogeneous update then the source step (or
  /// source/homogeneous/source under Strang splitting). Throws NumericalError.
  void advance(SimulationState& s, double dt);

  /// Only the homogeneous (flux) part of a step, without advancing the clock.
  void homogeneous_step(SimulationState& s, double dt);
  void source_step(SimulationState& s, double dt) const;

  double pressure(const SimulationState& s, int i, int j) const;

  /// Cells recomputed with first-order edges to keep them admissible, summed
  /// over all steps so far.
  long fallback_cells() const { return fallback_cells_; }

private:
  struct CellPrim {
    double rho, ur, uz, p, c;
  };

  std::size_t pad_index(int i, int j) const {
    return static_cast<std::size_t>(j + kGhost) * stride_ + static_cast<std::size_t>(i + kGhost);
  }
  void build_ghost_materials();
  void compute_primitives(const SimulationState& s);
  struct SweepScratch {
    std::vector<Fluctuations> fl;
    std::vector<std::uint8_t> iface;
    std::vector<Vec4> cq;   // correction seen by the cell below/left of each edge
    std::vector<Vec4> cqr;  // by the cell above/right; differs only at material edges
    // Acoustic characteristic jumps across each edge and the outward signal
    // speeds of the two adjacent cells.
    struct EdgeChar {
      double r_plus = 0.0, r_minus = 0.0;
      double s_left = 0.0, s_right = 0.0;
    };
    std::vector<EdgeChar> ch;
    struct EdgeStar {
      NormalState left, right;
      const Eos* eos_left = nullptr;
      const Eos* eos_right = nullptr;
    };
    std::vector<EdgeStar> star;  // material edges only
  };
  void solve_edges(SweepScratch& w, int n_edges, bool radial, int line) const;
  void limited_corrections(SweepScratch& w, int n_edges, double dtdx) const;
  void sweep_r(int j, double dt, SweepScratch& w);
  void sweep_z(int i, double dt, SweepScratch& w);

  GridSpec grid_;
  std::shared_ptr<const MaterialMap> map_;
  std::array<MaterialParams, kMaterialCount> materials_;
  ShockProfile profile_;
  StepperOptions opts_;
  int stride_ = 0;
  std::size_t padded_ = 0;

  std::vector<std::uint8_t> mat_pad_;  // material id per padded cell
  std::vector<CellPrim> prim_;
  std::vector<Vec4> dq_r_, dq_z_;        // fluctuation updates per interior cell
  std::vector<Vec4> flux_r_, flux_z_;    // limited correction fluxes; edge stored at its upper cell
  std::vector<Vec4> flux_r_hi_, flux_z_hi_;  // same, as seen from the upper cell
  std::vector<Vec4> g_up_, g_down_;      // transverse corrections to z-edges, owned by the r-sweep row
  std::vector<Vec4> f_right_, f_left_;   // transverse corrections to r-edges, owned by the z-sweep column
  std::vector<Vec4> delta_;              // net update per cell
  std::vector<std::uint8_t> drop_r_, drop_z_;  // edges limited to first order this step
  long fallback_cells_ = 0;
};

/// Deterministic static-partition parallel loop over [begin, end). The first
/// exception in index order is rethrown on the calling thread.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& body);

}  // namespace shockcell

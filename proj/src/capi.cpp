#include "shockcell/shockcell.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "shockcell/config.hpp"
#include "shockcell/errors.hpp"
#include "shockcell/run.hpp"
#include "shockcell/stepper.hpp"
#include "shockcell/verification.hpp"
#include "shockcell/version.hpp"

using namespace shockcell;

struct shockcell_sim {
  Scenario scenario;
  Stepper stepper;
  SimulationState state;

  explicit shockcell_sim(Scenario sc)
      : scenario(std::move(sc)),
        stepper(scenario),
        state(stepper.initial_state(scenario.config.shock.initial_position)) {}
};

namespace {

thread_local std::string g_last_error;

shockcell_status fail(shockcell_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

shockcell_status status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
      return SHOCKCELL_CONFIG_ERROR;
    case ErrorKind::Io:
      return SHOCKCELL_IO_ERROR;
    default:
      return SHOCKCELL_NUMERICAL_ERROR;
  }
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
shockcell_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const Error& e) {
    return fail(status_of(e), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SHOCKCELL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(SHOCKCELL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(SHOCKCELL_INTERNAL_ERROR, "unknown exception");
  }
}

ScenarioConfig config_from(const char* config_json, const char* overrides_json) {
  return parse_config(config_json ? config_json : "{}", overrides_json ? overrides_json : "");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* shockcell_version(void) { return kVersion; }

const char* shockcell_last_error(void) { return g_last_error.c_str(); }

const char* shockcell_status_name(shockcell_status status) {
  switch (status) {
    case SHOCKCELL_OK:
      return "ok";
    case SHOCKCELL_THRESHOLD_FAILED:
      return "threshold failed";
    case SHOCKCELL_CONFIG_ERROR:
      return "config error";
    case SHOCKCELL_NUMERICAL_ERROR:
      return "numerical error";
    case SHOCKCELL_INVALID_ARGUMENT:
      return "invalid argument";
    case SHOCKCELL_IO_ERROR:
      return "io error";
    case SHOCKCELL_INTERNAL_ERROR:
      return "internal error";
  }
  return "unknown status";
}

void shockcell_string_free(char* s) { std::free(s); }

shockcell_status shockcell_config_resolve(const char* config_json, const char* overrides_json, char** out_json) {
  if (!out_json) return fail(SHOCKCELL_INVALID_ARGUMENT, "out_json is NULL");
  *out_json = nullptr;
  return guarded([&] {
    const ScenarioConfig cfg = config_from(config_json, overrides_json);
    *out_json = dup_string(config_to_json(cfg));
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_config_validate(const char* config_json, const char* overrides_json) {
  return guarded([&] {
    const ScenarioConfig cfg = config_from(config_json, overrides_json);
    (void)build_scenario(cfg);
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_sim_create(const char* config_json, const char* overrides_json, shockcell_sim** out) {
  if (!out) return fail(SHOCKCELL_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new shockcell_sim(build_scenario(config_from(config_json, overrides_json)));
    return SHOCKCELL_OK;
  });
}

void shockcell_sim_destroy(shockcell_sim* sim) { delete sim; }

shockcell_status shockcell_sim_set_threads(shockcell_sim* sim, int threads) {
  if (!sim) return fail(SHOCKCELL_INVALID_ARGUMENT, "sim is NULL");
  if (threads < 1) return fail(SHOCKCELL_INVALID_ARGUMENT, "thread count must be at least 1");
  sim->stepper.options().threads = threads;
  sim->scenario.config.numerics.threads = threads;
  return SHOCKCELL_OK;
}

shockcell_status shockcell_sim_shape(const shockcell_sim* sim, int* n_r, int* n_z) {
  if (!sim) return fail(SHOCKCELL_INVALID_ARGUMENT, "sim is NULL");
  if (n_r) *n_r = sim->state.grid.n_r;
  if (n_z) *n_z = sim->state.grid.n_z;
  return SHOCKCELL_OK;
}

shockcell_status shockcell_sim_time(const shockcell_sim* sim, double* t_seconds, long* step) {
  if (!sim) return fail(SHOCKCELL_INVALID_ARGUMENT, "sim is NULL");
  if (t_seconds) *t_seconds = sim->state.time;
  if (step) *step = sim->state.step;
  return SHOCKCELL_OK;
}

shockcell_status shockcell_sim_stable_dt(const shockcell_sim* sim, double* dt_seconds) {
  if (!sim || !dt_seconds) return fail(SHOCKCELL_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *dt_seconds = sim->stepper.stable_dt(sim->state);
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_sim_advance(shockcell_sim* sim, double dt_seconds) {
  if (!sim) return fail(SHOCKCELL_INVALID_ARGUMENT, "sim is NULL");
  if (std::isnan(dt_seconds)) return fail(SHOCKCELL_INVALID_ARGUMENT, "dt is NaN");
  return guarded([&] {
    const double dt = dt_seconds > 0.0 ? dt_seconds : sim->stepper.stable_dt(sim->state);
    // A failed step leaves the previous state intact.
    SimulationState next = sim->state;
    sim->stepper.advance(next, dt);
    sim->state = std::move(next);
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_sim_get_field(const shockcell_sim* sim, shockcell_field field, double* out,
                                         size_t count) {
  if (!sim || !out) return fail(SHOCKCELL_INVALID_ARGUMENT, "NULL argument");
  const auto& s = sim->state;
  if (count < s.grid.cells())
    return fail(SHOCKCELL_INVALID_ARGUMENT, "buffer holds " + std::to_string(count) + " values, need " +
                                                std::to_string(s.grid.cells()));
  if (field < SHOCKCELL_FIELD_RHO || field > SHOCKCELL_FIELD_MATERIAL)
    return fail(SHOCKCELL_INVALID_ARGUMENT, "unknown field");
  return guarded([&] {
    std::size_t k = 0;
    for (int j = 0; j < s.grid.n_z; ++j)
      for (int i = 0; i < s.grid.n_r; ++i, ++k) {
        const ConservedState& q = s.at(i, j);
        switch (field) {
          case SHOCKCELL_FIELD_RHO:
            out[k] = q.rho;
            break;
          case SHOCKCELL_FIELD_MOM_R:
            out[k] = q.mom_r;
            break;
          case SHOCKCELL_FIELD_MOM_Z:
            out[k] = q.mom_z;
            break;
          case SHOCKCELL_FIELD_ENERGY:
            out[k] = q.E;
            break;
          case SHOCKCELL_FIELD_PRESSURE:
            out[k] = sim->stepper.pressure(s, i, j);
            break;
          case SHOCKCELL_FIELD_MATERIAL:
            out[k] = static_cast<double>(s.map->at(i, j));
            break;
        }
      }
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_sim_run(shockcell_sim* sim, const char* output_dir, shockcell_run_summary* out) {
  if (!sim) return fail(SHOCKCELL_INVALID_ARGUMENT, "sim is NULL");
  if (out) *out = shockcell_run_summary{0, 0.0, 0, 0, NAN, NAN, 0};
  return guarded([&] {
    RunOptions opts;
    if (output_dir) opts.output_dir = output_dir;
    RunResult res;
    auto fill = [&] {
      if (!out) return;
      out->steps = res.steps;
      out->final_time_us = res.final_time * 1e6;
      out->frames_written = static_cast<int>(res.frame_files.size());
      out->gauges = static_cast<int>(res.gauges.size());
      out->failed = res.failed ? 1 : 0;
      for (const auto& e : res.water_min)
        if (!(e.min_p >= out->min_water_p_pa)) {
          out->min_water_p_pa = e.min_p;
          out->min_water_p_t_us = e.t * 1e6;
        }
    };
    // The run works on a copy; after a failure the handle keeps the state it had before the call.
    SimulationState work = sim->state;
    try {
      res = run_scenario(sim->scenario, sim->stepper, work, opts);
    } catch (const NumericalError&) {
      if (out) out->failed = 1;
      throw;
    }
    sim->state = std::move(work);
    fill();
    return SHOCKCELL_OK;
  });
}

shockcell_status shockcell_verify1d(const char* config_json, const char* overrides_json, int cells,
                                    const char* output_dir, shockcell_verify_summary* out) {
  if (cells < 1) return fail(SHOCKCELL_INVALID_ARGUMENT, "cells must be positive");
  return guarded([&] {
    const ScenarioConfig cfg = config_from(config_json, overrides_json);
    const Verify1DResult r = verify1d(cfg, cells);
    if (output_dir) write_verify_outputs(r, output_dir);
    if (out) {
      out->l1_a = r.l1_a;
      out->l1_b = r.l1_b;
      out->transmitted_psi_exact = r.transmitted_psi_exact;
      out->transmitted_psi_numeric = r.transmitted_psi_numeric;
      out->l1_pass = r.l1_pass ? 1 : 0;
      out->transmitted_pass = r.transmitted_pass ? 1 : 0;
    }
    return r.l1_pass ? SHOCKCELL_OK : SHOCKCELL_THRESHOLD_FAILED;
  });
}

shockcell_status shockcell_converge(const char* config_json, const char* overrides_json, const int* cells, int n,
                                    const char* output_dir, double* l1_out, shockcell_converge_summary* out) {
  if (!cells && n > 0) return fail(SHOCKCELL_INVALID_ARGUMENT, "cells is NULL");
  if (n < 0) return fail(SHOCKCELL_INVALID_ARGUMENT, "negative resolution count");
  return guarded([&] {
    const ScenarioConfig cfg = config_from(config_json, overrides_json);
    const ConvergenceResult r = converge(cfg, std::vector<int>(cells, cells + n));
    if (output_dir) write_convergence_outputs(r, output_dir);
    if (l1_out)
      for (int k = 0; k < n; ++k) l1_out[k] = r.l1_exact[static_cast<std::size_t>(k)];
    if (out) {
      out->decreasing = r.decreasing ? 1 : 0;
      out->order = r.order;
      out->order_air = r.order_air;
      out->order_water = r.order_water;
    }
    return r.decreasing ? SHOCKCELL_OK : SHOCKCELL_THRESHOLD_FAILED;
  });
}

}  // extern "C"

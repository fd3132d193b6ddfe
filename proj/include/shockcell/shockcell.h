/* C interface to the shockcell simulator.
 *
 * Every function returns a shockcell_status; on failure the message is
 * available from shockcell_last_error() on the calling thread until the next
 * call on that thread. Strings returned through char** are owned by the
 * caller and released with shockcell_string_free. Configurations are JSON
 * documents; the overrides argument, when not NULL, is merged on top as a
 * JSON merge patch.
 */
#ifndef SHOCKCELL_H
#define SHOCKCELL_H

#include <stddef.h>

#if defined(_WIN32)
#define SHOCKCELL_API __declspec(dllexport)
#else
#define SHOCKCELL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum shockcell_status {
  SHOCKCELL_OK = 0,
  SHOCKCELL_THRESHOLD_FAILED = 1, /* computation finished, a pass criterion did not */
  SHOCKCELL_CONFIG_ERROR = 2,
  SHOCKCELL_NUMERICAL_ERROR = 3,
  SHOCKCELL_INVALID_ARGUMENT = 4,
  SHOCKCELL_IO_ERROR = 5,
  SHOCKCELL_INTERNAL_ERROR = 6
} shockcell_status;

typedef enum shockcell_field {
  SHOCKCELL_FIELD_RHO = 0,
  SHOCKCELL_FIELD_MOM_R = 1,
  SHOCKCELL_FIELD_MOM_Z = 2,
  SHOCKCELL_FIELD_ENERGY = 3,
  SHOCKCELL_FIELD_PRESSURE = 4,
  SHOCKCELL_FIELD_MATERIAL = 5 /* 0 air, 1 water, 2 polystyrene */
} shockcell_field;

typedef struct shockcell_sim shockcell_sim;

typedef struct shockcell_run_summary {
  long steps;
  double final_time_us;
  int frames_written;
  int gauges;
  double min_water_p_pa;     /* over every step, absolute */
  double min_water_p_t_us;
  int failed;                /* 1 when the run stopped on a numerical failure */
} shockcell_run_summary;

typedef struct shockcell_verify_summary {
  double l1_a;               /* at the first arrival plus the delay */
  double l1_b;
  double transmitted_psi_exact;
  double transmitted_psi_numeric;
  int l1_pass;
  int transmitted_pass;
} shockcell_verify_summary;

typedef struct shockcell_converge_summary {
  int decreasing;
  double order;              /* NaN unless three doubled resolutions were given */
  double order_air;
  double order_water;
} shockcell_converge_summary;

SHOCKCELL_API const char* shockcell_version(void);
SHOCKCELL_API const char* shockcell_last_error(void);
SHOCKCELL_API const char* shockcell_status_name(shockcell_status status);
SHOCKCELL_API void shockcell_string_free(char* s);

/* Fully resolved configuration as JSON. */
SHOCKCELL_API shockcell_status shockcell_config_resolve(const char* config_json, const char* overrides_json,
                                                        char** out_json);
/* Parses, range-checks and builds the geometry without running anything. */
SHOCKCELL_API shockcell_status shockcell_config_validate(const char* config_json, const char* overrides_json);

SHOCKCELL_API shockcell_status shockcell_sim_create(const char* config_json, const char* overrides_json,
                                                    shockcell_sim** out);
SHOCKCELL_API void shockcell_sim_destroy(shockcell_sim* sim);

SHOCKCELL_API shockcell_status shockcell_sim_set_threads(shockcell_sim* sim, int threads);
SHOCKCELL_API shockcell_status shockcell_sim_shape(const shockcell_sim* sim, int* n_r, int* n_z);
SHOCKCELL_API shockcell_status shockcell_sim_time(const shockcell_sim* sim, double* t_seconds, long* step);
SHOCKCELL_API shockcell_status shockcell_sim_stable_dt(const shockcell_sim* sim, double* dt_seconds);
/* One step of the given size; dt <= 0 takes the CFL-limited step. */
SHOCKCELL_API shockcell_status shockcell_sim_advance(shockcell_sim* sim, double dt_seconds);
/* Copies n_r * n_z values, radial index fastest. */
SHOCKCELL_API shockcell_status shockcell_sim_get_field(const shockcell_sim* sim, shockcell_field field,
                                                       double* out, size_t count);
/* Runs from the current state to the configured end time. output_dir may be
 * NULL (nothing written) or a directory that is created if missing. On a
 * numerical failure the partial outputs are flushed and the handle keeps the
 * state it had before the call. */
SHOCKCELL_API shockcell_status shockcell_sim_run(shockcell_sim* sim, const char* output_dir,
                                                 shockcell_run_summary* out);

/* SHOCKCELL_THRESHOLD_FAILED when the L1 criterion fails; the transmitted
 * overpressure check is reported in the summary only. */
SHOCKCELL_API shockcell_status shockcell_verify1d(const char* config_json, const char* overrides_json, int cells,
                                                  const char* output_dir, shockcell_verify_summary* out);
/* l1_out, when not NULL, receives n values. SHOCKCELL_THRESHOLD_FAILED when
 * the errors against the exact solution do not strictly decrease. */
SHOCKCELL_API shockcell_status shockcell_converge(const char* config_json, const char* overrides_json,
                                                  const int* cells, int n, const char* output_dir,
                                                  double* l1_out, shockcell_converge_summary* out);

#ifdef __cplusplus
}
#endif

#endif

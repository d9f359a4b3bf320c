#ifndef RAREVEL_H
#define RAREVEL_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RvMode {
  RV_MODE_Q1 = 0,
  RV_MODE_P0 = 1,
} RvMode;

// Result codes of every fallible call.
typedef enum RvStatus {
  RV_STATUS_OK = 0,
  RV_STATUS_NULL_POINTER = 1,
  RV_STATUS_INPUT = 2,
  RV_STATUS_NON_CONVERGENCE = 3,
  RV_STATUS_NUMERICAL = 4,
  RV_STATUS_PANIC = 5,
} RvStatus;

typedef struct RvField RvField;

typedef struct RvGrid RvGrid;

typedef struct RvReport RvReport;

// Gas parameters, SI units.
typedef struct RvGas {
  double r;
  double mu_ref;
  double t_ref;
  double omega_visc;
  uint32_t delta;
  uint32_t dv;
} RvGas;

// Density (kg/m^3), velocity (m/s) and temperature (K).
typedef struct RvState {
  double rho;
  double u[3];
  double t;
} RvState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *rv_last_error(void);

// Library version as a static NUL-terminated string.
const char *rv_version(void);

// Argon with `dv` discrete velocity components.
enum RvStatus rv_gas_argon(uint32_t dv, struct RvGas *out);

// Density, velocity and temperature ratios across a normal shock.
enum RvStatus rv_normal_shock(double gamma,
                              double mach,
                              double *rho_ratio,
                              double *u_ratio,
                              double *t_ratio);

// Reads a macroscopic field file.
enum RvStatus rv_field_load(const char *path, struct RvField **out);

enum RvStatus rv_field_cell_count(const struct RvField *field, uintptr_t *out);

void rv_field_free(struct RvField *field);

// Adaptive grid for `field`. `symmetry_axis < 0` disables mirroring.
enum RvStatus rv_grid_generate(const struct RvField *field,
                               const struct RvGas *gas,
                               double c,
                               double a,
                               enum RvMode mode,
                               int32_t symmetry_axis,
                               struct RvGrid **out);

enum RvStatus rv_grid_load(const char *path, struct RvGrid **out);

enum RvStatus rv_grid_save(const struct RvGrid *grid, const char *path);

enum RvStatus rv_grid_point_count(const struct RvGrid *grid, uintptr_t *out);

// Copies the quadrature: `points` holds `3 * len` coordinates, `weights` `len` values.
enum RvStatus rv_grid_quadrature(const struct RvGrid *grid,
                                 double *points,
                                 double *weights,
                                 uintptr_t len);

void rv_grid_free(struct RvGrid *grid);

// Discrete equilibrium `(M, N)` of `state` on `grid`; both buffers hold `len` values.
enum RvStatus rv_equilibrium(const struct RvGrid *grid,
                             const struct RvGas *gas,
                             const struct RvState *state,
                             double *m,
                             double *n,
                             uintptr_t len);

// Runs a steady solve from a configuration file. `grid_path` may be null to
// use the grid named in the configuration. A report is returned both on
// convergence (`RV_STATUS_OK`) and when the iteration cap is reached
// (`RV_STATUS_NON_CONVERGENCE`). No files are written.
enum RvStatus rv_solve(const char *config_path, const char *grid_path, struct RvReport **out);

enum RvStatus rv_report_iterations(const struct RvReport *report, uintptr_t *out);

enum RvStatus rv_report_converged(const struct RvReport *report, bool *out);

// Copies up to `cap` residual values; `written` receives the full history length.
enum RvStatus rv_report_residuals(const struct RvReport *report,
                                  double *values,
                                  uintptr_t cap,
                                  uintptr_t *written);

// Copies up to `cap` wall samples (angle in degrees, heat flux in W/m^2);
// `written` receives the number of wall faces.
enum RvStatus rv_report_wall_flux(const struct RvReport *report,
                                  double *theta_deg,
                                  double *q_n,
                                  uintptr_t cap,
                                  uintptr_t *written);

void rv_report_free(struct RvReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAREVEL_H */

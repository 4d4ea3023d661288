#ifndef CGRP_H
#define CGRP_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgrpMode {
  /**
   * One coupled GRP solve per window, independent steppers.
   */
  CGRP_MODE_GRP = 0,
  /**
   * Common time step with a coupled Riemann problem per step.
   */
  CGRP_MODE_SYNC_RP = 1,
} CgrpMode;

typedef enum CgrpSide {
  CGRP_SIDE_LEFT = 0,
  CGRP_SIDE_RIGHT = 1,
} CgrpSide;

typedef enum CgrpStatus {
  CGRP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CGRP_STATUS_NULL_POINTER = 1,
  /**
   * Configuration text could not be parsed.
   */
  CGRP_STATUS_PARSE = 2,
  /**
   * Arguments or configuration values are out of range.
   */
  CGRP_STATUS_INVALID = 3,
  /**
   * A solver failed (vacuum, supersonic interface, singular system, ...).
   */
  CGRP_STATUS_NUMERICAL = 4,
  /**
   * Internal panic caught at the boundary.
   */
  CGRP_STATUS_PANIC = 5,
} CgrpStatus;

/**
 * Opaque simulation handle.
 */
typedef struct CgrpSimulation CgrpSimulation;

/**
 * Summary of one synchronization window.
 */
typedef struct CgrpWindow {
  double t0;
  double t1;
  /**
   * Determinant of the coupling matrix, NaN in synchronized mode.
   */
  double det;
  size_t steps_left;
  size_t steps_right;
} CgrpWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cgrp_last_error_message(void);

/**
 * Builds a simulation from configuration text. `level < 0` uses the level
 * from the configuration. On success `*out` receives a new handle.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_new(const char *config,
                                    int32_t level,
                                    enum CgrpMode mode,
                                    struct CgrpSimulation **out);

/**
 * Releases a handle. Null is accepted.
 *
 * # Safety
 * `sim` must come from `cgrp_simulation_new` and not be used afterwards.
 */
void cgrp_simulation_free(struct CgrpSimulation *sim);

/**
 * Advances the simulation to time `t` (no-op if already there).
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum CgrpStatus cgrp_simulation_advance_to(struct CgrpSimulation *sim, double t);

/**
 * Current simulation time.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_time(const struct CgrpSimulation *sim, double *out);

/**
 * Final time from the configuration.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_end_time(const struct CgrpSimulation *sim, double *out);

/**
 * Total mass in both domains.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_total_mass(const struct CgrpSimulation *sim, double *out);

/**
 * Number of cells in one domain.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_cell_count(const struct CgrpSimulation *sim,
                                           enum CgrpSide side,
                                           size_t *out);

/**
 * Copies cell centres and primitive cell values of one domain into arrays
 * of length `len`, which must equal the cell count. Any output pointer may
 * be null to skip it.
 *
 * # Safety
 * Non-null output pointers must have room for `len` values.
 */
enum CgrpStatus cgrp_simulation_primitives(const struct CgrpSimulation *sim,
                                           enum CgrpSide side,
                                           double *x,
                                           double *rho,
                                           double *u,
                                           double *p,
                                           size_t len);

/**
 * Number of windows completed so far.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_window_count(const struct CgrpSimulation *sim, size_t *out);

/**
 * Summary of window `index` (0-based).
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum CgrpStatus cgrp_simulation_window(const struct CgrpSimulation *sim,
                                       size_t index,
                                       struct CgrpWindow *out);

/**
 * Interface traces of the coupled Riemann problem between `left` and
 * `right` (each `rho, u, p`) with the given outtake. The traces are written
 * as `rho, u, p` triples.
 *
 * # Safety
 * All pointers must reference three doubles.
 */
enum CgrpStatus cgrp_coupled_riemann(const double *left,
                                     const double *right,
                                     double outtake,
                                     double gamma,
                                     double r_sgc,
                                     double *left_trace,
                                     double *right_trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGRP_H */

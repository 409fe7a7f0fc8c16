#ifndef WEYL_ARC_H
#define WEYL_ARC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. The numeric values of the
 * configuration, numerical and I/O classes match the exit codes of the
 * command-line tool.
 */
typedef enum WeylStatus {
  WEYL_STATUS_OK = 0,
  WEYL_STATUS_NULL_POINTER = 1,
  WEYL_STATUS_INVALID_ARGUMENT = 2,
  WEYL_STATUS_NUMERICAL = 3,
  WEYL_STATUS_IO = 4,
  WEYL_STATUS_PANIC = 5,
  WEYL_STATUS_OUT_OF_RANGE = 6,
} WeylStatus;

/**
 * Phase of the simplified model.
 */
typedef enum WeylPhase {
  WEYL_PHASE_BAND_INSULATOR = 0,
  WEYL_PHASE_QUANTUM_HALL = 1,
  WEYL_PHASE_WSM1 = 2,
  WEYL_PHASE_WSM2 = 3,
} WeylPhase;

/**
 * Two emitters at the hinge of a braid box, with their evolved trajectory.
 */
typedef struct WeylHingePair WeylHingePair;

/**
 * Tight-binding parameters of the bath.
 */
typedef struct WeylModel WeylModel;

/**
 * Weyl nodes found for a model.
 */
typedef struct WeylNodes WeylNodes;

/**
 * One Weyl node.
 */
typedef struct WeylNodeInfo {
  double kx;
  double ky;
  double kz;
  int32_t chirality;
  double frequency;
} WeylNodeInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *weyl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *weyl_version(void);

/**
 * Simplified model with nearest-neighbour amplitude `j`, next-nearest
 * amplitude `j_prime`, staggered mass `mass` and Peierls phase `phi`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum WeylStatus weyl_model_new(double j,
                               double j_prime,
                               double mass,
                               double phi,
                               struct WeylModel **out);

/**
 * # Safety
 * `model` must be null or a pointer returned by [`weyl_model_new`] that
 * has not been freed.
 */
void weyl_model_free(struct WeylModel *model);

/**
 * Bulk band energies (ascending) at `(kx, ky, kz)` into `out[0..2]`.
 *
 * # Safety
 * `model` must be a live model and `out` must point to two doubles.
 */
enum WeylStatus weyl_model_bulk_energies(const struct WeylModel *model,
                                         double kx,
                                         double ky,
                                         double kz,
                                         double *out);

/**
 * Phase of the model.
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum WeylStatus weyl_model_phase(const struct WeylModel *model, enum WeylPhase *out);

/**
 * Lower-band Chern number of the fixed-`kz` plane on a `grid x grid`
 * lattice of the reciprocal cell.
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum WeylStatus weyl_model_chern(const struct WeylModel *model,
                                 double kz,
                                 size_t grid,
                                 int32_t *out);

/**
 * Weyl nodes of the model, refined until `|d| < tol J`.
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum WeylStatus weyl_nodes_find(const struct WeylModel *model, double tol, struct WeylNodes **out);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `nodes` must be null or a live handle.
 */
size_t weyl_nodes_len(const struct WeylNodes *nodes);

/**
 * Copy node `index` into `out`.
 *
 * # Safety
 * `nodes` must be a live handle and `out` a valid pointer.
 */
enum WeylStatus weyl_nodes_get(const struct WeylNodes *nodes,
                               size_t index,
                               struct WeylNodeInfo *out);

/**
 * # Safety
 * `nodes` must be null or a handle from [`weyl_nodes_find`] not yet freed.
 */
void weyl_nodes_free(struct WeylNodes *nodes);

/**
 * Two emitters with coupling `g` at hinge distance `d` of a braid box of
 * `n_side x n_side x n_z` built on `model`. `absorber_gamma > 0` adds
 * absorbing layers on the far facets; `0` keeps the box closed.
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum WeylStatus weyl_hinge_pair_new(const struct WeylModel *model,
                                    size_t n_side,
                                    size_t n_z,
                                    size_t d,
                                    double g,
                                    double absorber_gamma,
                                    size_t absorber_layers,
                                    struct WeylHingePair **out);

/**
 * Evolve from the first emitter excited up to `t_final`, recording
 * `n_samples` uniform samples (replacing any previous trajectory).
 *
 * # Safety
 * `pair` must be a live handle.
 */
enum WeylStatus weyl_hinge_pair_evolve(struct WeylHingePair *pair,
                                       double t_final,
                                       size_t n_samples);

/**
 * Copy the sample times, both emitter populations and the concurrence of
 * the last trajectory into caller buffers of `len` doubles each (any may
 * be null). Fails with `OUT_OF_RANGE` when `len` is smaller than the
 * number of samples, which is written to `n_written` either way.
 *
 * # Safety
 * Non-null buffers must hold `len` doubles; `n_written` must be valid or
 * null.
 */
enum WeylStatus weyl_hinge_pair_series(const struct WeylHingePair *pair,
                                       double *times,
                                       double *p1,
                                       double *p2,
                                       double *concurrence,
                                       size_t len,
                                       size_t *n_written);

/**
 * Maximum concurrence of the last trajectory and the time it occurs.
 *
 * # Safety
 * `pair` must be a live handle; `c_max` and `t_peak` valid or null.
 */
enum WeylStatus weyl_hinge_pair_max_concurrence(const struct WeylHingePair *pair,
                                                double *c_max,
                                                double *t_peak);

/**
 * # Safety
 * `pair` must be null or a handle from [`weyl_hinge_pair_new`] not yet
 * freed.
 */
void weyl_hinge_pair_free(struct WeylHingePair *pair);

/**
 * Run a command of the command-line tool with the TOML configuration
 * `config_toml` (may be null for the preset), writing into `out_dir`.
 *
 * # Safety
 * `command` and `out_dir` must be valid NUL-terminated strings;
 * `config_toml` must be one or null.
 */
enum WeylStatus weyl_run(const char *command, const char *config_toml, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEYL_ARC_H */

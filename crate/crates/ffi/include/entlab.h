#ifndef ENTLAB_H
#define ENTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntlabStatus {
  ENTLAB_STATUS_OK = 0,
  ENTLAB_STATUS_NULL_POINTER = 1,
  ENTLAB_STATUS_INVALID_ARGUMENT = 2,
  ENTLAB_STATUS_NUMERIC_FAILURE = 3,
  ENTLAB_STATUS_UNSUPPORTED = 4,
  ENTLAB_STATUS_OUT_OF_RANGE = 5,
  ENTLAB_STATUS_PANIC = 6,
} EntlabStatus;

typedef enum EntlabChannel {
  ENTLAB_CHANNEL_INDEPENDENT = 0,
  ENTLAB_CHANNEL_COLLECTIVE = 1,
  ENTLAB_CHANNEL_MIXED = 2,
} EntlabChannel;

// Opaque model handle.
typedef struct EntlabModel EntlabModel;

// Opaque trajectory handle.
typedef struct EntlabTrajectory EntlabTrajectory;

// Model parameters. A NaN `gamma12` selects the channel default.
typedef struct EntlabModelParams {
  enum EntlabChannel channel;
  double gamma;
  double gamma12;
  double eta0;
  double mu1;
  double phi1;
  double mu2;
  double phi2;
} EntlabModelParams;

typedef struct EntlabComplex {
  double re;
  double im;
} EntlabComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next entlab call on the same thread.
const char *entlab_last_error(void);

// Library version as a static NUL-terminated string.
const char *entlab_version(void);

// # Safety
// `params` must be readable and `out` writable.
enum EntlabStatus entlab_model_new(const struct EntlabModelParams *params,
                                   struct EntlabModel **out);

// # Safety
// `model` must come from [`entlab_model_new`] and not be used afterwards.
void entlab_model_free(struct EntlabModel *model);

// Wootters concurrence of a density matrix.
//
// # Safety
// `rho` must point to 16 entries and `out` be writable.
enum EntlabStatus entlab_concurrence(const struct EntlabComplex *rho, double *out);

// Conserved weight κ of a state under collective decay.
//
// # Safety
// `rho` must point to 16 entries and `out` be writable.
enum EntlabStatus entlab_kappa(const struct EntlabComplex *rho, double *out);

// Stationary state. `rho0` may be null except for the collective channel,
// whose stationary state depends on it.
//
// # Safety
// `rho0` (if non-null) and `out` must point to 16 entries.
enum EntlabStatus entlab_stationary(const struct EntlabModel *model,
                                    const struct EntlabComplex *rho0,
                                    struct EntlabComplex *out);

// Fixed-step RK4 trajectory sampled at `samples + 1` equally spaced times.
// `dt <= 0` selects the default step.
//
// # Safety
// `rho0` must point to 16 entries and `out` be writable.
enum EntlabStatus entlab_propagate(const struct EntlabModel *model,
                                   const struct EntlabComplex *rho0,
                                   double t_max,
                                   size_t samples,
                                   double dt,
                                   struct EntlabTrajectory **out);

// Number of stored samples, 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
size_t entlab_trajectory_len(const struct EntlabTrajectory *traj);

// # Safety
// `traj` must be a live handle; `t` and `rho` writable (`rho` 16 entries).
enum EntlabStatus entlab_trajectory_sample(const struct EntlabTrajectory *traj,
                                           size_t index,
                                           double *t,
                                           struct EntlabComplex *rho);

// # Safety
// `traj` must come from [`entlab_propagate`] and not be used afterwards.
void entlab_trajectory_free(struct EntlabTrajectory *traj);

// Maximizes the stationary concurrence over μ₁ for independent decay with
// position noise strengths `gamma1`, `gamma2`.
//
// # Safety
// `mu1_star` and `c_max` must be writable.
enum EntlabStatus entlab_optimize_independent(double gamma,
                                              double gamma1,
                                              double gamma2,
                                              double *mu1_star,
                                              double *c_max);

// Maximizes the stationary concurrence over μ₁ for collective decay at weight `kappa`.
//
// # Safety
// `mu1_star` and `c_max` must be writable.
enum EntlabStatus entlab_optimize_collective(double gamma,
                                             double kappa,
                                             double *mu1_star,
                                             double *c_max);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTLAB_H */

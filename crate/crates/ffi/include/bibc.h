/* C ABI for the bistatic backscatter simulation and AP-selection toolkit. */

#ifndef BIBC_H
#define BIBC_H

/* Generated by cbindgen from bibc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code returned by every entry point.
 */
typedef enum BibcStatus {
  BIBC_STATUS_OK = 0,
  BIBC_STATUS_NULL_POINTER = 1,
  BIBC_STATUS_INVALID_ARGUMENT = 2,
  BIBC_STATUS_INVALID_CONFIG = 3,
  BIBC_STATUS_DEGENERATE_GEOMETRY = 4,
  BIBC_STATUS_INFEASIBLE_GEOMETRY = 5,
  BIBC_STATUS_PARSE_ERROR = 6,
  BIBC_STATUS_IO_ERROR = 7,
  BIBC_STATUS_UTF8_ERROR = 8,
  BIBC_STATUS_PANIC = 9,
} BibcStatus;

/*
 How readers are assigned while an emitter transmits.
 */
typedef enum BibcReaderPolicy {
  /*
   Every AP except the slot's emitter reads.
   */
  BIBC_READER_POLICY_ALL_OTHERS = 0,
  /*
   Only APs outside the emitter set read.
   */
  BIBC_READER_POLICY_COMPLEMENT = 1,
} BibcReaderPolicy;

/*
 Opaque deployment handle.
 */
typedef struct BibcDeployment BibcDeployment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread, or null if
 none has occurred. Valid until the next failing call on the thread.
 */
const char *bibc_last_error_message(void);

/*
 Create a deployment from coordinate arrays `xs[i], ys[i]` (meters) of
 length `num_aps`, a common antenna count, and the coverage rectangle.

 # Safety
 `xs` and `ys` must point to `num_aps` readable doubles; `out` must be a
 valid pointer. The returned handle must be released with
 [`bibc_deployment_free`].
 */
enum BibcStatus bibc_deployment_new(const double *xs,
                                    const double *ys,
                                    size_t num_aps,
                                    size_t antennas_per_ap,
                                    double coverage_center_x,
                                    double coverage_center_y,
                                    double coverage_width,
                                    double coverage_height,
                                    struct BibcDeployment **out);

/*
 Parse a deployment from the documented text format.

 # Safety
 `text` must be a NUL-terminated string; `out` must be valid. The handle
 must be released with [`bibc_deployment_free`].
 */
enum BibcStatus bibc_deployment_from_text(const char *text, struct BibcDeployment **out);

/*
 Release a deployment handle. A null handle is a no-op.

 # Safety
 `handle` must have been returned by a `bibc_deployment_*` constructor
 and not freed before.
 */
void bibc_deployment_free(struct BibcDeployment *handle);

/*
 Number of APs in the deployment.

 # Safety
 `handle` and `out` must be valid pointers.
 */
enum BibcStatus bibc_deployment_num_aps(const struct BibcDeployment *handle, size_t *out);

/*
 Exact detector error probability for a device at `(bd_x, bd_y)`, from
 geometry alone. `transmit_power` is linear under unit-variance noise;
 the transmit SNR is `transmit_power * tau_d`.

 # Safety
 `handle`, `ce`, and the out pointers must be valid; `ce` must point to
 `n_ce` readable indices.
 */
enum BibcStatus bibc_closed_form_pe(const struct BibcDeployment *handle,
                                    double bd_x,
                                    double bd_y,
                                    double gamma0,
                                    double gamma1,
                                    double transmit_power,
                                    size_t tau_d,
                                    const size_t *ce,
                                    size_t n_ce,
                                    enum BibcReaderPolicy policy,
                                    double *out_pe,
                                    double *out_argument);

/*
 Monte-Carlo bit-error estimate over the full simulate→detect pipeline.

 # Safety
 Pointer arguments as in [`bibc_closed_form_pe`].
 */
enum BibcStatus bibc_monte_carlo_ber(const struct BibcDeployment *handle,
                                     double bd_x,
                                     double bd_y,
                                     double gamma0,
                                     double gamma1,
                                     double transmit_power,
                                     size_t tau_d,
                                     const size_t *ce,
                                     size_t n_ce,
                                     enum BibcReaderPolicy policy,
                                     size_t n_trials,
                                     uint64_t seed,
                                     double *out_ber,
                                     double *out_ci_halfwidth);

/*
 Rotating-emitter figure of merit Λ1 (readers: all APs but the slot's
 emitter). Requires `slots == n_ce`.

 # Safety
 Pointer arguments as in [`bibc_closed_form_pe`].
 */
enum BibcStatus bibc_lambda1(const struct BibcDeployment *handle,
                             double bd_x,
                             double bd_y,
                             const size_t *ce,
                             size_t n_ce,
                             size_t slots,
                             double *out);

/*
 Nearest-emitter figure of merit Λ2 over `slots` slots.

 # Safety
 Pointer arguments as in [`bibc_closed_form_pe`].
 */
enum BibcStatus bibc_lambda2(const struct BibcDeployment *handle,
                             double bd_x,
                             double bd_y,
                             const size_t *ce,
                             size_t n_ce,
                             size_t slots,
                             double *out);

/*
 Simultaneous-emitter figure of merit Λ3 (readers: complement of the
 emitter set). Requires `slots == n_ce` and at least one reader.

 # Safety
 Pointer arguments as in [`bibc_closed_form_pe`].
 */
enum BibcStatus bibc_lambda3(const struct BibcDeployment *handle,
                             double bd_x,
                             double bd_y,
                             const size_t *ce,
                             size_t n_ce,
                             size_t slots,
                             double *out);

/*
 Choose the emitter maximizing the worst case over the region via
 multi-start projected gradient descent.

 # Safety
 `handle` and the out pointers must be valid.
 */
enum BibcStatus bibc_select_ce(const struct BibcDeployment *handle,
                               double region_center_x,
                               double region_center_y,
                               double region_width,
                               double region_height,
                               double learning_rate,
                               size_t max_iterations,
                               double convergence_tol,
                               size_t starts_x,
                               size_t starts_y,
                               size_t *out_ce,
                               double *out_worst_x,
                               double *out_worst_y,
                               double *out_worst_value);

/*
 Choose the emitter-reader pair by the pruned boundary search. A
 non-positive `boundary_step` selects the default (perimeter/400).

 # Safety
 `handle` and the out pointers must be valid.
 */
enum BibcStatus bibc_select_pair(const struct BibcDeployment *handle,
                                 double region_center_x,
                                 double region_center_y,
                                 double region_width,
                                 double region_height,
                                 size_t kappa,
                                 double boundary_step,
                                 size_t *out_ce,
                                 size_t *out_reader,
                                 double *out_worst_x,
                                 double *out_worst_y,
                                 double *out_worst_value);

/*
 Benchmark pair: the two APs nearest the region centroid.

 # Safety
 `handle` and the out pointers must be valid.
 */
enum BibcStatus bibc_benchmark_pair(const struct BibcDeployment *handle,
                                    double region_center_x,
                                    double region_center_y,
                                    double region_width,
                                    double region_height,
                                    size_t *out_ce,
                                    size_t *out_reader,
                                    double *out_worst_x,
                                    double *out_worst_y,
                                    double *out_worst_value);

/*
 Transmit-SNR gap `10·log10(metric_a/metric_b)` in dB.

 # Safety
 `out` must be a valid pointer.
 */
enum BibcStatus bibc_snr_gap_db(double metric_a, double metric_b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIBC_H */

#ifndef PHASEBIN_H
#define PHASEBIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Estimator that produced a distribution.
 */
typedef enum {
  PB_METHOD_BINNED = 0,
  PB_METHOD_ANALYTIC = 1,
  PB_METHOD_QUADRATURE = 2,
  PB_METHOD_WIGNER_AVERAGE = 3,
} PbMethod;

/**
 * Result of every fallible call.
 */
typedef enum {
  PB_STATUS_OK = 0,
  /**
   * Argument outside the mathematical domain.
   */
  PB_STATUS_DOMAIN = 1,
  /**
   * Not available for this state or distribution.
   */
  PB_STATUS_UNSUPPORTED = 2,
  /**
   * Quadrature, cutoff or trajectory-drift failure.
   */
  PB_STATUS_NUMERICAL = 3,
  /**
   * Bad configuration or input file.
   */
  PB_STATUS_CONFIG = 4,
  PB_STATUS_IO = 5,
  PB_STATUS_NULL_POINTER = 6,
  /**
   * The output buffer is shorter than required.
   */
  PB_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * A Rust panic was caught.
   */
  PB_STATUS_PANIC = 8,
} PbStatus;

typedef struct PbDistribution PbDistribution;

typedef struct PbEnsemble PbEnsemble;

typedef struct PbState PbState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes, or 0 when
 * there is none.
 */
size_t pb_last_error_message(char *buf, size_t len);

PbStatus pb_state_vacuum(PbState **out);

PbStatus pb_state_coherent(double re, double im, PbState **out);

PbStatus pb_state_thermal(double nbar, PbState **out);

/**
 * Displacement `re + i·im`, squeezing `s ≥ 0` at angle `theta`.
 */
PbStatus pb_state_squeezed(double re, double im, double s, double theta, PbState **out);

void pb_state_free(PbState *state);

/**
 * Wigner density `W(re + i·im)`.
 */
PbStatus pb_state_density(const PbState *state, double re, double im, double *out);

/**
 * Mean occupation `⟨n̂⟩`.
 */
PbStatus pb_state_mean_occupation(const PbState *state, double *out);

/**
 * Draw `count` samples; identical for identical `(state, count, seed)`.
 */
PbStatus pb_sample(const PbState *state, size_t count, uint64_t seed, PbEnsemble **out);

/**
 * Build a one-mode ensemble from caller-supplied amplitudes.
 */
PbStatus pb_ensemble_from_samples(const double *re,
                                  const double *im,
                                  size_t count,
                                  PbEnsemble **out);

/**
 * Samples per mode.
 */
size_t pb_ensemble_count(const PbEnsemble *ens);

/**
 * Copy mode `mode` into `re` and `im`, each of length `len ≥ count`.
 */
PbStatus pb_ensemble_copy_mode(const PbEnsemble *ens,
                               size_t mode,
                               double *re,
                               double *im,
                               size_t len);

void pb_ensemble_free(PbEnsemble *ens);

/**
 * `e^{-x/2} L_n(x)`; `ln_abs` receives `ln|·|`, which stays finite when
 * the value itself underflows. Either output may be null.
 */
PbStatus pb_laguerre_scaled(size_t n, double x, double *value, double *ln_abs);

/**
 * Fock-state Wigner function `W_n(re + i·im)`.
 */
PbStatus pb_fock_wigner(size_t n, double re, double im, double *out);

/**
 * Bin `|α|²` of one mode into `n = 0..=n_max`.
 */
PbStatus pb_bin(const PbEnsemble *ens, size_t mode, size_t n_max, PbDistribution **out);

/**
 * Sample and bin in one pass without storing the ensemble.
 */
PbStatus pb_sample_and_bin(const PbState *state,
                           size_t count,
                           uint64_t seed,
                           size_t n_max,
                           PbDistribution **out);

/**
 * `P_n = π⟨W_n⟩` averaged over the samples of one mode.
 */
PbStatus pb_wigner_average(const PbEnsemble *ens, size_t mode, size_t n_max, PbDistribution **out);

/**
 * Exact `P_n` by phase-space quadrature.
 */
PbStatus pb_quadrature(const PbState *state, size_t n_max, PbDistribution **out);

/**
 * Binned `P̃_n` by quadrature over unit annuli.
 */
PbStatus pb_boxcar_quadrature(const PbState *state, size_t n_max, PbDistribution **out);

/**
 * Geometric thermal distribution.
 */
PbStatus pb_thermal(double nbar, size_t n_max, PbDistribution **out);

/**
 * Closed-form squeezed coherent distribution. `n_max < 0` picks a cutoff
 * holding all but 1e-12 of the probability.
 */
PbStatus pb_squeezed_coherent(double beta_mag,
                              double varphi,
                              double s,
                              double theta,
                              int64_t n_max,
                              PbDistribution **out);

/**
 * Bhattacharyya distance and coefficient; either output may be null.
 */
PbStatus pb_bhattacharyya(const PbDistribution *p,
                          const PbDistribution *q,
                          double *distance,
                          double *coefficient);

/**
 * Closed-form distance between thermal `P_n` and its binned estimate.
 */
PbStatus pb_db_thermal(double nbar, double *out);

/**
 * Number of entries, `n_max + 1`.
 */
size_t pb_distribution_len(const PbDistribution *d);

PbStatus pb_distribution_method(const PbDistribution *d, PbMethod *out);

/**
 * Copy the probabilities into `out[0..len]`.
 */
PbStatus pb_distribution_probs(const PbDistribution *d, double *out, size_t len);

/**
 * Copy the standard errors; `Unsupported` for exact distributions.
 */
PbStatus pb_distribution_stderr(const PbDistribution *d, double *out, size_t len);

void pb_distribution_free(PbDistribution *d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHASEBIN_H */

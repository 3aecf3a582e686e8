#ifndef QLA_H
#define QLA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QlaStatus {
  QLA_STATUS_OK = 0,
  // A required pointer argument was NULL.
  QLA_STATUS_NULL_POINTER = 1,
  // An argument is out of range or inconsistent.
  QLA_STATUS_INVALID_ARGUMENT = 2,
  // The attenuator has failed catastrophically and accepts no exposures.
  QLA_STATUS_DESTROYED = 3,
  // A configuration document failed to parse or validate.
  QLA_STATUS_CONFIG_ERROR = 4,
  // A string argument is not valid UTF-8.
  QLA_STATUS_INVALID_UTF8 = 5,
  // Unexpected internal failure. Please report it.
  QLA_STATUS_INTERNAL = 6,
} QlaStatus;

typedef enum QlaClassification {
  QLA_CLASSIFICATION_COMPROMISED = 0,
  QLA_CLASSIFICATION_DENIAL_OF_SERVICE = 1,
  QLA_CLASSIFICATION_UNAFFECTED = 2,
} QlaClassification;

typedef enum QlaPrior {
  QLA_PRIOR_JEFFREYS = 0,
  QLA_PRIOR_UNIFORM = 1,
} QlaPrior;

typedef enum QlaClass {
  QLA_CLASS_MANUAL_VOA = 0,
  QLA_CLASS_FIXED = 1,
  QLA_CLASS_MEMS_VOA = 2,
  QLA_CLASS_VDMC_VOA = 3,
} QlaClass;

typedef enum QlaExposureKind {
  QLA_EXPOSURE_KIND_NO_CHANGE = 0,
  QLA_EXPOSURE_KIND_TEMPORARY_DROP = 1,
  QLA_EXPOSURE_KIND_PERMANENT_DROP = 2,
  QLA_EXPOSURE_KIND_CRITICAL_FAILURE = 3,
} QlaExposureKind;

typedef enum QlaOutcome {
  QLA_OUTCOME_SUCCESS = 0,
  QLA_OUTCOME_CRITICAL_FAILURE = 1,
  QLA_OUTCOME_INCONCLUSIVE = 2,
  QLA_OUTCOME_FIBER_FUSE_DOS = 3,
} QlaOutcome;

// Opaque attenuator sample with its own exposure RNG stream.
typedef struct QlaAttenuator QlaAttenuator;

// Opaque log of one finished campaign.
typedef struct QlaCampaign QlaCampaign;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent error on this thread. Valid until the
// next library call on the same thread. Never NULL.
const char *qla_last_error(void);

// Static name of a status code. Never NULL.
const char *qla_status_name(enum QlaStatus status);

// Release a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a pointer returned by this library that has not
// been freed yet.
void qla_string_free(char *s);

// dBm to watts.
double qla_dbm_to_watts(double p_dbm);

// Watts to dBm. Non-positive power is rejected.
//
// # Safety
// `out_dbm` must be NULL or valid for writing.
enum QlaStatus qla_watts_to_dbm(double p_w, double *out_dbm);

// Backward SRS threshold (W) of the default fiber cut to `length_km`.
//
// # Safety
// `out_w` must be NULL or valid for writing.
enum QlaStatus qla_srs_threshold_w(double length_km, double *out_w);

// Backward SBS threshold (W) of the default fiber cut to `length_km`,
// pumped by a source of the given linewidth.
//
// # Safety
// `out_w` must be NULL or valid for writing.
enum QlaStatus qla_sbs_threshold_w(double length_km, double linewidth_ghz, double *out_w);

// Largest power (W) that can be injected through the default fiber cut to
// `length_km` with a laser of the given maximum power and linewidth.
//
// # Safety
// `out_w` must be NULL or valid for writing.
enum QlaStatus qla_max_injectable_power_w(double length_km,
                                          double laser_max_w,
                                          double linewidth_ghz,
                                          double *out_w);

// Factor by which the mean photon number changes for an attenuation
// change of `delta_db` (negative means less attenuation).
double qla_mpn_ratio(double delta_db);

// Mean photon number after an attenuation change.
//
// # Safety
// `out_mu` must be NULL or valid for writing.
enum QlaStatus qla_adjusted_mu(double mu0, double delta_db, double *out_mu);

// Classify an attenuation change against the success (negative) and
// failure (positive) thresholds.
//
// # Safety
// `out` must be NULL or valid for writing.
enum QlaStatus qla_classify(double delta_db,
                            double success_threshold_db,
                            double failure_threshold_db,
                            enum QlaClassification *out);

// Posterior predictive probability that more than `fraction` of the
// untested systems in a population of `population` are vulnerable.
//
// # Safety
// `out_prob` must be NULL or valid for writing.
enum QlaStatus qla_risk_prob_exceeds(uint64_t tested,
                                     uint64_t compromised,
                                     uint64_t dos,
                                     uint64_t population,
                                     double fraction,
                                     enum QlaPrior prior,
                                     double *out_prob);

// Create a fresh sample of `class` with its class-default damage profile,
// monitored at `setpoint_db`. `seed` fixes both the sampled thresholds and
// the exposure RNG stream.
//
// # Safety
// `out` must be NULL or valid for writing a handle pointer.
enum QlaStatus qla_attenuator_new(enum QlaClass class_,
                                  double setpoint_db,
                                  uint64_t seed,
                                  struct QlaAttenuator **out);

// Release an attenuator handle. NULL is a no-op.
//
// # Safety
// `handle` must be NULL or a live handle from [`qla_attenuator_new`].
void qla_attenuator_free(struct QlaAttenuator *handle);

// Attenuation (dB) reported at `setting_db`.
//
// # Safety
// `handle` must be a live handle; `out_db` must be NULL or writable.
enum QlaStatus qla_attenuator_attenuation(const struct QlaAttenuator *handle,
                                          double setting_db,
                                          double *out_db);

// Expose the sample to `power_w` for `duration_s`, updating the handle in
// place. Either out-pointer may be NULL if the caller does not need it.
//
// # Safety
// `handle` must be a live handle; out-pointers must be NULL or writable.
enum QlaStatus qla_attenuator_expose(struct QlaAttenuator *handle,
                                     double power_w,
                                     double duration_s,
                                     enum QlaExposureKind *out_kind,
                                     double *out_delta_db);

// Let the sample cool with the laser off for `elapsed_s`.
//
// # Safety
// `handle` must be a live handle.
enum QlaStatus qla_attenuator_cool_down(struct QlaAttenuator *handle, double elapsed_s);

// Whether the sample has failed catastrophically.
//
// # Safety
// `handle` must be a live handle; `out` must be NULL or writable.
enum QlaStatus qla_attenuator_is_destroyed(const struct QlaAttenuator *handle, bool *out);

// The full sample state as JSON. Free with [`qla_string_free`].
//
// # Safety
// `handle` must be a live handle; `out_json` must be NULL or writable.
enum QlaStatus qla_attenuator_to_json(const struct QlaAttenuator *handle, char **out_json);

// Run one seeded campaign. `setpoint_db` may be NaN for the class default;
// `config_json` may be NULL for the shipped defaults. Trial `index` of
// master seed `seed` is run, so `index = i` reproduces the i-th trial of a
// Monte Carlo batch with the same seed.
//
// # Safety
// `config_json` must be NULL or a NUL-terminated string; `out` must be
// NULL or writable.
enum QlaStatus qla_campaign_run(enum QlaClass class_,
                                double setpoint_db,
                                uint64_t seed,
                                uint64_t index,
                                const char *config_json,
                                struct QlaCampaign **out);

// Release a campaign handle. NULL is a no-op.
//
// # Safety
// `handle` must be NULL or a live handle from [`qla_campaign_run`].
void qla_campaign_free(struct QlaCampaign *handle);

// How the campaign ended.
//
// # Safety
// `handle` must be a live handle; `out` must be NULL or writable.
enum QlaStatus qla_campaign_outcome(const struct QlaCampaign *handle, enum QlaOutcome *out);

// Number of power steps the campaign applied.
//
// # Safety
// `handle` must be a live handle; `out` must be NULL or writable.
enum QlaStatus qla_campaign_step_count(const struct QlaCampaign *handle, size_t *out);

// The campaign log as JSON. Free with [`qla_string_free`].
//
// # Safety
// `handle` must be a live handle; `out_json` must be NULL or writable.
enum QlaStatus qla_campaign_to_json(const struct QlaCampaign *handle, char **out_json);

// Run `n_trials` seeded campaigns and return the aggregate summary as
// JSON. Free with [`qla_string_free`].
//
// # Safety
// `config_json` must be NULL or a NUL-terminated string; `out_json` must
// be NULL or writable.
enum QlaStatus qla_monte_carlo_json(enum QlaClass class_,
                                    double setpoint_db,
                                    uint64_t n_trials,
                                    uint64_t seed,
                                    const char *config_json,
                                    char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLA_H */

#ifndef SEQSHARE_H
#define SEQSHARE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SEQSHARE_STATE_BELL 0

#define SEQSHARE_STATE_GHZ 1

#define SEQSHARE_STATE_W 2

#define SEQSHARE_STATE_GHZ_PRIME 3

#define SEQSHARE_STATE_W_PRIME 4

#define SEQSHARE_MS1 1

#define SEQSHARE_MS2 2

#define SEQSHARE_MS3 3

#define SEQSHARE_MS4 4

#define SEQSHARE_MS5 5

#define SEQSHARE_MS6 6

#define SEQSHARE_CHANNEL_PHASE_FLIP 0

#define SEQSHARE_CHANNEL_BIT_FLIP 1

#define SEQSHARE_CHANNEL_DEPOLARIZING 2

#define SEQSHARE_CHANNEL_NOISELESS 3

typedef enum SeqshareStatus {
  SEQSHARE_STATUS_OK = 0,
  SEQSHARE_STATUS_NULL_POINTER = 1,
  SEQSHARE_STATUS_INVALID_ARGUMENT = 2,
  // No parameter value achieves the request.
  SEQSHARE_STATUS_INFEASIBLE = 3,
  SEQSHARE_STATUS_BUFFER_TOO_SMALL = 4,
  SEQSHARE_STATUS_INTERNAL = 5,
} SeqshareStatus;

// Opaque protocol configuration.
typedef struct SeqshareScenario SeqshareScenario;

typedef struct SeqshareDoubleViolation {
  double theta;
  double epsilon;
  double gamma1;
  double witness1;
  double witness2;
} SeqshareDoubleViolation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *seqshare_last_error(void);

// Library version as a static NUL-terminated string.
const char *seqshare_version(void);

// Builds a scenario with `n_gammas` sequential observers.
//
// # Safety
// `gammas` must point to `n_gammas` doubles; `out` must be writable.
// Release the handle with [`seqshare_scenario_free`].
enum SeqshareStatus seqshare_scenario_new(uint32_t state_family,
                                          uint32_t strategy_tag,
                                          uint32_t channel_kind,
                                          double p,
                                          double theta,
                                          const double *gammas,
                                          size_t n_gammas,
                                          struct SeqshareScenario **out);

// # Safety
// `scenario` must come from [`seqshare_scenario_new`] and not be freed twice. Null is ignored.
void seqshare_scenario_free(struct SeqshareScenario *scenario);

// Number of sequential observers, or 0 for a null handle.
//
// # Safety
// `scenario` must be null or a live handle.
size_t seqshare_scenario_observers(const struct SeqshareScenario *scenario);

// Runs the protocol and writes one witness per observer into `out`.
//
// # Safety
// `scenario` must be a live handle and `out` valid for `capacity` writes.
enum SeqshareStatus seqshare_scenario_run(const struct SeqshareScenario *scenario,
                                          double *out,
                                          size_t capacity);

// Closed-form witness of observer `k` (1-based).
//
// # Safety
// `gammas` must point to `n_gammas` doubles; `out` must be writable.
enum SeqshareStatus seqshare_witness_closed(uint32_t strategy_tag,
                                            uint32_t channel_kind,
                                            size_t k,
                                            double theta,
                                            const double *gammas,
                                            size_t n_gammas,
                                            double p,
                                            double *out);

// Minimal sharpness sequence for margin `epsilon`. Entries past the feasible
// prefix are written as `INFINITY`; `feasible` receives the prefix length.
//
// # Safety
// `out` must be valid for `n` writes and `feasible` writable.
enum SeqshareStatus seqshare_gamma_sequence(uint32_t strategy_tag,
                                            uint32_t channel_kind,
                                            double theta,
                                            double epsilon,
                                            double p,
                                            size_t n,
                                            double *out,
                                            size_t *feasible);

// Margin that makes the second observer's required sharpness exactly 1.
// Returns `Infeasible` when no margin works.
//
// # Safety
// `out` must be writable.
enum SeqshareStatus seqshare_solve_double_violation(uint32_t strategy_tag,
                                                    uint32_t channel_kind,
                                                    double theta,
                                                    double p,
                                                    struct SeqshareDoubleViolation *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEQSHARE_H */

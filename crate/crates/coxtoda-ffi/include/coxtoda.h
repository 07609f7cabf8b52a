#ifndef COXTODA_H
#define COXTODA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which route `cox_gbd` uses.
typedef enum CoxGbdRoute {
  COX_GBD_ROUTE_CLUSTER = 0,
  COX_GBD_ROUTE_TABLE = 1,
  COX_GBD_ROUTE_MINORS = 2,
} CoxGbdRoute;

// Result of every fallible call.
typedef enum CoxStatus {
  COX_STATUS_OK = 0,
  COX_STATUS_ARGUMENT_ERROR = 1,
  COX_STATUS_SINGULAR_MATRIX = 2,
  COX_STATUS_NUMERIC_OVERFLOW = 3,
  COX_STATUS_NOT_COXETER = 4,
  COX_STATUS_INVALID_PARAMS = 5,
  COX_STATUS_NON_GENERIC = 6,
  COX_STATUS_RANGE_ERROR = 7,
  COX_STATUS_INVALID_MOVE = 8,
  COX_STATUS_FLOW_DIVERGED = 9,
  COX_STATUS_NULL_POINTER = 10,
  COX_STATUS_INVALID_UTF8 = 11,
  COX_STATUS_PANIC = 12,
} CoxStatus;

// A two-sided moment sequence.
typedef struct CoxMoments CoxMoments;

// A Coxeter pair `(u, v)`.
typedef struct CoxPair CoxPair;

// Factorization parameters `d`, `c^+`, `c^-`.
typedef struct CoxParams CoxParams;

// A cluster seed: values and exchange matrix.
typedef struct CoxSeed CoxSeed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *cox_last_error(void);

// Library version as a static NUL-terminated string.
const char *cox_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from a `char**` out-parameter of this library, or be null.
void cox_string_free(char *s);

// Pair from its two index sets (both must contain 1 and n).
//
// # Safety
// The arrays must hold the given number of elements.
enum CoxStatus cox_pair_new(size_t n,
                            const size_t *iplus,
                            size_t iplus_len,
                            const size_t *iminus,
                            size_t iminus_len,
                            struct CoxPair **out);

// The pair with `ε = (2,0,…,0)`.
//
// # Safety
// `out` must be writable.
enum CoxStatus cox_pair_tridiagonal(size_t n, struct CoxPair **out);

// The pair with `ε = (2,1,…,1,0)`.
//
// # Safety
// `out` must be writable.
enum CoxStatus cox_pair_relativistic(size_t n, struct CoxPair **out);

// The pair keyed to a chart `ε`.
//
// # Safety
// `eps` must hold `n` bytes.
enum CoxStatus cox_pair_for_eps(const uint8_t *eps, size_t n, struct CoxPair **out);

// Pair from `{"n": …, "Iplus": […], "Iminus": […]}`.
//
// # Safety
// `json` must be a NUL-terminated string.
enum CoxStatus cox_pair_from_json(const char *json, struct CoxPair **out);

// # Safety
// `pair` must be a live handle.
enum CoxStatus cox_pair_to_json(const struct CoxPair *pair, char **out);

// Size `n`, or 0 for a null handle.
//
// # Safety
// `pair` must be a live handle or null.
size_t cox_pair_n(const struct CoxPair *pair);

// Copies `ε` into `buf`, which must have room for `n` bytes.
//
// # Safety
// `buf` must hold `len` bytes.
enum CoxStatus cox_pair_eps(const struct CoxPair *pair, uint8_t *buf, size_t len);

// # Safety
// `pair` must come from this library, or be null.
void cox_pair_free(struct CoxPair *pair);

// Parameters from `{"d": […], "cplus": […], "cminus": […]}` or the
// reduced form `{"d": […], "c": […]}`.
//
// # Safety
// `json` must be a NUL-terminated string.
enum CoxStatus cox_params_from_json(const char *json, struct CoxParams **out);

// # Safety
// `params` must be a live handle.
enum CoxStatus cox_params_to_json(const struct CoxParams *params, char **out);

// Reduced parameters as doubles: `d` (n values) and `c = c^+ c^-`
// (n−1 values).
//
// # Safety
// `d` must hold `n` doubles and `c` must hold `n−1`.
enum CoxStatus cox_params_values(const struct CoxParams *params, double *d, double *c);

// # Safety
// `params` must come from this library, or be null.
void cox_params_free(struct CoxParams *params);

// `X` as a JSON array of rows of rational strings.
//
// # Safety
// Handles must be live.
enum CoxStatus cox_build_x(const struct CoxPair *pair, const struct CoxParams *params, char **out);

// Factorization parameters of a matrix given as JSON rows.
//
// # Safety
// `matrix_json` must be a NUL-terminated string; `pair` must be live.
enum CoxStatus cox_params_from_x(const struct CoxPair *pair,
                                 const char *matrix_json,
                                 struct CoxParams **out);

// Moments of `X(pair, params)` with `H_0 = 1`.
//
// # Safety
// Handles must be live.
enum CoxStatus cox_moments_of(const struct CoxPair *pair,
                              const struct CoxParams *params,
                              struct CoxMoments **out);

// Moments from `{"H": [H_0, …, H_{2n−1}]}`.
//
// # Safety
// `json` must be a NUL-terminated string.
enum CoxStatus cox_moments_from_json(const char *json, struct CoxMoments **out);

// # Safety
// `m` must be a live handle.
enum CoxStatus cox_moments_to_json(const struct CoxMoments *m, char **out);

// # Safety
// `m` must come from this library, or be null.
void cox_moments_free(struct CoxMoments *m);

// The inverse problem: parameters in the chart of `pair` with the given
// moments.
//
// # Safety
// Handles must be live.
enum CoxStatus cox_restore_params(const struct CoxPair *pair,
                                  const struct CoxMoments *m,
                                  struct CoxParams **out);

// Initial seed of the chart `ε`.
//
// # Safety
// `eps` must hold `n` bytes; `m` must be live.
enum CoxStatus cox_seed_init(const uint8_t *eps,
                             size_t n,
                             const struct CoxMoments *m,
                             struct CoxSeed **out);

// Mutation in 1-based direction `k ∈ [1, 2n−2]`; returns a new seed.
//
// # Safety
// `seed` must be live.
enum CoxStatus cox_seed_mutate(const struct CoxSeed *seed, size_t k, struct CoxSeed **out);

// Moves a tagged seed to the chart `ε′`.
//
// # Safety
// `eps` must hold `n` bytes; `seed` must be live.
enum CoxStatus cox_seed_transport(const struct CoxSeed *seed,
                                  const uint8_t *eps,
                                  size_t n,
                                  struct CoxSeed **out);

// # Safety
// `json` must be a NUL-terminated string.
enum CoxStatus cox_seed_from_json(const char *json, struct CoxSeed **out);

// # Safety
// `seed` must be live.
enum CoxStatus cox_seed_to_json(const struct CoxSeed *seed, char **out);

// # Safety
// `seed` must come from this library, or be null.
void cox_seed_free(struct CoxSeed *seed);

// Parameters of the point of `to`'s cell with the same Weyl function.
//
// # Safety
// Handles must be live.
enum CoxStatus cox_gbd(const struct CoxPair *from,
                       const struct CoxPair *to,
                       const struct CoxParams *params,
                       enum CoxGbdRoute route,
                       struct CoxParams **out);

// `F_k = tr(X^k)/k` at reduced coordinates `c` (n−1), `d` (n).
//
// # Safety
// Arrays must have the stated lengths; `pair` must be live.
enum CoxStatus cox_hamiltonian(const struct CoxPair *pair,
                               const double *c,
                               const double *d,
                               uint32_t k,
                               double *out);

// RK4 on the `k`-th flow to `t_end`; writes the final state into
// `c_out`, `d_out`.
//
// # Safety
// Arrays must have the stated lengths; `pair` must be live.
enum CoxStatus cox_flow_rk4(const struct CoxPair *pair,
                            const double *c,
                            const double *d,
                            uint32_t k,
                            double t_end,
                            double dt,
                            double *c_out,
                            double *d_out);

// Explicit solution of the `k`-th flow at time `t`.
//
// # Safety
// Arrays must have the stated lengths; `pair` must be live.
enum CoxStatus cox_flow_moment(const struct CoxPair *pair,
                               const double *c,
                               const double *d,
                               uint32_t k,
                               double t,
                               double *c_out,
                               double *d_out);

// Runs a verification suite (`"all"` for every suite). `n = 0` and
// `trials = 0` select the defaults. `passed` receives 1 if every trial
// passed.
//
// # Safety
// `suite` must be a NUL-terminated string.
enum CoxStatus cox_verify(const char *suite,
                          size_t n,
                          size_t trials,
                          uint64_t seed,
                          char **report,
                          int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COXTODA_H */

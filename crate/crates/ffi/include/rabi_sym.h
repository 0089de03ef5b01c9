#ifndef RABI_SYM_H
#define RABI_SYM_H

#include <stddef.h>
#include <stdint.h>

/*
 Result of every fallible call.
 */
typedef enum RabiStatus {
  RABI_STATUS_OK = 0,
  RABI_STATUS_NULL_POINTER = 1,
  RABI_STATUS_INVALID_ARGUMENT = 2,
  RABI_STATUS_INVALID_PARAMS = 3,
  RABI_STATUS_CUTOFF_TOO_SMALL = 4,
  RABI_STATUS_NO_SOLUTION = 5,
  RABI_STATUS_GAUGE_AMBIGUITY = 6,
  RABI_STATUS_EMPTY_NULLSPACE = 7,
  RABI_STATUS_UNSUPPORTED_BIAS = 8,
  RABI_STATUS_ILL_CONDITIONED = 9,
  RABI_STATUS_UNCONVERGED = 10,
  RABI_STATUS_UNLABELED_SCAN = 11,
  RABI_STATUS_NUMERICAL = 12,
  RABI_STATUS_IO = 13,
  RABI_STATUS_PANIC = 14,
} RabiStatus;

typedef enum RabiElement {
  RABI_ELEMENT_A = 0,
  RABI_ELEMENT_B = 1,
  RABI_ELEMENT_C = 2,
  RABI_ELEMENT_D = 3,
} RabiElement;

typedef enum RabiSector {
  RABI_SECTOR_EVEN = 0,
  RABI_SECTOR_ODD = 1,
} RabiSector;

/*
 Coefficient table of a symmetry operator.
 */
typedef struct RabiCoeffTable RabiCoeffTable;

/*
 Model parameters `delta`, `epsilon`, `g` with `omega = 1`.
 */
typedef struct RabiParams RabiParams;

/*
 Spectrum of a coupling sweep.
 */
typedef struct RabiScan RabiScan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or an empty string.
 The pointer stays valid until the next call on the same thread.
 */
const char *rabi_last_error(void);

/*
 Frees a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void rabi_string_free(char *s);

/*
 Creates parameters with a fixed bias `epsilon`.

 # Safety
 `out` must be a valid pointer.
 */
enum RabiStatus rabi_params_new(double delta, double epsilon, double g, struct RabiParams **out);

/*
 Creates parameters with `epsilon = 2 * ratio * beta`.

 # Safety
 `out` must be a valid pointer.
 */
enum RabiStatus rabi_params_with_bias_ratio(double delta,
                                            double ratio,
                                            double g,
                                            struct RabiParams **out);

/*
 # Safety
 `p` must come from this library and not have been freed. Null is ignored.
 */
void rabi_params_free(struct RabiParams *p);

/*
 `beta = sqrt(1 - 4 g^2)`.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_params_beta(const struct RabiParams *p, double *out);

/*
 `epsilon / (2 beta)`.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_params_bias_ratio(const struct RabiParams *p, double *out);

/*
 Solves for the coefficients of `J_N`. The bias of `p` is ignored and
 set to `2 N beta`.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_solve(const struct RabiParams *p,
                                  uint32_t n_bias,
                                  struct RabiCoeffTable **out);

/*
 Tabulated closed forms, `N <= 3`.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_closed_form(const struct RabiParams *p,
                                        uint32_t n_bias,
                                        struct RabiCoeffTable **out);

/*
 # Safety
 `t` must come from this library and not have been freed. Null is ignored.
 */
void rabi_coeffs_free(struct RabiCoeffTable *t);

/*
 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_n_bias(const struct RabiCoeffTable *t, uint32_t *out);

/*
 Coefficient of `(a_+^dag)^n (a_-)^m` in the given block. Indices off
 the lattice `n + m <= 2N`, `n + m` even, are rejected.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_get(const struct RabiCoeffTable *t,
                                enum RabiElement elem,
                                uint32_t n,
                                uint32_t m,
                                double *out);

/*
 Largest entrywise `|x - y| / max(|y|, 1)` against `reference`.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_max_relative_error(const struct RabiCoeffTable *t,
                                               const struct RabiCoeffTable *reference,
                                               double *out);

/*
 JSON serialization; free with [`rabi_string_free`].

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_to_json(const struct RabiCoeffTable *t, char **out);

/*
 Parses a table produced by [`rabi_coeffs_to_json`].

 # Safety
 `json` must be a NUL-terminated string; `out` must be valid.
 */
enum RabiStatus rabi_coeffs_from_json(const char *json, struct RabiCoeffTable **out);

/*
 Relative commutator `||[J, H]|| / (||J|| ||H||)` on the truncation
 window at `cutoff` sector states.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_coeffs_commutator_residual(const struct RabiCoeffTable *t,
                                                enum RabiSector sector,
                                                uintptr_t cutoff,
                                                double *out);

/*
 Sweeps `g` over `steps` evenly spaced points of `[g_min, g_max]` with the
 bias held at `epsilon = 2 * bias_ratio * beta(g)`.

 # Safety
 `out` must be a valid pointer.
 */
enum RabiStatus rabi_scan_new(double delta,
                              double bias_ratio,
                              enum RabiSector sector,
                              uintptr_t cutoff,
                              uintptr_t n_levels,
                              double g_min,
                              double g_max,
                              uintptr_t steps,
                              struct RabiScan **out);

/*
 # Safety
 `s` must come from this library and not have been freed. Null is ignored.
 */
void rabi_scan_free(struct RabiScan *s);

/*
 Number of grid points and levels per point.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_scan_shape(const struct RabiScan *s, uintptr_t *points, uintptr_t *levels);

/*
 Coupling, rescaled energy `(E + 1/2) / beta` and parity (`1`, `-1`, or
 `0` when unlabeled) of one level at one grid point.

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_scan_level(const struct RabiScan *s,
                                uintptr_t point,
                                uintptr_t level,
                                double *g,
                                double *energy,
                                int8_t *parity);

/*
 CSV serialization; free with [`rabi_string_free`].

 # Safety
 Pointers must be valid.
 */
enum RabiStatus rabi_scan_to_csv(const struct RabiScan *s, char **out);

/*
 Detects crossings. Writes the JSON list to `json` (free with
 [`rabi_string_free`]; may be null to skip) and the number of true
 crossings to `n_true` (may be null).

 # Safety
 `s` must be valid; output pointers must be valid or null.
 */
enum RabiStatus rabi_scan_crossings(const struct RabiScan *s, char **json, uintptr_t *n_true);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RABI_SYM_H */

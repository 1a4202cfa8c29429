#ifndef HARMAP_H
#define HARMAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. `HARMAP_STATUS_OK` is zero; everything else is an error.
typedef enum HarmapStatus {
  HARMAP_STATUS_OK = 0,
  HARMAP_STATUS_NULL_POINTER = 1,
  HARMAP_STATUS_INVALID_UTF8 = 2,
  HARMAP_STATUS_PARSE = 3,
  HARMAP_STATUS_DOMAIN = 4,
  HARMAP_STATUS_DIVERGENCE = 5,
  HARMAP_STATUS_IO = 6,
  HARMAP_STATUS_PANIC = 7,
} HarmapStatus;

typedef enum HarmapExtremal {
  HARMAP_EXTREMAL_COEFF_ANALYTIC = 0,
  HARMAP_EXTREMAL_COEFF_COANALYTIC = 1,
  HARMAP_EXTREMAL_GROWTH_ANALYTIC = 2,
  HARMAP_EXTREMAL_GROWTH_COANALYTIC = 3,
  HARMAP_EXTREMAL_THETA = 4,
} HarmapExtremal;

typedef enum HarmapFamily {
  HARMAP_FAMILY_F1 = 1,
  HARMAP_FAMILY_F2 = 2,
  HARMAP_FAMILY_F3 = 3,
} HarmapFamily;

typedef enum HarmapLemma {
  HARMAP_LEMMA_A = 0,
  HARMAP_LEMMA_B = 1,
  HARMAP_LEMMA_C = 2,
} HarmapLemma;

// Opaque map handle.
typedef struct HarmapMap HarmapMap;

typedef struct HarmapComplex {
  double re;
  double im;
} HarmapComplex;

// Summary of a certificate. The full record is available as JSON through
// [`harmap_certificate_json`].
typedef struct HarmapCertificate {
  double margin;
  double tolerance;
  bool passed;
} HarmapCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *harmap_last_error_message(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void harmap_string_free(char *s);

// Parses a map from `{"h": [[re, im], ...], "g": [...]}`.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum HarmapStatus harmap_map_from_json(const char *json, struct HarmapMap **out);

// # Safety
// `map` must be a live handle; `out` receives a string for [`harmap_string_free`].
enum HarmapStatus harmap_map_to_json(const struct HarmapMap *map, char **out);

// Releases a map. Null is ignored.
//
// # Safety
// `map` must come from this library and not be freed twice.
void harmap_map_free(struct HarmapMap *map);

// Truncation degree of the map, or 0 for a null handle.
//
// # Safety
// `map` must be null or a live handle.
size_t harmap_map_degree(const struct HarmapMap *map);

// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_map_eval(const struct HarmapMap *map,
                                  struct HarmapComplex z_in,
                                  struct HarmapComplex *out);

// Pointwise defect `|z h'' + alpha (h' - 1)| + |z g'' + alpha g'|`.
//
// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_map_defect(const struct HarmapMap *map,
                                    double alpha,
                                    double beta,
                                    struct HarmapComplex z_in,
                                    double *out);

// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_map_jacobian(const struct HarmapMap *map,
                                      struct HarmapComplex z_in,
                                      double *out);

// Sharpness witness of the given kind; `n` is the coefficient index where it applies.
//
// # Safety
// `out` must be valid.
enum HarmapStatus harmap_make_extremal(enum HarmapExtremal kind,
                                       size_t n,
                                       double alpha,
                                       double beta,
                                       struct HarmapMap **out);

// Hypergeometric construction. `truncation == 0` picks the degree automatically.
//
// # Safety
// `out` must be valid.
enum HarmapStatus harmap_build_hyper(enum HarmapFamily fam,
                                     double a,
                                     double b,
                                     double c,
                                     double alpha,
                                     double beta,
                                     size_t truncation,
                                     struct HarmapMap **out);

// Polynomial construction with `a = b = -m`.
//
// # Safety
// `out` must be valid.
enum HarmapStatus harmap_build_poly(enum HarmapFamily fam,
                                    uint32_t m,
                                    double c,
                                    double alpha,
                                    double beta,
                                    struct HarmapMap **out);

// Coefficient-sum certificate. Fails with `Domain` unless the map has `g'(0) = 0`.
//
// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_coefficient_margin(const struct HarmapMap *map,
                                            double alpha,
                                            double beta,
                                            struct HarmapCertificate *out);

// Supremum of the defect on the default polar grid.
//
// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_grid_sup(const struct HarmapMap *map,
                                  double alpha,
                                  double beta,
                                  struct HarmapCertificate *out);

// Rotation sweep over `lambda_count` unimodular factors on the default grid.
//
// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_lambda_sweep(const struct HarmapMap *map,
                                      double alpha,
                                      double beta,
                                      size_t lambda_count,
                                      struct HarmapCertificate *out);

// Minimum Jacobian on the default grid; passes only when strictly positive.
//
// # Safety
// `map` must be a live handle and `out` valid.
enum HarmapStatus harmap_sense_preserving(const struct HarmapMap *map,
                                          struct HarmapCertificate *out);

// All certificates the CLI `check` command runs, as a JSON array.
//
// # Safety
// `map` must be a live handle; `out` receives a string for [`harmap_string_free`].
enum HarmapStatus harmap_certificate_json(const struct HarmapMap *map,
                                          double alpha,
                                          double beta,
                                          char **out);

// Sharp bound on the n-th coefficient, `n >= 2`.
//
// # Safety
// `out` must be valid.
enum HarmapStatus harmap_coeff_bound(size_t n, double alpha, double beta, double *out);

// Lower and upper bounds on `|f(z)|` at `|z| = r`. Needs `beta <= 1 + alpha`.
//
// # Safety
// `lower` and `upper` must be valid.
enum HarmapStatus harmap_growth_envelope(double r,
                                         double alpha,
                                         double beta,
                                         double *lower,
                                         double *upper);

// `F(a, b; c; 1)`; `Divergence` when `c - a - b <= 0` and the series does not terminate.
//
// # Safety
// `out` must be valid.
enum HarmapStatus harmap_gauss_value(double a, double b, double c, double *out);

// Closed form of a weighted unit-point sum together with its summed oracle.
//
// # Safety
// `closed_form` and `oracle` must be valid.
enum HarmapStatus harmap_lemma_sum(enum HarmapLemma kind,
                                   double a,
                                   double b,
                                   double c,
                                   double *closed_form,
                                   double *oracle);

// Runs a seeded property suite (`series`, ..., `all`) and returns its JSON summary.
//
// # Safety
// `suite` must be a nul-terminated string; `out` and `passed` valid.
enum HarmapStatus harmap_verify_json(const char *suite, uint64_t seed, char **out, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARMAP_H */

#ifndef QTOPO_H
#define QTOPO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum QtopoStatus {
  QTOPO_STATUS_OK = 0,
  QTOPO_STATUS_NULL_POINTER = 1,
  QTOPO_STATUS_INVALID_ARGUMENT = 2,
  QTOPO_STATUS_DIMENSION_MISMATCH = 3,
  QTOPO_STATUS_INVALID_DATA = 4,
  QTOPO_STATUS_NUMERIC = 5,
  QTOPO_STATUS_PARSE = 6,
  QTOPO_STATUS_IO = 7,
  QTOPO_STATUS_PANIC = 8,
} QtopoStatus;

/*
 Persistence diagrams for degrees `0..=max_degree`.
 */
typedef struct QtopoDiagrams QtopoDiagrams;

/*
 Symmetric matrix of pairwise distances.
 */
typedef struct QtopoDistanceMatrix QtopoDistanceMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or null. The string
 stays valid until the next failing call on the same thread.
 */
const char *qtopo_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *qtopo_version(void);

/*
 Builds a distance matrix from `n * n` row-major entries.

 # Safety
 `entries` must point to `n * n` readable doubles and `out_matrix` must
 be writable.
 */
enum QtopoStatus qtopo_distance_matrix_new(uintptr_t n,
                                           const double *entries,
                                           struct QtopoDistanceMatrix **out_matrix);

/*
 Euclidean distances between `n` points of dimension `dim`, row-major.

 # Safety
 `points` must point to `n * dim` readable doubles; `out_matrix` must be
 writable.
 */
enum QtopoStatus qtopo_euclidean_distances(const double *points,
                                           uintptr_t n,
                                           uintptr_t dim,
                                           struct QtopoDistanceMatrix **out_matrix);

/*
 Encodes `n` points of dimension `dim` with the named encoding (`angle`,
 `dense-angle`, `amplitude`, `sqrt`, `diagonal`, `iqp`, `utd`, `uts`) and
 returns their pairwise distances under the named quantum metric (`trace`,
 `hs`, `bures`, `bures-angle`, `hellinger`, `wigner-yanase`, `fs`,
 `schatten-<p>`). Pipeline defaults apply to the uniform transform and the
 pre-scale.

 # Safety
 `points` must point to `n * dim` doubles; `encoding` and `metric` must be
 NUL-terminated strings; `out_matrix` must be writable.
 */
enum QtopoStatus qtopo_encoded_distances(const double *points,
                                         uintptr_t n,
                                         uintptr_t dim,
                                         const char *encoding,
                                         const char *metric,
                                         struct QtopoDistanceMatrix **out_matrix);

/*
 Number of points.

 # Safety
 `matrix` must be a live handle or null (null yields 0).
 */
uintptr_t qtopo_distance_matrix_len(const struct QtopoDistanceMatrix *matrix);

/*
 Copies the `n * n` entries into `buffer`.

 # Safety
 `buffer` must have room for `capacity` doubles.
 */
enum QtopoStatus qtopo_distance_matrix_entries(const struct QtopoDistanceMatrix *matrix,
                                               double *buffer,
                                               uintptr_t capacity);

/*
 Releases a distance matrix. Null is ignored.

 # Safety
 `matrix` must come from this library and not be used afterwards.
 */
void qtopo_distance_matrix_free(struct QtopoDistanceMatrix *matrix);

/*
 `max |A - B|` over all entries.

 # Safety
 Both handles must be live; `out_value` must be writable.
 */
enum QtopoStatus qtopo_distortion(const struct QtopoDistanceMatrix *a,
                                  const struct QtopoDistanceMatrix *b,
                                  double *out_value);

/*
 Weight `w >= 0` minimising `max |A - w B|`, and that minimum.

 # Safety
 Both handles must be live; the output pointers must be writable.
 */
enum QtopoStatus qtopo_optimal_weight(const struct QtopoDistanceMatrix *a,
                                      const struct QtopoDistanceMatrix *b,
                                      double *out_weight,
                                      double *out_residual);

/*
 Vietoris-Rips persistence in degrees `0..=max_degree`. `simplex_cap` of
 zero selects the library default.

 # Safety
 `matrix` must be live; `out_diagrams` must be writable.
 */
enum QtopoStatus qtopo_rips_persistence(const struct QtopoDistanceMatrix *matrix,
                                        uintptr_t max_degree,
                                        uintptr_t simplex_cap,
                                        struct QtopoDiagrams **out_diagrams);

/*
 Number of degrees held (`max_degree + 1`).

 # Safety
 `diagrams` must be a live handle or null (null yields 0).
 */
uintptr_t qtopo_diagrams_degrees(const struct QtopoDiagrams *diagrams);

/*
 Number of intervals in one degree.

 # Safety
 `diagrams` must be live; `out_len` must be writable.
 */
enum QtopoStatus qtopo_diagram_len(const struct QtopoDiagrams *diagrams,
                                   uintptr_t degree,
                                   uintptr_t *out_len);

/*
 Copies one degree's intervals. Deaths of classes that never die are
 `+INFINITY`.

 # Safety
 `births` and `deaths` must each have room for `capacity` doubles.
 */
enum QtopoStatus qtopo_diagram_intervals(const struct QtopoDiagrams *diagrams,
                                         uintptr_t degree,
                                         double *births,
                                         double *deaths,
                                         uintptr_t capacity);

/*
 Bottleneck distance between the diagrams of one degree; a degree missing
 on either side counts as empty. May be `+INFINITY`.

 # Safety
 Both handles must be live; `out_value` must be writable.
 */
enum QtopoStatus qtopo_bottleneck(const struct QtopoDiagrams *a,
                                  const struct QtopoDiagrams *b,
                                  uintptr_t degree,
                                  double *out_value);

/*
 Releases diagrams. Null is ignored.

 # Safety
 `diagrams` must come from this library and not be used afterwards.
 */
void qtopo_diagrams_free(struct QtopoDiagrams *diagrams);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTOPO_H */

#ifndef CALAT_H
#define CALAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every `calat_*` call.
 */
typedef enum CalatStatus {
  CALAT_STATUS_OK = 0,
  CALAT_STATUS_NULL_POINTER = 1,
  CALAT_STATUS_INVALID_ARGUMENT = 2,
  CALAT_STATUS_PARSE = 3,
  CALAT_STATUS_VALIDATION = 4,
  CALAT_STATUS_SINGULAR = 5,
  CALAT_STATUS_PANIC = 6,
} CalatStatus;

/**
 * Opaque lattice window with exact rational coordinates.
 */
typedef struct CalatLattice CalatLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *calat_last_error(void);

/**
 * Builds a named example surface over its default window.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CalatStatus calat_example(const char *name, struct CalatLattice **out);

/**
 * Synthesizes a lattice over `[imin,imax] x [jmin,jmax]` from a coefficient set or
 * field given as JSON, starting from the canonical frame.
 *
 * # Safety
 * `coefficients_json` must be a NUL-terminated string; `out` must be writable.
 */
enum CalatStatus calat_synthesize(const char *coefficients_json,
                                  int64_t imin,
                                  int64_t imax,
                                  int64_t jmin,
                                  int64_t jmax,
                                  struct CalatLattice **out);

/**
 * Parses lattice JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CalatStatus calat_lattice_from_json(const char *json, struct CalatLattice **out);

/**
 * Serializes a lattice as JSON with `"p/q"` coordinates.
 *
 * # Safety
 * `lattice` must be a live handle; `out` must be writable.
 */
enum CalatStatus calat_lattice_to_json(const struct CalatLattice *lattice, char **out);

/**
 * Index rectangle of a lattice.
 *
 * # Safety
 * `lattice` must be a live handle; all out-pointers must be writable.
 */
enum CalatStatus calat_lattice_dims(const struct CalatLattice *lattice,
                                    int64_t *imin,
                                    int64_t *imax,
                                    int64_t *jmin,
                                    int64_t *jmax);

/**
 * Coordinates of `r(i,j)` rounded to double precision.
 *
 * # Safety
 * `lattice` must be a live handle; `xyz` must point to 3 writable doubles.
 */
enum CalatStatus calat_lattice_point_f64(const struct CalatLattice *lattice,
                                         int64_t i,
                                         int64_t j,
                                         double *xyz);

/**
 * Checks the surface conditions; `CALAT_STATUS_VALIDATION` lists violations in the error message.
 *
 * # Safety
 * `lattice` must be a live handle.
 */
enum CalatStatus calat_validate(const struct CalatLattice *lattice);

/**
 * Coefficient field JSON of a lattice.
 *
 * # Safety
 * `lattice` must be a live handle; `out` must be writable.
 */
enum CalatStatus calat_extract(const struct CalatLattice *lattice, char **out);

/**
 * Analysis report JSON of a lattice.
 *
 * # Safety
 * `lattice` must be a live handle; `out` must be writable.
 */
enum CalatStatus calat_analyze(const struct CalatLattice *lattice, char **out);

/**
 * OBJ mesh text of a lattice.
 *
 * # Safety
 * `lattice` must be a live handle; `out` must be writable.
 */
enum CalatStatus calat_export_obj(const struct CalatLattice *lattice, char **out);

/**
 * Releases a lattice handle. NULL is ignored.
 *
 * # Safety
 * `lattice` must come from this library and not be used afterwards.
 */
void calat_lattice_free(struct CalatLattice *lattice);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void calat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CALAT_H */

#ifndef STEADY_GLIMM_H
#define STEADY_GLIMM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_UTF8 = 2,
  SG_STATUS_PARSE = 3,
  SG_STATUS_VALIDATION = 4,
  SG_STATUS_SOLVER = 5,
  SG_STATUS_OUT_OF_RANGE = 6,
  SG_STATUS_PANIC = 7,
} SgStatus;

/**
 * Parsed and validated run configuration.
 */
typedef struct SgConfig SgConfig;

/**
 * Result of a 2D march.
 */
typedef struct SgField SgField;

/**
 * One cell of a column.
 */
typedef struct SgCell {
  double y_lo;
  double y_hi;
  double u;
  double v;
  double p;
  double rho;
  double z;
} SgCell;

/**
 * Probed coefficients at the backgrounds with their closed forms.
 */
typedef struct SgProbe {
  double k_b;
  double k_b_closed;
  double k_b5;
  double k_b2;
  double k_b3;
  double k25;
  double k25_closed;
} SgProbe;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sg_last_error(void);

/**
 * Library version string (static).
 */
const char *sg_version(void);

/**
 * Parses and validates TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SgStatus sg_config_parse(const char *text, struct SgConfig **out);

/**
 * # Safety
 * `cfg` must come from [`sg_config_parse`] and not be used afterwards.
 */
void sg_config_free(struct SgConfig *cfg);

/**
 * Overrides the theta seed.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum SgStatus sg_config_set_seed(struct SgConfig *cfg, uint64_t seed);

/**
 * Overrides the step `h`; the configuration is revalidated.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum SgStatus sg_config_set_h(struct SgConfig *cfg, double h);

/**
 * Marches the scheme to `x_max`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum SgStatus sg_run(const struct SgConfig *cfg, struct SgField **out);

/**
 * # Safety
 * `field` must come from [`sg_run`] and not be used afterwards.
 */
void sg_field_free(struct SgField *field);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t sg_field_column_count(const struct SgField *field);

/**
 * Number of cells in column `k`, or 0 when out of range.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t sg_field_cell_count(const struct SgField *field, size_t k);

/**
 * Cell `j` of column `k`, counted from the bottom.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum SgStatus sg_field_cell(const struct SgField *field, size_t k, size_t j, struct SgCell *out);

/**
 * Abscissa and tracked contact ordinate of column `k`.
 *
 * # Safety
 * `field` must be a live handle, `x` and `chi` writable.
 */
enum SgStatus sg_field_contact(const struct SgField *field, size_t k, double *x, double *chi);

/**
 * Sup over columns and components of the averaged field minus the duct model.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum SgStatus sg_field_compare_sup(const struct SgField *field, double *out);

/**
 * Boundary and reflection coefficients at the configured backgrounds.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum SgStatus sg_probe(const struct SgConfig *cfg, struct SgProbe *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEADY_GLIMM_H */

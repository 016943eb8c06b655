/* C interface to the drb computer algebra library. */

#ifndef DRB_H
#define DRB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared with the command-line tool.
 */
typedef enum DrbStatus {
  DRB_STATUS_OK = 0,
  DRB_STATUS_CHECK_FAILED = 1,
  DRB_STATUS_ERROR = 2,
} DrbStatus;

/**
 * Opaque evaluation context: an algebra, a weight mode, and the series
 * truncation order.
 */
typedef struct DrbContext DrbContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message on this thread, or null. Caller frees the
 * string with [`drb_string_free`].
 */
char *drb_last_error(void);

/**
 * The library version as a static string; do not free.
 */
const char *drb_version(void);

/**
 * Frees a string returned by this library. Null is accepted.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void drb_string_free(char *s);

/**
 * Creates an evaluation context. `algebra` is one of `freediff-comm`,
 * `freediff-nc`, `sha`, `forests`, `decorated`, `hurwitz`; `lambda` is
 * `"formal"`, a rational string like `"2"` or `"-1/3"`, or null for
 * formal. Returns null on error.
 *
 * # Safety
 * `algebra` must be a valid nul-terminated string; `lambda` must be null
 * or a valid nul-terminated string.
 */
struct DrbContext *drb_context_new(const char *algebra, const char *lambda, uint32_t order);

/**
 * Releases a context. Null is accepted.
 *
 * # Safety
 * `ctx` must be null or a pointer returned by [`drb_context_new`] and
 * not yet freed.
 */
void drb_context_free(struct DrbContext *ctx);

/**
 * Evaluates an expression in the context. On success writes the
 * canonical text (or JSON when `as_json` is set) to `*out` and returns
 * `DRB_STATUS_OK`; on error returns `DRB_STATUS_ERROR` and leaves `*out`
 * null.
 *
 * # Safety
 * `ctx` must be a live context from [`drb_context_new`], `input` a valid
 * nul-terminated string, and `out` a valid location to write to.
 */
enum DrbStatus drb_eval(const struct DrbContext *ctx, const char *input, bool as_json, char **out);

/**
 * Runs a named identity check (`leibniz`, `rb`, `section`, `hom`) over a
 * named algebra; see the library documentation for the algebra names.
 * `weight` (nullable) specializes the degenerate instance. The report is
 * written to `*out_report` even when the check fails; the status tells
 * the outcome apart.
 *
 * # Safety
 * `identity` and `algebra` must be valid nul-terminated strings;
 * `weight` must be null or a valid nul-terminated string; `out_report`
 * must be a valid location to write to.
 */
enum DrbStatus drb_check(const char *identity,
                         const char *algebra,
                         uint32_t samples,
                         uint64_t seed,
                         uint32_t order,
                         const char *weight,
                         bool as_json,
                         char **out_report);

/**
 * Replays the built-in worked examples. Writes one line per case (or a
 * JSON report) and returns `DRB_STATUS_OK` when everything matches.
 *
 * # Safety
 * `out` must be a valid location to write to.
 */
enum DrbStatus drb_examples(bool as_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRB_H */

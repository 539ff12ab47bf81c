#ifndef OFFLOAD_WEAVER_H
#define OFFLOAD_WEAVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every entry point.
 */
typedef enum OwStatus {
  OW_STATUS_OK = 0,
  OW_STATUS_NULL_ARGUMENT = 1,
  OW_STATUS_INVALID_UTF8 = 2,
  OW_STATUS_INVALID_ARGUMENT = 3,
  OW_STATUS_IO = 4,
  OW_STATUS_PARSE = 5,
  OW_STATUS_DATABASE = 6,
  OW_STATUS_REWRITE = 7,
  OW_STATUS_COST_MODEL = 8,
  OW_STATUS_EXECUTOR = 9,
  OW_STATUS_PANIC = 100,
} OwStatus;

/**
 * A loaded pattern database.
 */
typedef struct OwDb OwDb;

/**
 * A parsed C translation unit.
 */
typedef struct OwModel OwModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ow_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ow_string_free(char *s);

/**
 * Load a pattern database from a JSON file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum OwStatus ow_db_load(const char *path, struct OwDb **out);

/**
 * Build a pattern database from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum OwStatus ow_db_from_json(const char *json, struct OwDb **out);

/**
 * Number of records in the database, or 0 for null.
 *
 * # Safety
 * `db` must be null or a live handle.
 */
size_t ow_db_len(const struct OwDb *db);

/**
 * # Safety
 * `db` must be null or a live handle; it is invalid afterwards.
 */
void ow_db_free(struct OwDb *db);

/**
 * Parse C source text.
 *
 * # Safety
 * `source` must be a nul-terminated string; `out` must be writable.
 */
enum OwStatus ow_model_parse(const char *source, struct OwModel **out);

/**
 * # Safety
 * `model` must be null or a live handle; it is invalid afterwards.
 */
void ow_model_free(struct OwModel *model);

/**
 * Functions, structs, loops, external calls and skipped items as JSON.
 * `db` may be null, in which case every call to an undefined function is
 * listed as external.
 *
 * # Safety
 * `model` must be live, `db` null or live, `out` writable.
 */
enum OwStatus ow_analysis_json(const struct OwModel *model, const struct OwDb *db, char **out);

/**
 * Candidate blocks as a JSON array. Interface mismatches are approved
 * when `approve_mismatches` is true and rejected otherwise.
 *
 * # Safety
 * `model` and `db` must be live, `out` writable.
 */
enum OwStatus ow_candidates_json(const struct OwModel *model,
                                 const struct OwDb *db,
                                 double threshold,
                                 bool approve_mismatches,
                                 char **out);

/**
 * Source text with the blocks of `pattern_id` (for example `"0-2"`, or
 * `"base"` for none) replaced by their accelerator calls.
 *
 * # Safety
 * `model` and `db` must be live, `pattern_id` nul-terminated, `out` writable.
 */
enum OwStatus ow_rewrite(const struct OwModel *model,
                         const struct OwDb *db,
                         double threshold,
                         bool approve_mismatches,
                         const char *pattern_id,
                         char **out);

/**
 * Search offload patterns against a simulated cost model given as JSON.
 * The result is `{"selected": id, "ratio": x, "report": [rows]}`.
 *
 * # Safety
 * `model` and `db` must be live, `cost_model_json` nul-terminated, `out`
 * writable.
 */
enum OwStatus ow_explore_simulated(const struct OwModel *model,
                                   const struct OwDb *db,
                                   double threshold,
                                   bool approve_mismatches,
                                   const char *cost_model_json,
                                   uint64_t seed,
                                   size_t repetitions,
                                   char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OFFLOAD_WEAVER_H */

#ifndef FLATLIN_H
#define FLATLIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlatlinStatus {
  /**
   * Success or a verified candidate.
   */
  FLATLIN_STATUS_OK = 0,
  /**
   * Refuted candidate or a failed check.
   */
  FLATLIN_STATUS_FAILED = 1,
  /**
   * Malformed system text, unknown output or invalid argument.
   */
  FLATLIN_STATUS_INPUT_ERROR = 2,
  FLATLIN_STATUS_INCONCLUSIVE = 3,
  FLATLIN_STATUS_NULL_POINTER = 10,
  FLATLIN_STATUS_INVALID_UTF8 = 11,
  FLATLIN_STATUS_PANIC = 12,
} FlatlinStatus;

/**
 * Opaque parsed system together with its output candidates.
 */
typedef struct FlatlinSystem FlatlinSystem;

typedef struct FlatlinOptions {
  uint64_t seed;
  uint32_t samples;
  double tolerance;
  /**
   * Highest derivative order; 0 selects `2n + 4`.
   */
  uint32_t max_order;
  /**
   * Plan in the file's component order.
   */
  bool keep_order;
} FlatlinOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: seed 0xF1A7, 7 samples, tolerance 1e-8.
 */
struct FlatlinOptions flatlin_options_default(void);

/**
 * Parses a system description. On success `*out` receives a handle to be
 * released with `flatlin_system_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FlatlinStatus flatlin_system_parse(const char *text, struct FlatlinSystem **out);

/**
 * # Safety
 * `sys` must come from `flatlin_system_parse` (or be null) and not be used afterwards.
 */
void flatlin_system_free(struct FlatlinSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle or null (returns 0).
 */
size_t flatlin_system_state_count(const struct FlatlinSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle or null (returns 0).
 */
size_t flatlin_system_input_count(const struct FlatlinSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle or null (returns 0).
 */
size_t flatlin_system_output_count(const struct FlatlinSystem *sys);

/**
 * Runs `command` (`reldeg`, `analyze`, `verify` or `plan`) on the output
 * named `output` (null selects the only one). The JSON report is written
 * to `*out_json`; the status mirrors the command-line exit code.
 *
 * # Safety
 * Pointers must be valid; `output` and `opts` may be null.
 */
enum FlatlinStatus flatlin_run(const struct FlatlinSystem *sys,
                               const char *command,
                               const char *output,
                               const struct FlatlinOptions *opts,
                               char **out_json);

/**
 * Partition test: `partition` lists zero-based component indices and `r`
 * holds one entry per component.
 *
 * # Safety
 * `partition` and `r` must point to `partition_len` and `r_len` elements.
 */
enum FlatlinStatus flatlin_check_partition(const struct FlatlinSystem *sys,
                                           const char *output,
                                           const size_t *partition,
                                           size_t partition_len,
                                           const int64_t *r,
                                           size_t r_len,
                                           const struct FlatlinOptions *opts,
                                           char **out_json);

/**
 * # Safety
 * `s` must come from this library (or be null) and not be used afterwards.
 */
void flatlin_string_free(char *s);

/**
 * Message for the last failing call on this thread, or null. Valid until
 * the next call into the library on the same thread.
 */
const char *flatlin_last_error(void);

const char *flatlin_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLATLIN_H */

#ifndef GROCERY_MEMORY_H
#define GROCERY_MEMORY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_NULL_POINTER = 1,
  GM_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed command, payload or JSON.
   */
  GM_STATUS_BAD_REQUEST = 3,
  /**
   * Unknown context or instance.
   */
  GM_STATUS_NOT_FOUND = 4,
  /**
   * Request valid but not applicable to the current state.
   */
  GM_STATUS_CONFLICT = 5,
  /**
   * Scenario failed validation.
   */
  GM_STATUS_SCENARIO = 6,
  GM_STATUS_IO = 7,
  GM_STATUS_INTERNAL = 8,
  GM_STATUS_PANIC = 9,
} GmStatus;

/**
 * Opaque handle to one live simulation session.
 */
typedef struct GmSession GmSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a session from a scenario JSON document.
 *
 * When `pretrain` is true every context is taught before the call returns.
 *
 * # Safety
 * `scenario_json` must be a nul-terminated string; `out` must be a valid
 * pointer. On success `*out` holds a handle to release with [`gm_session_free`].
 */
enum GmStatus gm_session_new(const char *scenario_json, bool pretrain, struct GmSession **out);

/**
 * Creates a session from one of the bundled experiment scenarios.
 *
 * # Safety
 * Same contract as [`gm_session_new`].
 */
enum GmStatus gm_session_new_bundled(const char *name, bool pretrain, struct GmSession **out);

/**
 * # Safety
 * `session` must be null or a handle from `gm_session_new*` not yet freed.
 */
void gm_session_free(struct GmSession *session);

/**
 * Executes one command (`teach`, `learn`, `visit`, `event`, `report`,
 * `grocery-diff`, `reset`, `state`). `payload_json` may be null for verbs
 * without a payload.
 *
 * On success and on command errors `*out_json` receives a JSON document (the
 * response or an error object) to release with [`gm_string_free`].
 *
 * # Safety
 * `session` must be a live handle; strings must be nul-terminated; `out_json`
 * must be null or writable.
 */
enum GmStatus gm_session_command(struct GmSession *session,
                                 const char *verb,
                                 const char *payload_json,
                                 char **out_json);

/**
 * Writes the session's memory snapshot to `path` atomically.
 *
 * # Safety
 * `session` must be a live handle and `path` a nul-terminated string.
 */
enum GmStatus gm_session_save_state(const struct GmSession *session, const char *path);

/**
 * Runs a scenario end to end and returns the report JSON through `out_json`.
 * The scenario's own seed is used unless `use_seed` is true.
 *
 * # Safety
 * `scenario_json` must be nul-terminated; `out_json` must be writable.
 */
enum GmStatus gm_run_scenario(const char *scenario_json,
                              uint64_t seed,
                              bool use_seed,
                              char **out_json);

/**
 * Message describing the last failure on this thread, or null.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *gm_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void gm_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *gm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROCERY_MEMORY_H */

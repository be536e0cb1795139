#ifndef FEDOSOV_H
#define FEDOSOV_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The first four agree with the exit codes of the
 * command-line tool.
 */
typedef enum FedosovStatus {
  FEDOSOV_STATUS_OK = 0,
  /**
   * A checked identity or a geometric hypothesis failed.
   */
  FEDOSOV_STATUS_CHECK_FAILED = 1,
  /**
   * Malformed input or an unsupported request.
   */
  FEDOSOV_STATUS_INVALID_INPUT = 2,
  /**
   * Internal inconsistency; a bug.
   */
  FEDOSOV_STATUS_INTERNAL = 3,
  FEDOSOV_STATUS_NULL_POINTER = 4,
  FEDOSOV_STATUS_INVALID_UTF8 = 5,
  FEDOSOV_STATUS_PANIC = 6,
} FedosovStatus;

/**
 * Opaque handle: a geometry together with its solved abelian connections.
 */
typedef struct FedosovSession FedosovSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a scenario and solves it to λ-order `order`, or to the order
 * in the scenario when `order` is negative.
 *
 * # Safety
 * `scenario` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FedosovStatus fedosov_session_new(const char *scenario,
                                       int32_t order,
                                       struct FedosovSession **out);

/**
 * # Safety
 * `session` must come from [`fedosov_session_new`] and not be used again.
 */
void fedosov_session_free(struct FedosovSession *session);

/**
 * λ-order of the session.
 *
 * # Safety
 * `session` must be a live handle or null (which gives 0).
 */
uint32_t fedosov_session_order(const struct FedosovSession *session);

/**
 * Runs the residual and flatness checks of the solution;
 * `CheckFailed` if any fails. `report` may be null.
 *
 * # Safety
 * `session` must be a live handle; `report` null or a valid pointer.
 */
enum FedosovStatus fedosov_session_verify(const struct FedosovSession *session, char **report);

/**
 * `f ⋆ g` for function expressions such as `"x1*x2 + lam"`.
 *
 * # Safety
 * `session` must be a live handle, `f`, `g` NUL-terminated, `out` valid.
 */
enum FedosovStatus fedosov_star(const struct FedosovSession *session,
                                const char *f,
                                const char *g,
                                char **out);

/**
 * `A ⋆′ B` for matrices given as JSON arrays of expressions.
 *
 * # Safety
 * As for [`fedosov_star`].
 */
enum FedosovStatus fedosov_star_end(const struct FedosovSession *session,
                                    const char *a,
                                    const char *b,
                                    char **out);

/**
 * `A •′ s • f`; the section is a JSON array of expressions.
 *
 * # Safety
 * As for [`fedosov_star`].
 */
enum FedosovStatus fedosov_act(const struct FedosovSession *session,
                               const char *a,
                               const char *s_json,
                               const char *f,
                               char **out);

/**
 * The Fedosov–Taylor series `τ(f)` in canonical text.
 *
 * # Safety
 * As for [`fedosov_star`].
 */
enum FedosovStatus fedosov_taylor(const struct FedosovSession *session, const char *f, char **out);

/**
 * The deformed metric `h(s, s′)`; needs a Hermitian scenario.
 *
 * # Safety
 * As for [`fedosov_star`].
 */
enum FedosovStatus fedosov_metric(const struct FedosovSession *session,
                                  const char *s1,
                                  const char *s2,
                                  char **out);

/**
 * The constant `c` with `W′ − W = c·λ·R^L` for a line bundle, e.g. `"-i"`.
 * `CheckFailed` when no single constant relates the two curvatures.
 *
 * # Safety
 * `session` must be a live handle and `out` valid.
 */
enum FedosovStatus fedosov_class_factor(const struct FedosovSession *session, char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fedosov_string_free(char *s);

/**
 * Message of the last failed call on this thread; empty after success.
 * Valid until the next call into the library on the same thread.
 */
const char *fedosov_last_error(void);

const char *fedosov_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEDOSOV_H */

#ifndef LRS_H
#define LRS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LrsStatus {
    LRS_STATUS_OK = 0,
    LRS_STATUS_NULL_POINTER = 1,
    // Modulus not prime or out of range, zero dimension, p < 4n in
    // standard mode, or handles over different fields.
    LRS_STATUS_INVALID_PARAMS = 2,
    // A value outside the field, a zero where nonzero is required, or an
    // invalid oracle tuple.
    LRS_STATUS_INVALID_ARGUMENT = 3,
    // Shares of different secrets, or no encoding exists for the secret.
    LRS_STATUS_PRECONDITION = 4,
    LRS_STATUS_RESTART_CAP_EXCEEDED = 5,
    LRS_STATUS_PANIC = 6,
} LrsStatus;

// A pair of shares `(L, R)`.
typedef struct LrsEncoding LrsEncoding;

// Result of one refresh run.
typedef struct LrsRefreshTrace LrsRefreshTrace;

// Both party views, from a refresh or a reconstruction.
typedef struct LrsViews LrsViews;

// Length in bytes of the calling thread's last error message, without the
// terminating NUL. Zero after a successful call.
size_t lrs_last_error_length(void);

// Copies the last error message into `buf` (at most `len - 1` bytes plus a
// NUL) and returns the number of message bytes copied.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t lrs_last_error_message(char *buf, size_t len);

// Builds shares from explicit coordinates; both arrays hold `n` values.
//
// # Safety
// `left` and `right` must point to `n` readable values; `out` must be
// writable.
enum LrsStatus lrs_encoding_new(uint64_t p,
                                size_t n,
                                bool relaxed,
                                const uint64_t *left,
                                const uint64_t *right,
                                struct LrsEncoding **out_encoding);

// Encodes `secret` with randomness derived from `seed`.
//
// # Safety
// `out_encoding` must be writable.
enum LrsStatus lrs_encode(uint64_t p,
                          size_t n,
                          bool relaxed,
                          uint64_t secret,
                          uint64_t seed,
                          struct LrsEncoding **out_encoding);

// # Safety
// `encoding` must be null or a handle not yet freed.
void lrs_encoding_free(struct LrsEncoding *encoding);

// # Safety
// `encoding` must be a live handle; `out_*` must be writable.
enum LrsStatus lrs_encoding_params(const struct LrsEncoding *encoding,
                                   uint64_t *out_p,
                                   size_t *out_n);

// `<L, R>`.
//
// # Safety
// `encoding` must be a live handle; `out_secret` must be writable.
enum LrsStatus lrs_encoding_decode(const struct LrsEncoding *encoding, uint64_t *out_secret);

// Copies `L` into `buf`, which must hold exactly `n` values.
//
// # Safety
// `encoding` must be a live handle; `buf` must point to `len` writable values.
enum LrsStatus lrs_encoding_left(const struct LrsEncoding *encoding, uint64_t *buf, size_t len);

// Copies `R` into `buf`, which must hold exactly `n` values.
//
// # Safety
// As for [`lrs_encoding_left`].
enum LrsStatus lrs_encoding_right(const struct LrsEncoding *encoding, uint64_t *buf, size_t len);

// Refreshes with fresh oracle samples derived from `seed`.
//
// # Safety
// `encoding` must be a live handle; `out_trace` must be writable.
enum LrsStatus lrs_refresh(const struct LrsEncoding *encoding,
                           uint64_t seed,
                           uint32_t restart_cap,
                           struct LrsRefreshTrace **out_trace);

// Refreshes with one given oracle tuple. The tuple is validated; if the
// attempt would restart the call fails with `RestartCapExceeded`.
//
// # Safety
// `encoding` must be a live handle; the four arrays must hold `n` values;
// `out_trace` must be writable.
enum LrsStatus lrs_refresh_forced(const struct LrsEncoding *encoding,
                                  const uint64_t *a,
                                  const uint64_t *a_tilde,
                                  const uint64_t *b,
                                  const uint64_t *b_tilde,
                                  struct LrsRefreshTrace **out_trace);

// # Safety
// `trace` must be null or a handle not yet freed.
void lrs_trace_free(struct LrsRefreshTrace *trace);

// New shares as a fresh handle, owned by the caller.
//
// # Safety
// `trace` must be a live handle; `out_encoding` must be writable.
enum LrsStatus lrs_trace_output(const struct LrsRefreshTrace *trace,
                                struct LrsEncoding **out_encoding);

// # Safety
// `trace` must be a live handle; `out_restarts` must be writable.
enum LrsStatus lrs_trace_restarts(const struct LrsRefreshTrace *trace, uint32_t *out_restarts);

// Field operations of the accepting attempt.
//
// # Safety
// `trace` must be a live handle; the outputs must be writable.
enum LrsStatus lrs_trace_ops(const struct LrsRefreshTrace *trace,
                             uint64_t *out_adds,
                             uint64_t *out_muls,
                             uint64_t *out_invs);

// Both views of the accepting attempt, as a new handle.
//
// # Safety
// `trace` must be a live handle; `out_views` must be writable.
enum LrsStatus lrs_trace_views(const struct LrsRefreshTrace *trace, struct LrsViews **out_views);

// Rebuilds both views from old shares, new shares and `(V, V~)`, which
// hold `n` nonzero values each. Fails with `Precondition` when the two
// share pairs store different secrets.
//
// # Safety
// Handles must be live; `v` and `v_tilde` must hold `n` values;
// `out_views` must be writable.
enum LrsStatus lrs_reconstruct(const struct LrsEncoding *old_encoding,
                               const struct LrsEncoding *new_encoding,
                               const uint64_t *v,
                               const uint64_t *v_tilde,
                               struct LrsViews **out_views);

// Whether the views satisfy every constraint a real run would.
//
// # Safety
// `views` must be a live handle; `out_ok` must be writable.
enum LrsStatus lrs_views_check(const struct LrsViews *views, bool *out_ok);

// # Safety
// `a` and `b` must be live handles; `out_equal` must be writable.
enum LrsStatus lrs_views_equal(const struct LrsViews *a, const struct LrsViews *b, bool *out_equal);

// # Safety
// `views` must be null or a handle not yet freed.
void lrs_views_free(struct LrsViews *views);

#endif  /* LRS_H */

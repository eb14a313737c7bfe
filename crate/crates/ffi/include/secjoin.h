#ifndef SECJOIN_H
#define SECJOIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values match the `secjoin` exit codes.
 */
typedef enum SjStatus {
  SJ_STATUS_OK = 0,
  SJ_STATUS_IO = 1,
  SJ_STATUS_INVALID_ARGUMENT = 2,
  SJ_STATUS_FORMAT = 3,
  SJ_STATUS_PARAM = 4,
  SJ_STATUS_INTERNAL = 5,
} SjStatus;

/**
 * Master secret key with its scheme parameters.
 */
typedef struct SjKey SjKey;

typedef struct SjMatch SjMatch;

/**
 * Plaintext table under construction.
 */
typedef struct SjTable SjTable;

/**
 * A Rust-owned byte buffer. Release with [`sj_bytes_free`].
 */
typedef struct SjBytes {
  uint8_t *data;
  size_t len;
} SjBytes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into this library on the same thread.
 */
const char *sj_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sj_version(void);

/**
 * # Safety
 * `bytes` must come from this library and not have been freed.
 */
void sj_bytes_free(struct SjBytes bytes);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void sj_string_free(char *s);

/**
 * New key for `m` attributes and `IN` lists of up to `t` values. `seed`
 * may be NULL; a non-NULL seed makes the key deterministic and is for
 * tests only.
 *
 * # Safety
 * `seed` is NULL or points to a `uint64_t`; `out` is writable.
 */
enum SjStatus sj_key_generate(size_t m, size_t t, const uint64_t *seed, struct SjKey **out);

/**
 * # Safety
 * `data` points to `len` readable bytes; `out` is writable.
 */
enum SjStatus sj_key_from_bytes(const uint8_t *data, size_t len, struct SjKey **out);

/**
 * Serialized secret key. Keep it on the client.
 *
 * # Safety
 * `key` is a live handle; `out` is writable.
 */
enum SjStatus sj_key_to_bytes(const struct SjKey *key, struct SjBytes *out);

/**
 * Serialized public parameters for the server.
 *
 * # Safety
 * `key` is a live handle; `out` is writable.
 */
enum SjStatus sj_key_public_params(const struct SjKey *key, struct SjBytes *out);

/**
 * Vector dimension `n`, or 0 for a NULL handle.
 *
 * # Safety
 * `key` is NULL or a live handle.
 */
size_t sj_key_dimension(const struct SjKey *key);

/**
 * # Safety
 * `key` is NULL or a handle from this library, not yet freed.
 */
void sj_key_free(struct SjKey *key);

/**
 * Empty table with `m` non-join attributes.
 *
 * # Safety
 * `out` is writable.
 */
enum SjStatus sj_table_new(size_t m, struct SjTable **out);

/**
 * Appends a row. `attrs` holds exactly the table's `m` strings.
 *
 * # Safety
 * `table` is a live handle; `join_value` and each of the `n_attrs`
 * entries of `attrs` are NUL-terminated strings.
 */
enum SjStatus sj_table_push_row(struct SjTable *table,
                                uint64_t row_id,
                                const char *join_value,
                                const char *const *attrs,
                                size_t n_attrs);

/**
 * # Safety
 * `table` is NULL or a live handle.
 */
size_t sj_table_len(const struct SjTable *table);

/**
 * # Safety
 * `table` is NULL or a handle from this library, not yet freed.
 */
void sj_table_free(struct SjTable *table);

/**
 * Encrypts `table`, padding it to the key's `m`, into the encrypted-table
 * format.
 *
 * # Safety
 * `key` and `table` are live handles; `seed` is NULL or readable; `out`
 * is writable.
 */
enum SjStatus sj_encrypt_table(const struct SjKey *key,
                               const struct SjTable *table,
                               const uint64_t *seed,
                               struct SjBytes *out);

/**
 * Token pair for one query. `where_a` and `where_b` are NULL (no
 * selection) or newline-separated specs of the form `attr=I:v1,v2`, with
 * `I` counting from 1.
 *
 * # Safety
 * `key` is a live handle; the strings are NULL or NUL-terminated; `seed`
 * is NULL or readable; `out` is writable.
 */
enum SjStatus sj_token_generate(const struct SjKey *key,
                                uint64_t query_id,
                                const char *where_a,
                                const char *where_b,
                                const uint64_t *seed,
                                struct SjBytes *out);

/**
 * Server side: decrypts both encrypted tables under the token pair and
 * hash-joins the tags.
 *
 * # Safety
 * Each buffer points to its stated number of readable bytes; `out` is
 * writable.
 */
enum SjStatus sj_join(const uint8_t *pp,
                      size_t pp_len,
                      const uint8_t *tokens,
                      size_t tokens_len,
                      const uint8_t *table_a,
                      size_t table_a_len,
                      const uint8_t *table_b,
                      size_t table_b_len,
                      struct SjMatch **out);

/**
 * Number of `(A row, B row)` pairs, sorted ascending.
 *
 * # Safety
 * `m` is NULL or a live handle.
 */
size_t sj_match_pair_count(const struct SjMatch *m);

/**
 * Number of tag groups with two or more rows.
 *
 * # Safety
 * `m` is NULL or a live handle.
 */
size_t sj_match_group_count(const struct SjMatch *m);

/**
 * # Safety
 * `m` is a live handle; `rowid_a` and `rowid_b` are writable.
 */
enum SjStatus sj_match_pair(const struct SjMatch *m,
                            size_t index,
                            uint64_t *rowid_a,
                            uint64_t *rowid_b);

/**
 * The match in the line-oriented text format. Free with
 * [`sj_string_free`].
 *
 * # Safety
 * `m` is a live handle; `out` is writable.
 */
enum SjStatus sj_match_to_text(const struct SjMatch *m, char **out);

/**
 * # Safety
 * `m` is NULL or a handle from this library, not yet freed.
 */
void sj_match_free(struct SjMatch *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECJOIN_H */

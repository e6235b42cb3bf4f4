#ifndef ALGPROOF_H
#define ALGPROOF_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Identity-testing mode.
 */
typedef enum AlgPitMode {
  ALG_PIT_MODE_EXACT = 0,
  ALG_PIT_MODE_RANDOMIZED = 1,
  ALG_PIT_MODE_AUTO = 2,
} AlgPitMode;

/**
 * Result codes.
 */
typedef enum AlgStatus {
  ALG_STATUS_OK = 0,
  /**
   * The input was well formed but the proof or identity does not hold.
   */
  ALG_STATUS_REJECTED = 1,
  ALG_STATUS_NULL_POINTER = 2,
  ALG_STATUS_INVALID_UTF8 = 3,
  ALG_STATUS_PARSE_ERROR = 4,
  ALG_STATUS_INVALID_ARGUMENT = 5,
  ALG_STATUS_INTERNAL = 6,
} AlgStatus;

/**
 * An arithmetic circuit.
 */
typedef struct AlgCircuit AlgCircuit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *algproof_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, freed once.
 */
void algproof_string_free(char *s);

/**
 * Parses a circuit in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AlgStatus algproof_circuit_parse(const char *text, struct AlgCircuit **out);

/**
 * # Safety
 * `c` must be null or a handle from [`algproof_circuit_parse`], freed once.
 */
void algproof_circuit_free(struct AlgCircuit *c);

/**
 * Number of gates.
 *
 * # Safety
 * `c` must be a live circuit handle.
 */
size_t algproof_circuit_size(const struct AlgCircuit *c);

/**
 * Writes the circuit back in the text format.
 *
 * # Safety
 * `c` must be a live circuit handle and `out` a valid pointer.
 */
enum AlgStatus algproof_circuit_serialize(const struct AlgCircuit *c, char **out);

/**
 * Checks whether every negative constant and unprotected variable is
 * guarded by a squaring gate. Returns `Rejected` for non-conic circuits.
 *
 * # Safety
 * `c` must be a live circuit handle; `protected_names` must point to
 * `count` NUL-terminated strings (or be null when `count` is 0).
 */
enum AlgStatus algproof_conic_check(const struct AlgCircuit *c,
                                    const char *const *protected_names,
                                    size_t count);

/**
 * Tests whether two circuits compute the same polynomials. Returns `Ok` when
 * they agree and `Rejected` when they differ.
 *
 * # Safety
 * `a` and `b` must be live circuit handles.
 */
enum AlgStatus algproof_pit_equal(const struct AlgCircuit *a,
                                  const struct AlgCircuit *b,
                                  enum AlgPitMode mode,
                                  uint64_t seed);

/**
 * Verifies a proof file (`ips`, `ipslin`, `qycert`, `cps`, `ps` or `ls`)
 * given as text. `include` lines are not resolved relative to any directory.
 * Returns `Ok` for a valid proof and `Rejected` otherwise.
 *
 * # Safety
 * `text` must be a NUL-terminated string.
 */
enum AlgStatus algproof_verify_text(const char *text, enum AlgPitMode mode, uint64_t seed);

/**
 * The linear-size CPS refutation of `sum 2^(i-1) x_i + M = 0`, as a `cps`
 * file. `m_decimal` is the decimal value of `M >= 1`.
 *
 * # Safety
 * `m_decimal` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AlgStatus algproof_gen_bvp_cps(size_t n, const char *m_decimal, char **out);

/**
 * Library version as a static string.
 */
const char *algproof_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALGPROOF_H */

#ifndef BRANCHDIAM_H
#define BRANCHDIAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success; each error variant of the library has its
 * own code.
 */
typedef enum BdStatus {
  BD_STATUS_OK = 0,
  BD_STATUS_NULL_POINTER = 1,
  BD_STATUS_INVALID_UTF8 = 2,
  BD_STATUS_INVALID_WORD = 3,
  BD_STATUS_INVALID_GROUP = 4,
  BD_STATUS_UNSUPPORTED = 5,
  BD_STATUS_MEMORY_GUARD = 6,
  BD_STATUS_UNDECIDED = 7,
  BD_STATUS_PARTIAL_ENUMERATION = 8,
  BD_STATUS_NON_GENERATING = 9,
  BD_STATUS_INCONSISTENT = 10,
  BD_STATUS_PRECONDITION = 11,
  BD_STATUS_REFUSED = 12,
  BD_STATUS_ITERATION_CAP = 13,
  BD_STATUS_INVALID_REQUEST = 14,
  BD_STATUS_IO = 15,
  BD_STATUS_BUFFER_TOO_SMALL = 16,
  BD_STATUS_PANIC = 17,
} BdStatus;

/**
 * Opaque group handle.
 */
typedef struct BdGroup BdGroup;

/**
 * Opaque handle to an enumerated finite quotient.
 */
typedef struct BdQuotient BdQuotient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (at most `len`
 * bytes including the NUL). Returns the full message length, or 0 if
 * there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t bd_last_error(char *buf, size_t len);

/**
 * Library version as a static string.
 */
const char *bd_version(void);

/**
 * Parses a group spec such as `grigorchuk` or `gupta-sidki:p=3`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum BdStatus bd_group_new(const char *spec, struct BdGroup **out);

/**
 * # Safety
 * `g` must be null or a handle from [`bd_group_new`] not yet freed.
 */
void bd_group_free(struct BdGroup *g);

/**
 * Decides whether `word` is trivial in the group.
 *
 * # Safety
 * Pointers must be valid; `word` NUL-terminated.
 */
enum BdStatus bd_word_is_identity(const struct BdGroup *g, const char *word, bool *out);

/**
 * Enumerates `G/Stab(level)` with the standard generators.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BdStatus bd_quotient_level(const struct BdGroup *g,
                                uint32_t level,
                                size_t max_elements,
                                struct BdQuotient **out);

/**
 * # Safety
 * `q` must be null or a live quotient handle.
 */
void bd_quotient_free(struct BdQuotient *q);

/**
 * # Safety
 * Pointers must be valid.
 */
enum BdStatus bd_quotient_order(const struct BdQuotient *q, uint64_t *out);

/**
 * Diameter for the generators the quotient was built with.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BdStatus bd_quotient_diameter(const struct BdQuotient *q, uint64_t *out);

/**
 * Image of `word` in the quotient, as an element number (0 is the
 * identity).
 *
 * # Safety
 * Pointers must be valid; `word` NUL-terminated.
 */
enum BdStatus bd_quotient_image(const struct BdQuotient *q, const char *word, uint32_t *out);

/**
 * Runs a verification suite (`all`, `relations`, `orders`, ...) and
 * returns the JSON report through `out`. `failed` is set when any claim
 * failed; that is not an error.
 *
 * # Safety
 * Pointers must be valid; `suite` NUL-terminated. Free `*out` with
 * [`bd_string_free`].
 */
enum BdStatus bd_verify(const struct BdGroup *g,
                        const char *suite,
                        uint64_t seed,
                        char **out,
                        bool *failed);

/**
 * Writes the decimal value of `C_p` into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum BdStatus bd_cp(uint32_t p, char *buf, size_t len);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void bd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRANCHDIAM_H */

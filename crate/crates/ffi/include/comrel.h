#ifndef COMREL_H
#define COMREL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ComrelStatus {
  ComrelStatus_Ok = 0,
  /**
   * Invalid input or any error not covered below.
   */
  ComrelStatus_Error = 1,
  /**
   * Word or presentation text failed to parse.
   */
  ComrelStatus_ParseError = 2,
  /**
   * A resource budget was exceeded.
   */
  ComrelStatus_BudgetExceeded = 3,
  /**
   * A required pointer argument was NULL.
   */
  ComrelStatus_NullArgument = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  ComrelStatus_InvalidUtf8 = 5,
  /**
   * An internal invariant failed; this is a bug.
   */
  ComrelStatus_InternalError = 70,
} ComrelStatus;

typedef struct ComrelPresentation ComrelPresentation;

typedef struct ComrelQuotient ComrelQuotient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message from the most recent failing call on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *comrel_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `ptr` must have been returned by a `comrel_*` call and not freed yet.
 */
void comrel_string_free(char *ptr);

/**
 * Parses the presentation file format (`gens:` and `rel:` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_presentation_parse(const char *text, struct ComrelPresentation **out);

/**
 * Loads a shipped fixture by name, e.g. `theorem7` or `hydra-k3`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_presentation_fixture(const char *name, struct ComrelPresentation **out);

/**
 * Renders a presentation back into the file format.
 *
 * # Safety
 * `presentation` must be a live handle; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_presentation_text(const struct ComrelPresentation *presentation,
                                           char **out);

/**
 * # Safety
 * `presentation` must come from this library and not be freed twice.
 */
void comrel_presentation_free(struct ComrelPresentation *presentation);

/**
 * Computes the class-`class` nilpotent quotient. `max_pc_gens` of 0 keeps
 * the default generator budget.
 *
 * # Safety
 * `presentation` must be a live handle; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_quotient_compute(const struct ComrelPresentation *presentation,
                                          uint32_t class_,
                                          uintptr_t max_pc_gens,
                                          struct ComrelQuotient **out);

/**
 * # Safety
 * `quotient` must come from this library and not be freed twice.
 */
void comrel_quotient_free(struct ComrelQuotient *quotient);

/**
 * Nilpotency class of a quotient; 0 for NULL.
 *
 * # Safety
 * `quotient` must be NULL or a live handle.
 */
uint32_t comrel_quotient_class(const struct ComrelQuotient *quotient);

/**
 * Number of pc generators; 0 for NULL.
 *
 * # Safety
 * `quotient` must be NULL or a live handle.
 */
uintptr_t comrel_quotient_num_generators(const struct ComrelQuotient *quotient);

/**
 * Weight of one pc generator.
 *
 * # Safety
 * `quotient` must be a live handle; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_quotient_generator_weight(const struct ComrelQuotient *quotient,
                                                   uintptr_t index,
                                                   uint32_t *out);

/**
 * Relative order of one pc generator as a decimal string, `"0"` meaning
 * infinite.
 *
 * # Safety
 * `quotient` must be a live handle; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_quotient_generator_order(const struct ComrelQuotient *quotient,
                                                  uintptr_t index,
                                                  char **out);

/**
 * Image of a word as a JSON object mapping generator names to exponents.
 *
 * # Safety
 * `quotient` must be a live handle; `word` a NUL-terminated string;
 * `out` a valid pointer.
 */
enum ComrelStatus comrel_quotient_image_json(const struct ComrelQuotient *quotient,
                                             const char *word,
                                             char **out);

/**
 * Exact order of a word's image. Writes `is_finite` and, when finite, the
 * decimal order (`"0"` is written for infinite order).
 *
 * # Safety
 * `quotient` must be a live handle; `word` a NUL-terminated string;
 * `is_finite` and `out` valid pointers.
 */
enum ComrelStatus comrel_quotient_element_order(const struct ComrelQuotient *quotient,
                                                const char *word,
                                                bool *is_finite,
                                                char **out);

/**
 * Lower-central factor structures as a JSON array of
 * `{"weight", "free_rank", "torsion"}` objects.
 *
 * # Safety
 * `quotient` must be a live handle; `out` must be a valid pointer.
 */
enum ComrelStatus comrel_quotient_factors_json(const struct ComrelQuotient *quotient, char **out);

/**
 * True iff two words have the same image in the quotient.
 *
 * # Safety
 * `quotient` must be a live handle; `lhs`, `rhs` NUL-terminated strings;
 * `out` a valid pointer.
 */
enum ComrelStatus comrel_quotient_verify(const struct ComrelQuotient *quotient,
                                         const char *lhs,
                                         const char *rhs,
                                         bool *out);

/**
 * Witt rank of the weight-`n` graded piece for `q` generators, as a
 * decimal string.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ComrelStatus comrel_witt_number(uintptr_t q, uintptr_t n, char **out);

/**
 * Weight, coordinate gcd, and primitivity of a word's leading Lie
 * element, as JSON `{"weight", "gcd", "primitive"}`. `gens` is a
 * comma-separated generator list.
 *
 * # Safety
 * `gens` and `word` must be NUL-terminated strings; `out` a valid pointer.
 */
enum ComrelStatus comrel_labute_json(const char *gens, const char *word, uintptr_t cap, char **out);

/**
 * Normal form in the k-th Hydra group as JSON
 * `{"h", "t_exponent", "trivial"}`.
 *
 * # Safety
 * `word` must be a NUL-terminated string; `out` a valid pointer.
 */
enum ComrelStatus comrel_hydra_normal_form_json(uintptr_t k, const char *word, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMREL_H */

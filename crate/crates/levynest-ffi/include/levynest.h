#ifndef LEVYNEST_H
#define LEVYNEST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum LnStatus {
  LN_OK = 0,
  LN_ERR_NULL_POINTER = 1,
  LN_ERR_INVALID_INPUT = 2,
  LN_ERR_DIMENSION = 3,
  LN_ERR_NON_FINITE = 4,
  LN_ERR_DOMAIN = 5,
  LN_ERR_NOT_REPRESENTABLE = 6,
  LN_ERR_INFINITE_MOMENT = 7,
  LN_ERR_NOT_MEAN_ZERO = 8,
  LN_ERR_NUMERICAL = 9,
  LN_ERR_PARSE = 10,
  LN_ERR_IO = 11,
  LN_ERR_PANIC = 12,
} LnStatus;

/* Opaque triplet handle. */
typedef struct LnTriplet LnTriplet;

/* Parses and validates a triplet from JSON. Free with ln_triplet_free. */
LnStatus ln_triplet_from_json(const char *json, LnTriplet **out);

void ln_triplet_free(LnTriplet *t);

/* Serializes a triplet. Free the string with ln_string_free. */
LnStatus ln_triplet_to_json(const LnTriplet *t, char **out);

LnStatus ln_triplet_dim(const LnTriplet *t, size_t *out);

void ln_string_free(char *s);

/* Log characteristic function at z (len must equal the dimension). */
LnStatus ln_cumulant(const LnTriplet *t, const double *z, size_t len, double *re, double *im);

/* Characteristic function at z. */
LnStatus ln_char_fn(const LnTriplet *t, const double *z, size_t len, double *re, double *im);

/* Applies Phi_alpha. config_json may be NULL for defaults.
 * Returns LN_ERR_DOMAIN when the input lies outside the domain. */
LnStatus ln_apply_phi(const LnTriplet *t, double alpha, const char *config_json, LnTriplet **out);

/* Membership in L<alpha>_m. verdict is 0 or 1; margin is the signed margin. */
LnStatus ln_class_level(const LnTriplet *t,
                        double alpha,
                        uint32_t m,
                        const char *config_json,
                        int32_t *verdict,
                        double *margin);

/* Message of the last failed call on this thread, or NULL. Valid until the next call. */
const char *ln_last_error_message(void);

const char *ln_version(void);

#ifdef __cplusplus
}
#endif

#endif /* LEVYNEST_H */

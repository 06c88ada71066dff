#ifndef KUMMERLAB_H
#define KUMMERLAB_H

/* C interface to the kummerlab core. Every entry point returns a status code;
 * results and diagnostics live behind opaque handles owned by the caller. */

#include <stddef.h>

#if defined(_WIN32)
#define KL_API __declspec(dllexport)
#else
#define KL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kl_status {
  KL_OK = 0,
  KL_NOT_HYPOTHESIS = 2, /* theorem-a: agreement hypothesis fails */
  KL_INCONCLUSIVE = 3,   /* a certificate could not be completed */
  KL_EINVAL = 64,        /* invalid parameters or unmet preconditions */
  KL_EINTERNAL = 70
} kl_status;

typedef struct kl_session kl_session;
typedef struct kl_result kl_result;
typedef struct kl_tower kl_tower;

KL_API const char* kl_version(void);

/* A session caches per-field data (tower plans) across runs. */
KL_API kl_session* kl_session_new(void);
KL_API void kl_session_free(kl_session* s);
/* Worker threads for sweeps; the default comes from KUMMERLAB_THREADS, else 1. */
KL_API int kl_set_threads(kl_session* s, unsigned threads);
/* Message of the last failing call on this session, "" if none. */
KL_API const char* kl_last_error(const kl_session* s);

/* Runs one command described by a JSON configuration, e.g.
 *   {"command": "lemma 44", "m": 4, "alpha": "1+z", "p": 2, "r": 2, "q": 3}
 * *out receives the report (also on failure, as an error document).
 * Returns the command's exit code. */
KL_API int kl_run(kl_session* s, const char* config_json, kl_result** out);
KL_API const char* kl_result_text(const kl_result* r);
KL_API size_t kl_result_size(const kl_result* r);
KL_API int kl_result_code(const kl_result* r);
KL_API void kl_result_free(kl_result* r);

/* Nested Kummer chain over Q(zeta_m) with datum alpha (a polynomial in z). */
KL_API int kl_tower_new(kl_session* s, unsigned long m, const char* alpha, unsigned long p, unsigned r,
                        kl_tower** out);
KL_API void kl_tower_free(kl_tower* t);
KL_API unsigned kl_tower_levels(const kl_tower* t);
/* Norm sequence Nv_0, ..., Nv_r above the first prime over q that is inert at
 * step 1. Writes up to cap values; *count receives r + 1. Norms beyond 64 bits
 * give KL_EINVAL. */
KL_API int kl_tower_norms(kl_session* s, const kl_tower* t, unsigned long q, unsigned long long* norms, size_t cap,
                          size_t* count);

#ifdef __cplusplus
}
#endif

#endif

// Copyright 2026 The primesym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the primesym library. Every function returns a
 * primesym_status; on failure primesym_last_error() describes the cause.
 * Strings returned through char** are owned by the caller and released
 * with primesym_string_free. */
#ifndef PRIMESYM_PRIMESYM_H_
#define PRIMESYM_PRIMESYM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PRIMESYM_API __declspec(dllexport)
#else
#define PRIMESYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum primesym_status {
  PRIMESYM_OK = 0,
  PRIMESYM_VERIFICATION_FAILED = 1,
  PRIMESYM_INVALID_ARGUMENT = 2,
  PRIMESYM_BOUND_EXCEEDED = 3,
  PRIMESYM_INTERRUPTED = 4,
  PRIMESYM_INTERNAL = 5
} primesym_status;

typedef struct primesym_context primesym_context;
typedef struct primesym_admissible primesym_admissible;
typedef struct primesym_certificate primesym_certificate;

PRIMESYM_API const char* primesym_version(void);
/* Message for the last failing call on this thread; never NULL. */
PRIMESYM_API const char* primesym_last_error(void);
PRIMESYM_API void primesym_string_free(char* s);

/* ---- context: prime index cache, worker count, interrupt flag ---- */

typedef struct primesym_context_options {
  uint64_t max_value;     /* 0: library default (2^40) */
  uint64_t stride;        /* checkpoint stride of the prime index, 0: default */
  const char* cache_path; /* NULL or "": no on-disk cache */
  unsigned workers;       /* 0: 1 */
} primesym_context_options;

PRIMESYM_API primesym_status primesym_context_new(const primesym_context_options* options,
                                                  primesym_context** out);
PRIMESYM_API void primesym_context_free(primesym_context* ctx);
/* Async-signal-safe; long operations stop at the next batch boundary. */
PRIMESYM_API void primesym_context_interrupt(primesym_context* ctx);
PRIMESYM_API void primesym_context_clear_interrupt(primesym_context* ctx);

/* ---- arithmetic ---- */

PRIMESYM_API primesym_status primesym_is_prime(uint64_t n, int* out);
PRIMESYM_API primesym_status primesym_jacobi(int64_t a, uint64_t n, int* out);
/* Decimal strings of any size. */
PRIMESYM_API primesym_status primesym_jacobi_str(const char* a, const char* n, int* out);
PRIMESYM_API primesym_status primesym_is_primitive_root(int64_t g, uint64_t p, int* out);

/* ---- primes ---- */

PRIMESYM_API primesym_status primesym_nth_prime(primesym_context* ctx, uint64_t n, uint64_t* out);
PRIMESYM_API primesym_status primesym_prime_index(primesym_context* ctx, uint64_t p, uint64_t* out);
/* Writes p_n, ..., p_{n+m} into primes_out (m + 1 slots). */
PRIMESYM_API primesym_status primesym_window(primesym_context* ctx, uint64_t n, unsigned m,
                                             uint64_t* primes_out);
/* count x count row-major matrix of jacobi(p_i, p_j), zero diagonal. */
PRIMESYM_API primesym_status primesym_symbol_matrix(const uint64_t* primes, size_t count, int* out);

/* ---- window search ---- */

typedef struct primesym_search_params {
  unsigned m;
  const char* pattern;     /* "++", "--", "-+", "+-", "primroot" or "matrix" */
  const char* matrix_json; /* pattern "matrix" only */
  int strict;              /* also require an exact large witness per pair */
  uint64_t n_min;          /* 0: 2 */
  uint64_t n_max;          /* 0: unbounded */
  uint64_t limit;          /* 0: unlimited */
  unsigned workers;        /* 0: context default */
  const char* checkpoint_path;
} primesym_search_params;

typedef struct primesym_match {
  uint64_t n;
  const uint64_t* primes;
  size_t count;
  const char* json; /* one JSON line */
  const char* csv;  /* one CSV line */
} primesym_match;

/* Return nonzero to continue, zero to stop. */
typedef int (*primesym_match_fn)(void* user, const primesym_match* match);
typedef void (*primesym_progress_fn)(void* user, uint64_t current, uint64_t found, double rate);

typedef struct primesym_search_summary {
  uint64_t matches;
  uint64_t last_n;
  int interrupted;
  int resumed;
  int exhausted;
} primesym_search_summary;

PRIMESYM_API primesym_status primesym_csv_header(unsigned m, char** out);
/* Interrupted searches return PRIMESYM_INTERRUPTED after saving the checkpoint. */
PRIMESYM_API primesym_status primesym_search(primesym_context* ctx, const primesym_search_params* params,
                                             primesym_match_fn on_match, primesym_progress_fn on_progress,
                                             void* user, primesym_search_summary* summary);

/* ---- admissible sets ---- */

/* variant: "lemma22" (threshold 2k) or "lemma31" (threshold 4k).
 * crt_prime_bound 0 selects the default. */
PRIMESYM_API primesym_status primesym_admissible_build(unsigned k, const char* variant,
                                                       uint64_t crt_prime_bound,
                                                       primesym_admissible** out);
PRIMESYM_API primesym_status primesym_admissible_from_json(const char* json, primesym_admissible** out);
PRIMESYM_API primesym_status primesym_admissible_to_json(const primesym_admissible* set, char** out);
/* Report JSON in *report; PRIMESYM_VERIFICATION_FAILED when any check fails. */
PRIMESYM_API primesym_status primesym_admissible_verify(const primesym_admissible* set, char** report);
PRIMESYM_API size_t primesym_admissible_size(const primesym_admissible* set);
PRIMESYM_API primesym_status primesym_admissible_element(const primesym_admissible* set, size_t i,
                                                         char** decimal);
PRIMESYM_API primesym_status primesym_is_admissible(const char* const* decimals, size_t count, int* out);
PRIMESYM_API void primesym_admissible_free(primesym_admissible* set);

/* ---- progression certificates ---- */

/* variant: "thm13" or "lemma32". max_w 0 selects the default cap. */
PRIMESYM_API primesym_status primesym_minimal_w(const primesym_admissible* set, const char* variant,
                                                uint64_t max_w, uint64_t* out);
/* w = 0 selects the minimal feasible w. m, d1, d2 are ignored for lemma32. */
PRIMESYM_API primesym_status primesym_certificate_build(const primesym_admissible* set, const char* variant,
                                                        unsigned m, int d1, int d2, uint64_t w,
                                                        uint64_t max_w, primesym_certificate** out);
PRIMESYM_API primesym_status primesym_certificate_from_json(const char* json, primesym_certificate** out);
PRIMESYM_API primesym_status primesym_certificate_to_json(const primesym_certificate* cert, char** out);
/* Short JSON description: variant, w, sizes of W and b, table sizes. */
PRIMESYM_API primesym_status primesym_certificate_summary(const primesym_certificate* cert, char** out);
PRIMESYM_API primesym_status primesym_certificate_verify(const primesym_certificate* cert, char** report);
PRIMESYM_API void primesym_certificate_free(primesym_certificate* cert);

typedef struct primesym_scan_params {
  uint64_t n_min;  /* 0: 1 */
  uint64_t n_max;
  uint64_t max_hits; /* 0: unlimited */
  int test_primality;
  unsigned workers; /* 0: context default */
  const char* checkpoint_path;
} primesym_scan_params;

typedef struct primesym_scan_summary {
  uint64_t n_first;
  uint64_t n_last;
  uint64_t scanned;
  uint64_t hits;
  uint64_t probable_hits;
  uint64_t symbol_violations;
  uint64_t covering_checks;
  uint64_t covering_violations;
  uint64_t class_violations;
  int interrupted;
  int resumed;
} primesym_scan_summary;

/* hit_json is one JSON line; return zero to stop. */
typedef int (*primesym_hit_fn)(void* user, uint64_t n, int ok, const char* hit_json);

/* PRIMESYM_VERIFICATION_FAILED when any symbol, covering or class check
 * failed; PRIMESYM_INTERRUPTED when stopped through the context. */
PRIMESYM_API primesym_status primesym_certificate_scan(primesym_context* ctx, const primesym_certificate* cert,
                                                       const primesym_scan_params* params,
                                                       primesym_hit_fn on_hit, primesym_progress_fn on_progress,
                                                       void* user, primesym_scan_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* PRIMESYM_PRIMESYM_H_ */

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

#include "primesym/primesym.h"

#include <atomic>
#include <chrono>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "json.hpp"
#include "primesym/admissible.hpp"
#include "primesym/certificate.hpp"
#include "primesym/error.hpp"
#include "primesym/pattern.hpp"
#include "primesym/primes.hpp"
#include "primesym/primroot.hpp"

struct primesym_context {
  std::unique_ptr<primesym::PrimeIndexer> indexer;
  unsigned workers = 1;
  std::atomic<bool> stop{false};
};

struct primesym_admissible {
  primesym::AdmissibleSet set;
};

struct primesym_certificate {
  primesym::Certificate cert;
};

namespace {

thread_local std::string g_last_error;

primesym_status to_status(primesym::ErrorCode code) {
  switch (code) {
    case primesym::ErrorCode::kVerificationFailed: return PRIMESYM_VERIFICATION_FAILED;
    case primesym::ErrorCode::kInvalidArgument: return PRIMESYM_INVALID_ARGUMENT;
    case primesym::ErrorCode::kBoundExceeded: return PRIMESYM_BOUND_EXCEEDED;
    case primesym::ErrorCode::kInterrupted: return PRIMESYM_INTERRUPTED;
    case primesym::ErrorCode::kInternal: return PRIMESYM_INTERNAL;
  }
  return PRIMESYM_INTERNAL;
}

primesym_status fail(primesym_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
primesym_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const primesym::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PRIMESYM_BOUND_EXCEEDED, "out of memory");
  } catch (const std::exception& e) {
    return fail(PRIMESYM_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define REQUIRE(cond, msg) \
  if (!(cond)) return fail(PRIMESYM_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* primesym_version(void) { return "1.0.0"; }

const char* primesym_last_error(void) { return g_last_error.c_str(); }

void primesym_string_free(char* s) { std::free(s); }

primesym_status primesym_context_new(const primesym_context_options* options, primesym_context** out) {
  REQUIRE(out, "context_new: out is NULL");
  return guarded([&] {
    primesym::IndexerConfig cfg;
    unsigned workers = 1;
    if (options) {
      if (options->max_value) cfg.max_value = options->max_value;
      if (options->stride) cfg.stride = options->stride;
      if (options->cache_path) cfg.cache_path = options->cache_path;
      if (options->workers) workers = options->workers;
    }
    cfg.workers = workers;
    auto ctx = std::make_unique<primesym_context>();
    ctx->indexer = std::make_unique<primesym::PrimeIndexer>(cfg);
    ctx->workers = workers;
    *out = ctx.release();
    return PRIMESYM_OK;
  });
}

void primesym_context_free(primesym_context* ctx) { delete ctx; }

void primesym_context_interrupt(primesym_context* ctx) {
  if (ctx) ctx->stop.store(true);
}

void primesym_context_clear_interrupt(primesym_context* ctx) {
  if (ctx) ctx->stop.store(false);
}

primesym_status primesym_is_prime(uint64_t n, int* out) {
  REQUIRE(out, "is_prime: out is NULL");
  *out = primesym::is_prime_64(n) ? 1 : 0;
  return PRIMESYM_OK;
}

primesym_status primesym_jacobi(int64_t a, uint64_t n, int* out) {
  REQUIRE(out, "jacobi: out is NULL");
  return guarded([&] {
    *out = primesym::jacobi(a, n);
    return PRIMESYM_OK;
  });
}

primesym_status primesym_jacobi_str(const char* a, const char* n, int* out) {
  REQUIRE(a && n && out, "jacobi_str: NULL argument");
  return guarded([&] {
    *out = primesym::jacobi(primesym::big_from_string(a), primesym::big_from_string(n));
    return PRIMESYM_OK;
  });
}

primesym_status primesym_is_primitive_root(int64_t g, uint64_t p, int* out) {
  REQUIRE(out, "is_primitive_root: out is NULL");
  return guarded([&] {
    *out = primesym::is_primitive_root(g, p) ? 1 : 0;
    return PRIMESYM_OK;
  });
}

primesym_status primesym_nth_prime(primesym_context* ctx, uint64_t n, uint64_t* out) {
  REQUIRE(ctx && out, "nth_prime: NULL argument");
  return guarded([&] {
    *out = ctx->indexer->nth_prime(n);
    return PRIMESYM_OK;
  });
}

primesym_status primesym_prime_index(primesym_context* ctx, uint64_t p, uint64_t* out) {
  REQUIRE(ctx && out, "prime_index: NULL argument");
  return guarded([&] {
    *out = ctx->indexer->index_of_prime(p);
    return PRIMESYM_OK;
  });
}

primesym_status primesym_window(primesym_context* ctx, uint64_t n, unsigned m, uint64_t* primes_out) {
  REQUIRE(ctx && primes_out, "window: NULL argument");
  return guarded([&] {
    auto w = ctx->indexer->window(n, m);
    std::copy(w.primes.begin(), w.primes.end(), primes_out);
    return PRIMESYM_OK;
  });
}

primesym_status primesym_symbol_matrix(const uint64_t* primes, size_t count, int* out) {
  REQUIRE(primes && out && count >= 1, "symbol_matrix: bad argument");
  return guarded([&] {
    primesym::PrimeWindow w{0, std::vector<uint64_t>(primes, primes + count)};
    auto mat = primesym::symbol_matrix(w);
    for (size_t i = 0; i < count; ++i) {
      for (size_t j = 0; j < count; ++j) out[i * count + j] = mat[i][j];
    }
    return PRIMESYM_OK;
  });
}

primesym_status primesym_csv_header(unsigned m, char** out) {
  REQUIRE(out, "csv_header: out is NULL");
  return guarded([&] {
    *out = dup_string(primesym::csv_header(m));
    return PRIMESYM_OK;
  });
}

primesym_status primesym_search(primesym_context* ctx, const primesym_search_params* params,
                                primesym_match_fn on_match, primesym_progress_fn on_progress, void* user,
                                primesym_search_summary* summary) {
  REQUIRE(ctx && params && params->pattern, "search: NULL argument");
  return guarded([&] {
    std::string spec = params->pattern;
    std::string matrix = params->matrix_json ? params->matrix_json : "";
    if (spec == "matrix") {
      if (matrix.empty()) primesym::throw_invalid("search: pattern 'matrix' needs matrix_json");
      spec = "matrix:";
    }
    primesym::Predicate pred = primesym::Predicate::parse(spec, params->m, params->strict != 0, matrix);
    primesym::SearchOptions opt;
    opt.n_min = params->n_min ? params->n_min : 2;
    if (params->n_max) opt.n_max = params->n_max;
    opt.limit = params->limit;
    opt.workers = params->workers ? params->workers : ctx->workers;
    if (params->checkpoint_path) opt.checkpoint_path = params->checkpoint_path;
    opt.stop = &ctx->stop;
    if (on_progress) {
      opt.progress = [&](const primesym::SearchProgress& p) {
        on_progress(user, p.current_n, p.matches, p.windows_per_second);
      };
    }
    auto res = primesym::find_matches(*ctx->indexer, pred, opt, [&](const primesym::MatchRecord& r) {
      if (!on_match) return true;
      std::string js = primesym::to_json(r, pred);
      std::string csv = primesym::to_csv(r);
      primesym_match m{r.n, r.primes.data(), r.primes.size(), js.c_str(), csv.c_str()};
      return on_match(user, &m) != 0;
    });
    if (summary) {
      *summary = {res.matches, res.last_n, res.interrupted ? 1 : 0, res.resumed ? 1 : 0, res.exhausted ? 1 : 0};
    }
    if (res.interrupted) return fail(PRIMESYM_INTERRUPTED, "search interrupted; checkpoint saved");
    return PRIMESYM_OK;
  });
}

primesym_status primesym_admissible_build(unsigned k, const char* variant, uint64_t crt_prime_bound,
                                          primesym_admissible** out) {
  REQUIRE(variant && out, "admissible_build: NULL argument");
  return guarded([&] {
    primesym::AdmissibleBuildOptions opt;
    if (crt_prime_bound) opt.crt_prime_bound = crt_prime_bound;
    auto set = primesym::build_admissible(k, primesym::parse_admissible_variant(variant), opt);
    *out = new primesym_admissible{std::move(set)};
    return PRIMESYM_OK;
  });
}

primesym_status primesym_admissible_from_json(const char* json, primesym_admissible** out) {
  REQUIRE(json && out, "admissible_from_json: NULL argument");
  return guarded([&] {
    *out = new primesym_admissible{primesym::admissible_from_json(json)};
    return PRIMESYM_OK;
  });
}

primesym_status primesym_admissible_to_json(const primesym_admissible* set, char** out) {
  REQUIRE(set && out, "admissible_to_json: NULL argument");
  return guarded([&] {
    *out = dup_string(primesym::to_json(set->set));
    return PRIMESYM_OK;
  });
}

primesym_status primesym_admissible_verify(const primesym_admissible* set, char** report) {
  REQUIRE(set, "admissible_verify: NULL argument");
  return guarded([&] {
    auto r = primesym::verify_properties(set->set);
    if (report) *report = dup_string(r.to_json());
    if (!r.passed()) {
      return fail(PRIMESYM_VERIFICATION_FAILED, r.first_failure()->name + ": " + r.first_failure()->detail);
    }
    return PRIMESYM_OK;
  });
}

size_t primesym_admissible_size(const primesym_admissible* set) { return set ? set->set.h.size() : 0; }

primesym_status primesym_admissible_element(const primesym_admissible* set, size_t i, char** decimal) {
  REQUIRE(set && decimal, "admissible_element: NULL argument");
  REQUIRE(i < set->set.h.size(), "admissible_element: index out of range");
  return guarded([&] {
    *decimal = dup_string(set->set.h[i].get_str());
    return PRIMESYM_OK;
  });
}

primesym_status primesym_is_admissible(const char* const* decimals, size_t count, int* out) {
  REQUIRE(out && (decimals || count == 0), "is_admissible: NULL argument");
  return guarded([&] {
    std::vector<primesym::BigInt> h;
    for (size_t i = 0; i < count; ++i) h.push_back(primesym::big_from_string(decimals[i]));
    *out = primesym::is_admissible(h) ? 1 : 0;
    return PRIMESYM_OK;
  });
}

void primesym_admissible_free(primesym_admissible* set) { delete set; }

primesym_status primesym_minimal_w(const primesym_admissible* set, const char* variant, uint64_t max_w,
                                   uint64_t* out) {
  REQUIRE(set && variant && out, "minimal_w: NULL argument");
  return guarded([&] {
    primesym::CertificateOptions def;
    *out = primesym::minimal_w(set->set, primesym::parse_cert_variant(variant), max_w ? max_w : def.max_w);
    return PRIMESYM_OK;
  });
}

primesym_status primesym_certificate_build(const primesym_admissible* set, const char* variant, unsigned m,
                                           int d1, int d2, uint64_t w, uint64_t max_w,
                                           primesym_certificate** out) {
  REQUIRE(set && variant && out, "certificate_build: NULL argument");
  return guarded([&] {
    primesym::CertificateOptions opt;
    opt.w = w;
    if (max_w) opt.max_w = max_w;
    auto cert = primesym::build_certificate(set->set, primesym::parse_cert_variant(variant), m, d1, d2, opt);
    *out = new primesym_certificate{std::move(cert)};
    return PRIMESYM_OK;
  });
}

primesym_status primesym_certificate_from_json(const char* json, primesym_certificate** out) {
  REQUIRE(json && out, "certificate_from_json: NULL argument");
  return guarded([&] {
    *out = new primesym_certificate{primesym::certificate_from_json(json)};
    return PRIMESYM_OK;
  });
}

primesym_status primesym_certificate_to_json(const primesym_certificate* cert, char** out) {
  REQUIRE(cert && out, "certificate_to_json: NULL argument");
  return guarded([&] {
    *out = dup_string(primesym::to_json(cert->cert));
    return PRIMESYM_OK;
  });
}

primesym_status primesym_certificate_summary(const primesym_certificate* cert, char** out) {
  REQUIRE(cert && out, "certificate_summary: NULL argument");
  return guarded([&] {
    const auto& c = cert->cert;
    nlohmann::json j = {{"variant", primesym::to_string(c.variant)},
                        {"k", c.h.size()},
                        {"w", c.w},
                        {"W_bits", mpz_sizeinbase(c.W.get_mpz_t(), 2)},
                        {"b_digits", c.b.get_str().size()},
                        {"gap_set", c.cover.size()},
                        {"rp", c.rp.size()},
                        {"rq", c.rq.size()}};
    if (c.variant == primesym::CertVariant::kThm13) {
      j["m"] = c.m;
      j["d1"] = c.d1;
      j["d2"] = c.d2;
    }
    *out = dup_string(j.dump());
    return PRIMESYM_OK;
  });
}

primesym_status primesym_certificate_verify(const primesym_certificate* cert, char** report) {
  REQUIRE(cert, "certificate_verify: NULL argument");
  return guarded([&] {
    auto r = primesym::verify_certificate(cert->cert);
    if (report) *report = dup_string(r.to_json());
    if (!r.passed()) {
      return fail(PRIMESYM_VERIFICATION_FAILED, r.first_failure()->name + ": " + r.first_failure()->detail);
    }
    return PRIMESYM_OK;
  });
}

void primesym_certificate_free(primesym_certificate* cert) { delete cert; }

primesym_status primesym_certificate_scan(primesym_context* ctx, const primesym_certificate* cert,
                                          const primesym_scan_params* params, primesym_hit_fn on_hit,
                                          primesym_progress_fn on_progress, void* user,
                                          primesym_scan_summary* summary) {
  REQUIRE(ctx && cert && params, "certificate_scan: NULL argument");
  return guarded([&] {
    primesym::ScanOptions opt;
    opt.n_min = params->n_min ? params->n_min : 1;
    opt.n_max = params->n_max;
    opt.max_hits = params->max_hits;
    opt.test_primality = params->test_primality != 0;
    opt.workers = params->workers ? params->workers : ctx->workers;
    if (params->checkpoint_path) opt.checkpoint_path = params->checkpoint_path;
    opt.stop = &ctx->stop;
    auto t0 = std::chrono::steady_clock::now();
    if (on_progress) {
      opt.progress = [&](uint64_t n, uint64_t hits) {
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double rate = dt > 0 ? static_cast<double>(n + 1 - opt.n_min) / dt : 0;
        on_progress(user, n, hits, rate);
      };
    }
    auto st = primesym::scan_progression(cert->cert, opt, [&](const primesym::ScanHit& hit) {
      if (!on_hit) return true;
      std::string js = primesym::to_json(hit);
      return on_hit(user, hit.n, hit.ok() ? 1 : 0, js.c_str()) != 0;
    });
    if (summary) {
      *summary = {st.n_first, st.n_last, st.scanned, st.hits, st.probable_hits, st.symbol_violations,
                  st.covering_checks, st.covering_violations, st.class_violations,
                  st.interrupted ? 1 : 0, st.resumed ? 1 : 0};
    }
    if (st.interrupted) return fail(PRIMESYM_INTERRUPTED, "scan interrupted; checkpoint saved");
    if (st.symbol_violations || st.covering_violations || st.class_violations) {
      return fail(PRIMESYM_VERIFICATION_FAILED, "scan found violations of the predicted structure");
    }
    return PRIMESYM_OK;
  });
}

}  // extern "C"

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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "primesym/admissible.hpp"
#include "primesym/arith.hpp"
#include "primesym/report.hpp"

namespace primesym {

// thm13: prescribed (d1, d2) symbols inside the progression.
// lemma32: every (h_i - h_j / b + h_j) equals -1, b == 17 (mod 24).
enum class CertVariant { kThm13, kLemma32 };

std::string to_string(CertVariant v);
CertVariant parse_cert_variant(const std::string& s);
// The admissible-set variant each certificate variant is built on.
AdmissibleVariant required_admissible_variant(CertVariant v);

// Smallest r in [1, p) avoiding every h_i - h_s (and h_i - h_s + 1 for
// lemma32) mod p, with (r delta / p) = target (thm13) or (r / p) = target.
uint64_t choose_rp(uint64_t p, unsigned i, unsigned j, std::span<const uint64_t> h, int target,
                   CertVariant mode, int delta = 1);

// Symbol r_p must carry at the witness prime of a pair whose difference is
// `diff` so that (h_i - h_j / b + h_j) = -1.
int lemma32_target(uint64_t diff);
// The printed form -(3/p)^ord3(diff); kept for comparison only.
int lemma32_paper_target(uint64_t p, uint64_t diff);

struct RpEntry {
  uint64_t p = 0;
  IndexPair pair{0, 0};
  bool witness = false;  // p is the pair's exact witness prime
  int target = 1;
  uint64_t r = 0;
  uint64_t residue = 0;  // b mod p, i.e. r - h_i
};

struct CoverEntry {
  uint64_t a = 0;
  uint64_t q = 0;  // b == -a (mod q)
};

struct QEntry {
  uint64_t q = 0;
  uint64_t r = 0;  // b == r (mod q)
};

struct Certificate {
  CertVariant variant = CertVariant::kThm13;
  AdmissibleSet H;
  std::vector<uint64_t> h;
  unsigned m = 1;
  int d1 = 1, d2 = 1, delta = 1;  // thm13 only
  uint64_t w = 0;
  BigInt K;                                               // modulus of condition (1)
  std::vector<std::pair<uint64_t, uint64_t>> small_residues;  // lemma32: (p, 4), p in [5, 4k]
  std::vector<RpEntry> rp;
  std::vector<CoverEntry> cover;           // gap set S with covering primes
  std::vector<uint64_t> cover_by_four;     // lemma32: offsets h_s - 1
  std::vector<QEntry> rq;
  BigInt system_modulus;                   // product of all congruence moduli
  BigInt W;
  BigInt b;

  CongruenceSystem system() const;
};

struct CertificateOptions {
  uint64_t w = 0;  // 0 selects the minimal feasible w
  uint64_t max_w = uint64_t{1} << 21;
};

// Gap offsets that need a covering prime.
std::vector<uint64_t> gap_set(std::span<const uint64_t> h, CertVariant v);
// Smallest w such that (h_k, w] holds |S| primes.
uint64_t minimal_w(const AdmissibleSet& H, CertVariant v, uint64_t max_w = uint64_t{1} << 21);

Certificate build_certificate(const AdmissibleSet& H, CertVariant v, unsigned m, int d1, int d2,
                              const CertificateOptions& options = {});

Report verify_certificate(const Certificate& cert);

std::string to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Progression scan over W n + b + h_s.

struct ScanEntry {
  unsigned s = 0;
  BigInt value;
  bool prime = false;
  bool probable = false;  // primality from a probabilistic test above 2^64
};

struct ScanPair {
  unsigned s = 0, t = 0;  // s < t
  int predicted_st = 0, predicted_ts = 0;
  int observed_st = 0, observed_ts = 0;
  bool ok() const { return predicted_st == observed_st && predicted_ts == observed_ts; }
};

struct ScanHit {
  uint64_t n = 0;
  std::vector<ScanEntry> entries;
  std::vector<unsigned> window;  // indices s of the prime entries, consecutive primes
  std::vector<ScanPair> pairs;
  bool probable = false;
  bool ok() const;
};

std::string to_json(const ScanHit& hit);

struct ScanOptions {
  uint64_t n_min = 1;
  uint64_t n_max = 1'000'000;
  uint64_t max_hits = 0;  // 0 = no limit
  bool test_primality = true;
  unsigned workers = 1;
  uint64_t batch = uint64_t{1} << 14;
  uint32_t sieve_limit = uint32_t{1} << 20;  // prefilter primes in (w, sieve_limit]
  std::string checkpoint_path;
  const std::atomic<bool>* stop = nullptr;
  std::function<void(uint64_t n, uint64_t hits)> progress;
};

struct ScanStats {
  uint64_t n_first = 0;
  uint64_t n_last = 0;  // last n fully scanned, n_first - 1 if none
  uint64_t scanned = 0;
  uint64_t hits = 0;
  uint64_t probable_hits = 0;
  uint64_t symbol_violations = 0;
  uint64_t covering_checks = 0;
  uint64_t covering_violations = 0;
  uint64_t class_violations = 0;  // W n + b + h_s outside the predicted class mod 8
  bool interrupted = false;
  bool resumed = false;
};

// Sink returns false to stop early.
ScanStats scan_progression(const Certificate& cert, const ScanOptions& options,
                           const std::function<bool(const ScanHit&)>& sink);

}  // namespace primesym

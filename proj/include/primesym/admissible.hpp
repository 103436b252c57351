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

// Admissible sets {h_1 = 0 < h_2 < ... < h_k} of multiples of
// K = 4 * prod_{p < threshold} p in which every pairwise difference has its
// own exact prime divisor above the threshold and no prime above the
// threshold divides two different differences.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "primesym/arith.hpp"
#include "primesym/primroot.hpp"
#include "primesym/report.hpp"

namespace primesym {

// Threshold multiplier: 2k for the base construction, 4k for the variant
// feeding the primitive-root certificate.
enum class AdmissibleVariant { kLemma22, kLemma31 };

std::string to_string(AdmissibleVariant v);
AdmissibleVariant parse_admissible_variant(const std::string& s);

uint64_t admissible_threshold(unsigned k, AdmissibleVariant v);
// 4 * prod_{p < threshold} p
BigInt admissible_modulus(uint64_t threshold);

struct IndexPair {
  unsigned i;  // 0-based, i < j
  unsigned j;
  bool operator==(const IndexPair&) const = default;
};

struct WitnessPrime {
  IndexPair pair;
  uint64_t prime;
};

// h_j - h_i split into prime powers up to the builder's CRT bound and the
// remaining cofactor, whose prime factors all exceed that bound.
struct DifferenceRecord {
  IndexPair pair;
  std::vector<PrimePower> small;
  BigInt residual;
};

// One round of the inductive construction, recorded for independent replay.
struct BuildRound {
  unsigned r = 0;                          // set size before the round
  std::vector<uint64_t> X;                 // large primes <= bound dividing earlier differences
  std::vector<BigInt> residuals;           // cofactors with only primes > bound
  std::vector<BigInt> b_i;                 // K b_i == h_i (mod prod X)
  std::vector<std::pair<uint64_t, uint64_t>> a_p;  // (p, a_p)
  std::vector<uint64_t> q;                 // fresh primes q_1..q_r
  std::vector<BigInt> c;                   // K c_i == h_i (mod q_i^2)
  BigInt crt_residue;
  BigInt crt_modulus;
  BigInt b;                                // h_{r+1} = K b
  uint64_t rejected = 0;                   // CRT solutions skipped by the residual gcd test
};

struct AdmissibleSet {
  unsigned k = 0;
  AdmissibleVariant variant = AdmissibleVariant::kLemma22;
  uint64_t threshold = 0;
  BigInt K;
  std::vector<BigInt> h;
  std::vector<WitnessPrime> witnesses;
  std::vector<DifferenceRecord> differences;
  std::vector<BuildRound> trace;
  uint64_t crt_prime_bound = 0;

  // Witness prime for the pair, 0 when absent.
  uint64_t witness(unsigned i, unsigned j) const;
};

struct AdmissibleBuildOptions {
  // Large primes up to this bound enter the CRT system directly; larger prime
  // factors of earlier differences are avoided by a gcd test instead.
  uint64_t crt_prime_bound = uint64_t{1} << 16;
  unsigned max_k = 12;
};

AdmissibleSet build_admissible(unsigned k, AdmissibleVariant variant,
                               const AdmissibleBuildOptions& options = {});

// Admissibility: for every prime p <= |h|, the h_i miss a residue class mod p.
// Duplicate entries throw kInvalidArgument.
bool is_admissible(std::span<const BigInt> h);

// Re-checks every property without trusting the builder.
Report verify_properties(const AdmissibleSet& set);
// Properties (i)-(iii) for the first `count` elements under the set's own K.
Report verify_prefix(const AdmissibleSet& set, size_t count);

std::string to_json(const AdmissibleSet& set);
AdmissibleSet admissible_from_json(const std::string& text);

}  // namespace primesym

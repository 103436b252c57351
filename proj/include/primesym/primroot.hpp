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

#include <cstdint>
#include <vector>

#include "primesym/primes.hpp"

namespace primesym {

struct PrimePower {
  uint64_t prime;
  unsigned exponent;
  bool operator==(const PrimePower&) const = default;
};

// Prime factorization with primes strictly increasing.
struct Factorization {
  std::vector<PrimePower> factors;

  // Product of prime^exponent; 1 for the empty factorization.
  unsigned __int128 value() const;
  bool operator==(const Factorization&) const = default;
};

// Trial division by primes below 10^6, then Brent's Pollard rho on whatever
// cofactor remains. n >= 2.
Factorization factorize_64(uint64_t n);

// g is reduced mod p first; g == 0 (mod p) yields false. p must be prime
// (p == 2 is accepted and follows the same definition).
bool is_primitive_root(int64_t g, uint64_t p);

// p == 1 (mod q) and g^((p-1)/q) == 1 (mod p).
bool in_Pq(int64_t g, uint64_t q, uint64_t p);

// Every window prime is a primitive root modulo every other window prime.
bool window_pairwise_primroot(const PrimeWindow& window);

}  // namespace primesym

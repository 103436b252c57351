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

// Exact integer primitives shared by the search and construction modules.
//
// Every operation comes in a 64-bit flavour (used on the hot search paths)
// and an unbounded flavour over GMP integers (used by the admissible-set and
// certificate builders, whose moduli quickly outgrow 64 bits).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace primesym {

using BigInt = mpz_class;

BigInt big_from_u64(uint64_t v);
BigInt big_from_i64(int64_t v);
// Throws kInvalidArgument unless |v| fits into uint64_t and v >= 0.
uint64_t big_to_u64(const BigInt& v);
bool big_fits_u64(const BigInt& v);
BigInt big_from_string(const std::string& decimal);
std::string big_to_string(const BigInt& v);

// Residue class `residue (mod modulus)` with 0 <= residue < modulus.
struct Congruence {
  BigInt residue;
  BigInt modulus;

  // Normalises `residue` into [0, modulus); modulus must be positive.
  static Congruence make(const BigInt& residue, const BigInt& modulus);

  bool holds(const BigInt& x) const;
  bool operator==(const Congruence&) const = default;
};

// Ordered list of congruences. Pairwise coprimality is checked when solving.
class CongruenceSystem {
 public:
  CongruenceSystem() = default;
  explicit CongruenceSystem(std::vector<Congruence> items)
      : items_(std::move(items)) {}

  void add(const BigInt& residue, const BigInt& modulus) {
    items_.push_back(Congruence::make(residue, modulus));
  }
  void add(Congruence c) { items_.push_back(std::move(c)); }

  std::span<const Congruence> items() const { return items_; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Congruence> items_;
};

// Jacobi symbol (a/n) for odd n >= 1 by the binary reciprocity iteration.
// (a/1) = 1. Even or non-positive n throws kInvalidArgument.
int jacobi(int64_t a, uint64_t n);
int jacobi_u64(uint64_t a, uint64_t n);
int jacobi(const BigInt& a, const BigInt& n);

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m);
// base^exponent mod modulus; modulus <= 1 throws.
uint64_t mod_pow(uint64_t base, uint64_t exponent, uint64_t modulus);
BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus);

// Canonical solution modulo the product of the moduli. Non-coprime moduli
// throw kInvalidArgument naming the offending pair (by position).
Congruence crt_solve(const CongruenceSystem& system);

// Largest e with p^e | a. a == 0 throws.
unsigned p_adic_valuation(uint64_t p, int64_t a);
unsigned p_adic_valuation(const BigInt& p, const BigInt& a);

// a / 2^ord_2(a); requires a >= 1.
uint64_t odd_part(uint64_t a);
BigInt odd_part(const BigInt& a);

// p || a, i.e. p_adic_valuation(p, a) == 1.
bool exactly_divides(uint64_t p, int64_t a);
bool exactly_divides(const BigInt& p, const BigInt& a);

}  // namespace primesym

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

#include "primesym/primroot.hpp"

#include <algorithm>
#include <numeric>

#include "primesym/arith.hpp"
#include "primesym/error.hpp"

namespace primesym {

namespace {

constexpr uint32_t kTrialLimit = 1'000'000;

uint64_t rho_brent(uint64_t n, uint64_t c) {
  uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
  uint64_t r = 1;
  const uint64_t m = 128;
  auto f = [&](uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
  do {
    x = y;
    for (uint64_t i = 0; i < r; ++i) y = f(y);
    uint64_t k = 0;
    do {
      ys = y;
      for (uint64_t i = 0; i < std::min(m, r - k); ++i) {
        y = f(y);
        q = mul_mod(q, x > y ? x - y : y - x, n);
      }
      g = std::gcd(q, n);
      k += m;
    } while (k < r && g == 1);
    r *= 2;
  } while (g == 1);
  if (g == n) {
    do {
      ys = f(ys);
      g = std::gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

void split_large(uint64_t n, std::vector<uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_64(n)) {
    out.push_back(n);
    return;
  }
  uint64_t d = n;
  for (uint64_t c = 1; d == n; ++c) d = rho_brent(n, c);
  split_large(d, out);
  split_large(n / d, out);
}

}  // namespace

unsigned __int128 Factorization::value() const {
  unsigned __int128 v = 1;
  for (const auto& f : factors) {
    for (unsigned e = 0; e < f.exponent; ++e) v *= f.prime;
  }
  return v;
}

Factorization factorize_64(uint64_t n) {
  if (n < 2) throw_invalid("factorize_64: n must be >= 2");
  Factorization out;
  auto primes = small_primes(kTrialLimit);
  for (uint32_t p : *primes) {
    if (p > kTrialLimit) break;
    if (static_cast<uint64_t>(p) * p > n) break;
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.factors.push_back({p, e});
  }
  if (n > 1) {
    std::vector<uint64_t> big;
    split_large(n, big);
    std::sort(big.begin(), big.end());
    for (uint64_t p : big) {
      if (!out.factors.empty() && out.factors.back().prime == p) {
        ++out.factors.back().exponent;
      } else {
        out.factors.push_back({p, 1});
      }
    }
  }
  return out;
}

bool is_primitive_root(int64_t g, uint64_t p) {
  if (!is_prime_64(p)) throw_invalid("is_primitive_root: " + std::to_string(p) + " is not prime");
  uint64_t r;
  if (g >= 0) {
    r = static_cast<uint64_t>(g) % p;
  } else {
    uint64_t mag = (static_cast<uint64_t>(-(g + 1)) + 1) % p;
    r = mag == 0 ? 0 : p - mag;
  }
  if (r == 0) return false;
  if (p == 2) return true;
  for (const auto& f : factorize_64(p - 1).factors) {
    if (mod_pow(r, (p - 1) / f.prime, p) == 1) return false;
  }
  return true;
}

bool in_Pq(int64_t g, uint64_t q, uint64_t p) {
  if (!is_prime_64(q)) throw_invalid("in_Pq: q = " + std::to_string(q) + " is not prime");
  if (!is_prime_64(p)) throw_invalid("in_Pq: p = " + std::to_string(p) + " is not prime");
  if ((p - 1) % q != 0) return false;
  uint64_t r;
  if (g >= 0) {
    r = static_cast<uint64_t>(g) % p;
  } else {
    uint64_t mag = (static_cast<uint64_t>(-(g + 1)) + 1) % p;
    r = mag == 0 ? 0 : p - mag;
  }
  return mod_pow(r, (p - 1) / q, p) == 1;
}

bool window_pairwise_primroot(const PrimeWindow& window) {
  const auto& ps = window.primes;
  // Cheap necessary condition first: primitive roots are non-residues.
  for (size_t i = 0; i < ps.size(); ++i) {
    for (size_t j = 0; j < ps.size(); ++j) {
      if (i == j || ps[j] == 2 || ps[i] == ps[j]) continue;
      if (jacobi_u64(ps[i], ps[j]) != -1) return false;
    }
  }
  for (size_t i = 0; i < ps.size(); ++i) {
    for (size_t j = 0; j < ps.size(); ++j) {
      if (i == j) continue;
      if (ps[i] > static_cast<uint64_t>(INT64_MAX)) {
        if (!is_primitive_root(static_cast<int64_t>(ps[i] % ps[j]), ps[j])) return false;
      } else if (!is_primitive_root(static_cast<int64_t>(ps[i]), ps[j])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace primesym

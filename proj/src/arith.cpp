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

#include "primesym/arith.hpp"

#include <bit>
#include <utility>

#include "primesym/error.hpp"

namespace primesym {

BigInt big_from_u64(uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

BigInt big_from_i64(int64_t v) {
  if (v >= 0) return big_from_u64(static_cast<uint64_t>(v));
  BigInt r = big_from_u64(static_cast<uint64_t>(-(v + 1)) + 1);
  return -r;
}

bool big_fits_u64(const BigInt& v) {
  return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

uint64_t big_to_u64(const BigInt& v) {
  if (!big_fits_u64(v)) throw_invalid("integer does not fit in 64 bits: " + v.get_str());
  uint64_t out = 0;
  size_t count = 0;
  mpz_export(&out, &count, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

BigInt big_from_string(const std::string& decimal) {
  BigInt r;
  if (decimal.empty() || r.set_str(decimal, 10) != 0) {
    throw_invalid("not a decimal integer: '" + decimal + "'");
  }
  return r;
}

std::string big_to_string(const BigInt& v) { return v.get_str(10); }

Congruence Congruence::make(const BigInt& residue, const BigInt& modulus) {
  if (sgn(modulus) <= 0) {
    throw_invalid("congruence modulus must be positive, got " + modulus.get_str());
  }
  Congruence c;
  c.modulus = modulus;
  mpz_fdiv_r(c.residue.get_mpz_t(), residue.get_mpz_t(), modulus.get_mpz_t());
  return c;
}

bool Congruence::holds(const BigInt& x) const {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
  return r == residue;
}

int jacobi_u64(uint64_t a, uint64_t n) {
  if (n == 0 || (n & 1) == 0) {
    throw_invalid("jacobi: modulus must be odd and positive, got " + std::to_string(n));
  }
  a %= n;
  int t = 1;
  while (a != 0) {
    int z = std::countr_zero(a);
    a >>= z;
    // (2/n) = -1 iff n = 3, 5 (mod 8)
    if ((z & 1) && ((n & 7) == 3 || (n & 7) == 5)) t = -t;
    // reciprocity flips the sign iff both are 3 (mod 4)
    if (a & n & 2) t = -t;
    std::swap(a, n);
    a %= n;
  }
  return n == 1 ? t : 0;
}

int jacobi(int64_t a, uint64_t n) {
  if (n == 0 || (n & 1) == 0) {
    throw_invalid("jacobi: modulus must be odd and positive, got " + std::to_string(n));
  }
  if (a >= 0) return jacobi_u64(static_cast<uint64_t>(a), n);
  // -(a+1) avoids overflow at INT64_MIN
  uint64_t mag = static_cast<uint64_t>(-(a + 1)) + 1;
  uint64_t r = mag % n;
  return jacobi_u64(r == 0 ? 0 : n - r, n);
}

int jacobi(const BigInt& a_in, const BigInt& n_in) {
  if (sgn(n_in) <= 0 || mpz_even_p(n_in.get_mpz_t())) {
    throw_invalid("jacobi: modulus must be odd and positive, got " + n_in.get_str());
  }
  BigInt n = n_in;
  BigInt a;
  mpz_fdiv_r(a.get_mpz_t(), a_in.get_mpz_t(), n.get_mpz_t());
  int t = 1;
  while (sgn(a) != 0) {
    mp_bitcnt_t z = mpz_scan1(a.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), z);
    unsigned n8 = static_cast<unsigned>(mpz_get_ui(n.get_mpz_t()) & 7);
    if ((z & 1) && (n8 == 3 || n8 == 5)) t = -t;
    unsigned a4 = static_cast<unsigned>(mpz_get_ui(a.get_mpz_t()) & 3);
    if (a4 == 3 && (n8 & 3) == 3) t = -t;
    mpz_swap(a.get_mpz_t(), n.get_mpz_t());
    mpz_tdiv_r(a.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
  }
  return n == 1 ? t : 0;
}

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t mod_pow(uint64_t base, uint64_t exponent, uint64_t modulus) {
  if (modulus <= 1) throw_invalid("mod_pow: modulus must exceed 1");
  uint64_t result = 1;
  base %= modulus;
  while (exponent) {
    if (exponent & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exponent >>= 1;
  }
  return result;
}

BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  if (modulus <= 1) throw_invalid("mod_pow: modulus must exceed 1");
  if (sgn(exponent) < 0) throw_invalid("mod_pow: exponent must be nonnegative");
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

Congruence crt_solve(const CongruenceSystem& system) {
  auto items = system.items();
  if (items.empty()) return Congruence::make(0, 1);

  // Coprimality is checked against the running product up front; on a hit the
  // earlier modulus is located so the error names the pair.
  BigInt prefix = 1, g;
  for (size_t j = 0; j < items.size(); ++j) {
    mpz_gcd(g.get_mpz_t(), prefix.get_mpz_t(), items[j].modulus.get_mpz_t());
    if (g != 1) {
      for (size_t i = 0; i < j; ++i) {
        mpz_gcd(g.get_mpz_t(), items[i].modulus.get_mpz_t(), items[j].modulus.get_mpz_t());
        if (g == 1) continue;
        throw_invalid("crt_solve: moduli #" + std::to_string(i) + " (" +
                      items[i].modulus.get_str() + ") and #" + std::to_string(j) + " (" +
                      items[j].modulus.get_str() + ") share the factor " + g.get_str());
      }
    }
    prefix *= items[j].modulus;
  }

  BigInt x = items[0].residue;
  BigInt m = items[0].modulus;
  BigInt inv, diff, t;
  for (size_t i = 1; i < items.size(); ++i) {
    const Congruence& c = items[i];
    // x + m*t == r (mod c.modulus)  =>  t == (r - x) * m^-1
    BigInt m_red = m % c.modulus;
    if (mpz_invert(inv.get_mpz_t(), m_red.get_mpz_t(), c.modulus.get_mpz_t()) == 0) {
      if (c.modulus != 1) throw Error(ErrorCode::kInternal, "crt_solve: inverse failed");
      inv = 0;
    }
    diff = c.residue - x;
    mpz_fdiv_r(diff.get_mpz_t(), diff.get_mpz_t(), c.modulus.get_mpz_t());
    t = diff * inv;
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), c.modulus.get_mpz_t());
    x += m * t;
    m *= c.modulus;
  }
  return Congruence::make(x, m);
}

unsigned p_adic_valuation(uint64_t p, int64_t a) {
  if (p < 2) throw_invalid("p_adic_valuation: p must be prime");
  if (a == 0) throw_invalid("p_adic_valuation: a must be nonzero");
  uint64_t mag = a > 0 ? static_cast<uint64_t>(a) : static_cast<uint64_t>(-(a + 1)) + 1;
  unsigned e = 0;
  while (mag % p == 0) {
    mag /= p;
    ++e;
  }
  return e;
}

unsigned p_adic_valuation(const BigInt& p, const BigInt& a) {
  if (p < 2) throw_invalid("p_adic_valuation: p must be prime");
  if (sgn(a) == 0) throw_invalid("p_adic_valuation: a must be nonzero");
  BigInt rest = a;
  unsigned e = 0;
  while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
    ++e;
  }
  return e;
}

uint64_t odd_part(uint64_t a) {
  if (a == 0) throw_invalid("odd_part: a must be positive");
  return a >> std::countr_zero(a);
}

BigInt odd_part(const BigInt& a) {
  if (sgn(a) <= 0) throw_invalid("odd_part: a must be positive");
  BigInt r;
  mpz_tdiv_q_2exp(r.get_mpz_t(), a.get_mpz_t(), mpz_scan1(a.get_mpz_t(), 0));
  return r;
}

bool exactly_divides(uint64_t p, int64_t a) { return p_adic_valuation(p, a) == 1; }

bool exactly_divides(const BigInt& p, const BigInt& a) { return p_adic_valuation(p, a) == 1; }

}  // namespace primesym

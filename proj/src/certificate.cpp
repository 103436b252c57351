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

#include "primesym/certificate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "primesym/error.hpp"
#include "primesym/primes.hpp"
#include "primesym/primroot.hpp"

namespace primesym {

using json = nlohmann::json;

namespace {

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

uint64_t mod_u64(const BigInt& a, uint64_t m) { return mpz_fdiv_ui(a.get_mpz_t(), m); }

uint64_t sub_mod(uint64_t a, uint64_t b, uint64_t p) {
  a %= p;
  b %= p;
  return a >= b ? a - b : a + p - b;
}

std::vector<uint32_t> primes_upto(uint64_t limit) {
  std::vector<uint32_t> out;
  if (limit < 2) return out;
  for (uint32_t p : *small_primes(static_cast<uint32_t>(limit))) {
    if (p > limit) break;
    out.push_back(p);
  }
  return out;
}

BigInt odd_primorial(uint64_t w) {
  BigInt r = 1;
  for (uint32_t p : primes_upto(w)) {
    if (p > 2) r *= p;
  }
  return r;
}

std::string pair_text(IndexPair p) {
  return "(" + std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ")";
}

// Large primes dividing some difference, each with its unique pair.
std::map<uint64_t, IndexPair> large_difference_primes(std::span<const uint64_t> h, uint64_t thr) {
  std::map<uint64_t, IndexPair> out;
  for (unsigned i = 0; i < h.size(); ++i) {
    for (unsigned j = i + 1; j < h.size(); ++j) {
      for (const auto& f : factorize_64(h[j] - h[i]).factors) {
        if (f.prime <= thr) continue;
        auto [it, fresh] = out.emplace(f.prime, IndexPair{i, j});
        if (!fresh) {
          throw_invalid("prime " + std::to_string(f.prime) + " divides both h" + pair_text(it->second) +
                        " and h" + pair_text({i, j}) + " differences");
        }
      }
    }
  }
  return out;
}

std::vector<uint64_t> fresh_primes_above(uint64_t lo, uint64_t count, uint64_t w) {
  std::vector<uint64_t> out;
  if (count == 0) return out;
  uint64_t from = lo + 1;
  while (out.size() < count && from <= w) {
    uint64_t to = std::min<uint64_t>(w + 1, from + (uint64_t{1} << 20));
    sieve_range(from, to).for_each_prime([&](uint64_t p) {
      if (out.size() < count) out.push_back(p);
    });
    from = to;
  }
  return out;
}

int target_for(const Certificate& c, const RpEntry& e) {
  if (!e.witness) return 1;
  if (c.variant == CertVariant::kThm13) return c.d2;
  return lemma32_target(c.h[e.pair.j] - c.h[e.pair.i]);
}

std::vector<uint64_t> h_as_u64(const AdmissibleSet& H, uint64_t max_w) {
  std::vector<uint64_t> h;
  for (const auto& x : H.h) {
    if (!big_fits_u64(x) || big_to_u64(x) > max_w) {
      throw_bound("certificate: h_k = " + H.h.back().get_str() + " needs w >= h_k, above the cap " +
                  std::to_string(max_w));
    }
    h.push_back(big_to_u64(x));
  }
  return h;
}

// First residue mod q avoiding -h_s (and -h_s + 1 for lemma32).
uint64_t choose_rq(uint64_t q, std::span<const uint64_t> h, CertVariant v) {
  std::vector<bool> used(q, false);
  for (uint64_t x : h) {
    uint64_t neg = sub_mod(0, x, q);
    used[neg] = true;
    if (v == CertVariant::kLemma32) used[(neg + 1) % q] = true;
  }
  for (uint64_t r = 0; r < q; ++r) {
    if (!used[r]) return r;
  }
  throw_invalid("no residue class left mod " + std::to_string(q));
}

}  // namespace

std::string to_string(CertVariant v) { return v == CertVariant::kThm13 ? "thm13" : "lemma32"; }

CertVariant parse_cert_variant(const std::string& s) {
  if (s == "thm13") return CertVariant::kThm13;
  if (s == "lemma32") return CertVariant::kLemma32;
  throw_invalid("unknown certificate variant '" + s + "' (expected thm13 or lemma32)");
}

AdmissibleVariant required_admissible_variant(CertVariant v) {
  return v == CertVariant::kThm13 ? AdmissibleVariant::kLemma22 : AdmissibleVariant::kLemma31;
}

uint64_t choose_rp(uint64_t p, unsigned i, unsigned j, std::span<const uint64_t> h, int target,
                   CertVariant mode, int delta) {
  if (i >= h.size() || j >= h.size() || i == j) throw_invalid("choose_rp: bad index pair");
  if (p < 3 || !is_prime_64(p)) throw_invalid("choose_rp: p must be an odd prime");
  if (target != 1 && target != -1) throw_invalid("choose_rp: target must be +1 or -1");
  if (delta != 1 && delta != -1) throw_invalid("choose_rp: delta must be +1 or -1");
  if ((h[i] > h[j] ? h[i] - h[j] : h[j] - h[i]) % p != 0) {
    throw_invalid("choose_rp: " + std::to_string(p) + " does not divide h_j - h_i");
  }
  const uint64_t k = h.size();
  bool room = mode == CertVariant::kThm13 ? 2 * (k - 2) + 3 < p : 4 * (k - 1) + 1 < p;
  if (!room) {
    throw_invalid("choose_rp: p = " + std::to_string(p) + " too small for k = " + std::to_string(k));
  }
  std::vector<bool> forbidden(p, false);
  for (uint64_t hs : h) {
    uint64_t f = sub_mod(h[i], hs, p);
    forbidden[f] = true;
    if (mode == CertVariant::kLemma32) forbidden[(f + 1) % p] = true;
  }
  for (uint64_t r = 1; r < p; ++r) {
    if (forbidden[r]) continue;
    int64_t a = mode == CertVariant::kThm13 ? static_cast<int64_t>(r) * delta : static_cast<int64_t>(r);
    if (jacobi(a, p) == target) return r;
  }
  throw Error(ErrorCode::kInternal, "choose_rp: no admissible residue mod " + std::to_string(p));
}

int lemma32_target(uint64_t diff) {
  // b + h_j == 2 (mod 3) makes (3 / b + h_j) = -1.
  return p_adic_valuation(3, static_cast<int64_t>(diff)) % 2 == 0 ? -1 : 1;
}

int lemma32_paper_target(uint64_t p, uint64_t diff) {
  unsigned e = p_adic_valuation(3, static_cast<int64_t>(diff));
  int s = (e % 2 == 0) ? 1 : jacobi(3, p);
  return -s;
}

CongruenceSystem Certificate::system() const {
  CongruenceSystem sys;
  if (variant == CertVariant::kThm13) {
    sys.add(big_from_i64(delta), K);
  } else {
    sys.add(17, 24);
    for (const auto& [p, r] : small_residues) sys.add(big_from_u64(r), big_from_u64(p));
  }
  for (const auto& e : rp) sys.add(big_from_u64(e.residue), big_from_u64(e.p));
  for (const auto& c : cover) sys.add(big_from_u64(sub_mod(0, c.a, c.q)), big_from_u64(c.q));
  for (const auto& q : rq) sys.add(big_from_u64(q.r), big_from_u64(q.q));
  return sys;
}

std::vector<uint64_t> gap_set(std::span<const uint64_t> h, CertVariant v) {
  std::set<uint64_t> members(h.begin(), h.end());
  std::vector<uint64_t> out;
  if (h.empty()) return out;
  const uint64_t hk = *std::max_element(h.begin(), h.end());
  for (uint64_t a = 0; a <= hk; ++a) {
    if (members.count(a)) continue;
    if (v == CertVariant::kLemma32 && (a == 0 || members.count(a + 1))) continue;
    out.push_back(a);
  }
  return out;
}

uint64_t minimal_w(const AdmissibleSet& H, CertVariant v, uint64_t max_w) {
  auto h = h_as_u64(H, max_w);
  const uint64_t hk = h.back();
  const uint64_t t = gap_set(h, v).size();
  uint64_t floor_w = std::max<uint64_t>(hk, H.threshold);
  if (t == 0) return floor_w;
  auto q = fresh_primes_above(hk, t, max_w);
  if (q.size() < t) {
    throw_bound("minimal_w: " + std::to_string(t) + " covering primes above h_k = " + std::to_string(hk) +
                " are needed but only " + std::to_string(q.size()) + " lie below the cap " +
                std::to_string(max_w));
  }
  return std::max(floor_w, q.back());
}

Certificate build_certificate(const AdmissibleSet& H, CertVariant v, unsigned m, int d1, int d2,
                              const CertificateOptions& options) {
  if (H.variant != required_admissible_variant(v)) {
    throw_invalid("certificate variant " + to_string(v) + " needs an admissible set of variant " +
                  to_string(required_admissible_variant(v)));
  }
  if (H.k < 2 || H.h.size() != H.k) throw_invalid("certificate: malformed admissible set");
  if (v == CertVariant::kThm13) {
    if (m < 1 || m >= H.k) {
      throw_invalid("certificate: m must satisfy 1 <= m < k = " + std::to_string(H.k));
    }
    if ((d1 != 1 && d1 != -1) || (d2 != 1 && d2 != -1)) throw_invalid("certificate: signs must be +1 or -1");
  }
  if (!is_admissible(H.h)) throw_invalid("certificate: the set is not admissible");

  Certificate c;
  c.variant = v;
  c.H = H;
  c.h = h_as_u64(H, options.max_w);
  c.m = v == CertVariant::kThm13 ? m : 0;
  c.d1 = v == CertVariant::kThm13 ? d1 : -1;
  c.d2 = v == CertVariant::kThm13 ? d2 : -1;
  c.delta = c.d1 * c.d2;
  const uint64_t thr = H.threshold;
  const uint64_t hk = c.h.back();
  const auto S = gap_set(c.h, v);

  c.w = options.w == 0 ? minimal_w(H, v, options.max_w) : options.w;
  if (c.w > options.max_w) {
    throw_bound("certificate: w = " + std::to_string(c.w) + " exceeds the cap " + std::to_string(options.max_w));
  }
  if (c.w < hk || c.w < thr) {
    throw_invalid("certificate: w = " + std::to_string(c.w) + " must be at least h_k = " + std::to_string(hk));
  }
  auto qs = fresh_primes_above(hk, S.size(), c.w);
  if (qs.size() < S.size()) {
    throw_invalid("certificate: w = " + std::to_string(c.w) + " is too small: the gap set needs " +
                  std::to_string(S.size()) + " primes in (" + std::to_string(hk) + ", w] but only " +
                  std::to_string(qs.size()) + " exist");
  }

  if (v == CertVariant::kThm13) {
    c.K = H.K;
  } else {
    c.K = 24;
    for (uint32_t p : primes_upto(4 * uint64_t{H.k})) {
      if (p >= 5) c.small_residues.emplace_back(p, 4);
    }
  }

  auto large = large_difference_primes(c.h, thr);
  for (const auto& [p, pair] : large) {
    RpEntry e;
    e.p = p;
    e.pair = pair;
    e.witness = H.witness(pair.i, pair.j) == p;
    e.target = target_for(c, e);
    e.r = choose_rp(p, pair.i, pair.j, c.h, e.target, v, c.delta);
    e.residue = sub_mod(e.r, c.h[pair.i], p);
    c.rp.push_back(e);
  }
  for (size_t i = 0; i < S.size(); ++i) c.cover.push_back({S[i], qs[i]});
  if (v == CertVariant::kLemma32) {
    for (size_t s = 1; s < c.h.size(); ++s) c.cover_by_four.push_back(c.h[s] - 1);
  }
  std::set<uint64_t> used(qs.begin(), qs.end());
  for (uint32_t q : primes_upto(c.w)) {
    if (q <= thr || large.count(q) || used.count(q)) continue;
    c.rq.push_back({q, choose_rq(q, c.h, v)});
  }

  Congruence sol = crt_solve(c.system());
  c.b = sol.residue;
  c.system_modulus = sol.modulus;
  if (v == CertVariant::kThm13) {
    c.W = 4;
    for (uint32_t p : primes_upto(c.w)) c.W *= p;
  } else {
    c.W = odd_primorial(c.w);
    for (size_t i = 0; i < c.h.size(); ++i) {
      for (size_t j = i + 1; j < c.h.size(); ++j) {
        BigInt d = big_from_u64(c.h[j] - c.h[i]);
        mpz_lcm(c.W.get_mpz_t(), c.W.get_mpz_t(), d.get_mpz_t());
      }
    }
  }

  Report report = verify_certificate(c);
  if (!report.passed()) {
    const CheckResult* f = report.first_failure();
    throw Error(ErrorCode::kInternal, "certificate failed self-check: " + f->name + ": " + f->detail);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

class Failures {
 public:
  void add(const std::string& s) {
    if (count_ < 5) text_ += (text_.empty() ? "" : "; ") + s;
    ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string detail(const std::string& success = {}) const {
    if (count_ == 0) return success;
    return count_ > 5 ? text_ + "; ... " + std::to_string(count_) + " failures" : text_;
  }

 private:
  std::string text_;
  size_t count_ = 0;
};

std::string residue_miss(const BigInt& b, uint64_t got_mod, uint64_t want) {
  return "b mod " + std::to_string(got_mod) + " = " + std::to_string(mod_u64(b, got_mod)) + ", expected " +
         std::to_string(want);
}

}  // namespace

namespace {

// Jacobi symbol that reports 0 instead of throwing on an even or nonpositive
// modulus, so a damaged certificate yields a failed check rather than an error.
int checked_jacobi(const BigInt& a, const BigInt& n) {
  if (n <= 0 || mpz_even_p(n.get_mpz_t())) return 0;
  return jacobi(a, n);
}

}  // namespace

Report verify_certificate(const Certificate& c) {
  Report report;
  const bool thm = c.variant == CertVariant::kThm13;
  const auto& h = c.h;
  const size_t k = h.size();

  // Shape and parameters.
  std::string shape;
  if (k < 2 || c.H.h.size() != k) {
    shape = "admissible set and h disagree in size";
  } else if (c.H.variant != required_admissible_variant(c.variant)) {
    shape = "admissible set variant does not match " + to_string(c.variant);
  } else if (thm && (c.m < 1 || c.m >= k)) {
    shape = "m must satisfy 1 <= m < k";
  } else if (std::abs(c.d1) != 1 || std::abs(c.d2) != 1 || c.delta != c.d1 * c.d2) {
    shape = "signs must be +1/-1 with delta = d1 d2";
  } else if (!thm && (c.d1 != -1 || c.d2 != -1)) {
    shape = "lemma32 predicts (-1, -1)";
  } else {
    for (size_t s = 0; s < k; ++s) {
      if (big_from_u64(h[s]) != c.H.h[s]) shape = "h differs from the admissible set";
    }
    if (shape.empty() && (c.w < h.back() || c.w < c.H.threshold)) shape = "w must be at least h_k";
  }
  report.add("parameters", shape.empty(), shape);
  if (!shape.empty()) return report;

  Report hrep = verify_properties(c.H);
  report.add("admissible set", hrep.passed(),
             hrep.passed() ? "" : hrep.first_failure()->name + ": " + hrep.first_failure()->detail);

  const uint64_t thr = c.H.threshold;
  const auto primes = primes_upto(c.w);
  const BigInt& b = c.b;

  // Modulus W.
  BigInt expect_w;
  if (thm) {
    expect_w = 4;
    for (uint32_t p : primes) expect_w *= p;
  } else {
    expect_w = odd_primorial(c.w);
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = i + 1; j < k; ++j) {
        BigInt d = big_from_u64(h[j] - h[i]);
        mpz_lcm(expect_w.get_mpz_t(), expect_w.get_mpz_t(), d.get_mpz_t());
      }
    }
  }
  report.add("modulus W", c.W == expect_w,
             c.W == expect_w ? std::to_string(mpz_sizeinbase(c.W.get_mpz_t(), 2)) + " bits"
                             : "W does not match its definition from w = " + std::to_string(c.w));
  report.add("0 <= b < W", sgn(b) >= 0 && b < c.W, "");

  // (1)
  Failures f1;
  if (thm) {
    if (c.K != c.H.K) f1.add("K differs from the admissible set modulus");
    if (mod(b - c.delta, c.K) != 0) f1.add("b mod K = " + mod(b, c.K).get_str() + ", expected delta mod K");
  } else {
    if (c.K != 24) f1.add("K must be 24");
    if (mod_u64(b, 24) != 17) f1.add(residue_miss(b, 24, 17));
    std::vector<std::pair<uint64_t, uint64_t>> want;
    for (uint32_t p : primes_upto(4 * uint64_t{c.H.k})) {
      if (p >= 5) want.emplace_back(p, 4);
    }
    if (want != c.small_residues) f1.add("table of primes in [5, 4k] is incomplete");
    for (const auto& [p, r] : want) {
      if (mod_u64(b, p) != r % p) f1.add(residue_miss(b, p, r % p));
    }
  }
  report.add("(1) small-prime congruences", f1.ok(), f1.detail());

  // (2)
  Failures f2;
  std::map<uint64_t, IndexPair> large;
  try {
    large = large_difference_primes(h, thr);
  } catch (const Error& e) {
    f2.add(e.what());
  }
  std::map<uint64_t, const RpEntry*> by_p;
  for (const auto& e : c.rp) by_p[e.p] = &e;
  if (by_p.size() != c.rp.size()) f2.add("duplicate prime in the r_p table");
  for (const auto& [p, pair] : large) {
    auto it = by_p.find(p);
    if (it == by_p.end()) {
      f2.add("no r_p entry for " + std::to_string(p));
      continue;
    }
    const RpEntry& e = *it->second;
    if (!(e.pair == pair)) f2.add("r_p entry for " + std::to_string(p) + " names the wrong pair");
    if (e.witness != (c.H.witness(pair.i, pair.j) == p)) f2.add("witness flag wrong at " + std::to_string(p));
    if (e.target != target_for(c, e)) f2.add("target wrong at " + std::to_string(p));
    bool avoid = true;
    for (uint64_t hs : h) {
      uint64_t fb = sub_mod(h[pair.i], hs, p);
      if (e.r % p == fb || (!thm && e.r % p == (fb + 1) % p)) avoid = false;
    }
    if (!avoid) f2.add("r_" + std::to_string(p) + " hits a forbidden class");
    int sym = thm ? jacobi(static_cast<int64_t>(e.r % p) * c.delta, p) : jacobi(static_cast<int64_t>(e.r % p), p);
    if (sym != e.target) f2.add("symbol of r_" + std::to_string(p) + " is " + std::to_string(sym));
    uint64_t want = sub_mod(e.r, h[pair.i], p);
    if (e.residue != want || mod_u64(b, p) != want) f2.add(residue_miss(b, p, want));
  }
  for (const auto& e : c.rp) {
    if (!large.count(e.p)) f2.add("r_p entry for " + std::to_string(e.p) + " divides no difference");
  }
  report.add("(2) large primes of differences", f2.ok(),
             f2.detail(std::to_string(c.rp.size()) + " primes"));

  // (3)
  Failures f3;
  const auto S = gap_set(h, c.variant);
  auto qs = fresh_primes_above(h.back(), S.size(), c.w);
  if (c.cover.size() != S.size()) {
    f3.add("gap set has " + std::to_string(S.size()) + " elements, table has " + std::to_string(c.cover.size()));
  } else if (qs.size() != S.size()) {
    f3.add("only " + std::to_string(qs.size()) + " primes in (h_k, w], need " + std::to_string(S.size()));
  } else {
    for (size_t i = 0; i < S.size(); ++i) {
      const auto& e = c.cover[i];
      if (e.a != S[i]) f3.add("gap entry " + std::to_string(i + 1) + " is " + std::to_string(e.a));
      if (e.q != qs[i]) f3.add("covering prime for a = " + std::to_string(e.a) + " should be " + std::to_string(qs[i]));
      uint64_t want = sub_mod(0, e.a, e.q);
      if (mod_u64(b, e.q) != want) f3.add(residue_miss(b, e.q, want));
    }
  }
  if (!thm) {
    std::vector<uint64_t> want;
    for (size_t s = 1; s < k; ++s) want.push_back(h[s] - 1);
    if (want != c.cover_by_four) f3.add("h_s - 1 offsets are not all listed");
    if (mod_u64(b, 4) != 1) f3.add("b + h_s - 1 is not divisible by 4");
  }
  report.add("(3) gap covering", f3.ok(), f3.detail(std::to_string(S.size()) + " offsets"));

  // (4)
  Failures f4;
  std::set<uint64_t> qset(qs.begin(), qs.end());
  std::vector<uint64_t> want_q;
  for (uint32_t q : primes) {
    if (q > thr && !large.count(q) && !qset.count(q)) want_q.push_back(q);
  }
  if (want_q.size() != c.rq.size()) {
    f4.add("Q has " + std::to_string(want_q.size()) + " primes, table has " + std::to_string(c.rq.size()));
  } else {
    for (size_t i = 0; i < want_q.size(); ++i) {
      const auto& e = c.rq[i];
      if (e.q != want_q[i]) {
        f4.add("Q entry " + std::to_string(i + 1) + " should be " + std::to_string(want_q[i]));
        continue;
      }
      for (uint64_t hs : h) {
        uint64_t neg = sub_mod(0, hs, e.q);
        if (e.r == neg || (!thm && e.r == (neg + 1) % e.q)) f4.add("r_" + std::to_string(e.q) + " hits a forbidden class");
      }
      if (mod_u64(b, e.q) != e.r) f4.add(residue_miss(b, e.q, e.r));
    }
  }
  report.add("(4) remaining primes", f4.ok(), f4.detail(std::to_string(c.rq.size()) + " primes"));

  // Every prime <= w appears in exactly one congruence; the moduli multiply out.
  BigInt prod = 1;
  const CongruenceSystem sys = c.system();
  for (const auto& cg : sys.items()) prod *= cg.modulus;
  bool covered = prod == c.system_modulus;
  if (thm) {
    covered = covered && prod == c.W;
  } else {
    covered = covered && prod == 8 * odd_primorial(c.w) && mod(c.W, prod) == 0;
  }
  report.add("system modulus", covered, covered ? "" : "moduli do not multiply out to the expected product");

  // Coprimality.
  BigInt g, acc = 1;
  for (uint64_t hs : h) acc *= b + hs;
  mpz_gcd(g.get_mpz_t(), acc.get_mpz_t(), c.W.get_mpz_t());
  report.add("gcd(prod (b + h_s), W) = 1", g == 1, g == 1 ? "" : "shared factor " + g.get_str());
  if (!thm) {
    BigInt acc1 = 1;
    for (uint64_t hs : h) acc1 *= b + hs - 1;
    BigInt odd = odd_primorial(c.w);
    mpz_gcd(g.get_mpz_t(), acc1.get_mpz_t(), odd.get_mpz_t());
    report.add("gcd(prod (b + h_s - 1), odd primorial) = 1", g == 1, g == 1 ? "" : "shared factor " + g.get_str());
  }

  // Residue class mod 8, stable in n since 8 | W.
  uint64_t want8 = thm ? (c.delta == 1 ? 1 : 7) : 1;
  Failures f8;
  if (mod_u64(c.W, 8) != 0) f8.add("8 does not divide W");
  for (size_t s = 0; s < k; ++s) {
    if (mod_u64(b + h[s], 8) != want8) f8.add("b + h_" + std::to_string(s + 1) + " mod 8 = " + std::to_string(mod_u64(b + h[s], 8)));
  }
  report.add("class mod 8", f8.ok(), f8.detail("all b + h_s == " + std::to_string(want8) + " (mod 8)"));

  // Symbols, directly.
  Failures fs;
  if (thm) {
    for (int n = 0; n <= 1; ++n) {
      for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
          BigInt vi = c.W * n + b + h[i], vj = c.W * n + b + h[j];
          int sij = checked_jacobi(vi, vj), sji = checked_jacobi(vj, vi);
          if (sij != c.d1 || sji != c.d2) {
            fs.add("n = " + std::to_string(n) + ", pair " + pair_text({unsigned(i), unsigned(j)}) + ": (" +
                   std::to_string(sij) + ", " + std::to_string(sji) + ")");
          }
        }
      }
    }
  } else {
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        BigInt diff = big_from_u64(h[i]) - big_from_u64(h[j]);
        int s = checked_jacobi(diff, b + h[j]);
        if (s != -1) fs.add("(h_" + std::to_string(i + 1) + " - h_" + std::to_string(j + 1) + " / b + h_" + std::to_string(j + 1) + ") = " + std::to_string(s));
      }
    }
  }
  report.add(thm ? "predicted symbols (direct)" : "(iii) symbols (direct)", fs.ok(), fs.detail());

  // Symbols through the prime-by-prime reciprocity chain.
  Failures fc;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      if (i == j || (thm && j < i)) continue;
      uint64_t diff = h[i] > h[j] ? h[i] - h[j] : h[j] - h[i];
      int value = thm ? c.delta : 1;  // (-1 / N) = delta, (2 / N) = 1
      for (const auto& f : factorize_64(odd_part(diff)).factors) {
        const uint64_t p = f.prime;
        uint64_t res;
        auto it = by_p.find(p);
        if (p > thr && it != by_p.end()) {
          res = it->second->r % p;  // b + h_j == r_p (mod p)
        } else {
          res = mod_u64(b + h[j], p);
        }
        int sign = thm && ((p - 1) / 2) % 2 == 1 ? c.delta : 1;
        int step = sign * jacobi(static_cast<int64_t>(res), p);
        // Step identity (p / W n + b + h_j) = delta^((p-1)/2) (b + h_j / p).
        for (int n = 0; n <= 1; ++n) {
          BigInt N = c.W * n + b + h[j];
          if (checked_jacobi(big_from_u64(p), N) != step) {
            fc.add("reciprocity step fails at p = " + std::to_string(p) + ", n = " + std::to_string(n));
          }
        }
        if (f.exponent % 2 == 1) value *= step;
      }
      int want = thm ? c.d1 : -1;
      if (value != want) {
        fc.add("pair " + pair_text({unsigned(std::min(i, j)), unsigned(std::max(i, j))}) + " chains to " + std::to_string(value));
      }
    }
  }
  report.add("reciprocity chain", fc.ok(), fc.detail());
  return report;
}

// ---------------------------------------------------------------------------
// JSON

std::string to_json(const Certificate& c) {
  json j;
  j["schema"] = "primesym.certificate";
  j["version"] = 1;
  j["variant"] = to_string(c.variant);
  j["H"] = json::parse(to_json(c.H));
  if (c.variant == CertVariant::kThm13) {
    j["m"] = c.m;
    j["d1"] = c.d1;
    j["d2"] = c.d2;
    j["delta"] = c.delta;
  }
  j["w"] = c.w;
  j["K"] = c.K.get_str();
  json small = json::array();
  for (const auto& [p, r] : c.small_residues) small.push_back({{"p", p}, {"r", r}});
  j["small_residues"] = small;
  json rp = json::array();
  for (const auto& e : c.rp) {
    rp.push_back({{"p", e.p}, {"i", e.pair.i}, {"j", e.pair.j}, {"witness", e.witness},
                  {"target", e.target}, {"r", e.r}, {"residue", e.residue}});
  }
  j["rp"] = rp;
  json cover = json::array();
  for (const auto& e : c.cover) cover.push_back({{"a", e.a}, {"q", e.q}});
  j["cover"] = cover;
  j["cover_by_four"] = c.cover_by_four;
  json rq = json::array();
  for (const auto& e : c.rq) rq.push_back({{"q", e.q}, {"r", e.r}});
  j["rq"] = rq;
  j["system_modulus"] = c.system_modulus.get_str();
  j["W"] = c.W.get_str();
  j["b"] = c.b.get_str();
  return j.dump(1);
}

Certificate certificate_from_json(const std::string& text) {
  Certificate c;
  try {
    json j = json::parse(text);
    if (!j.contains("schema") || j["schema"] != "primesym.certificate") {
      throw_invalid("certificate: field 'schema' must be \"primesym.certificate\"");
    }
    if (j.at("version") != 1) throw_invalid("certificate: unsupported version");
    c.variant = parse_cert_variant(j.at("variant").get<std::string>());
    c.H = admissible_from_json(j.at("H").dump());
    for (const auto& x : c.H.h) {
      if (!big_fits_u64(x)) throw_invalid("certificate: h values must fit in 64 bits");
      c.h.push_back(big_to_u64(x));
    }
    if (c.variant == CertVariant::kThm13) {
      c.m = j.at("m").get<unsigned>();
      c.d1 = j.at("d1").get<int>();
      c.d2 = j.at("d2").get<int>();
      c.delta = j.at("delta").get<int>();
    } else {
      c.m = 0;
      c.d1 = c.d2 = -1;
      c.delta = 1;
    }
    c.w = j.at("w").get<uint64_t>();
    c.K = big_from_string(j.at("K").get<std::string>());
    for (const auto& e : j.at("small_residues")) {
      c.small_residues.emplace_back(e.at("p").get<uint64_t>(), e.at("r").get<uint64_t>());
    }
    for (const auto& e : j.at("rp")) {
      RpEntry r;
      r.p = e.at("p").get<uint64_t>();
      r.pair = {e.at("i").get<unsigned>(), e.at("j").get<unsigned>()};
      r.witness = e.at("witness").get<bool>();
      r.target = e.at("target").get<int>();
      r.r = e.at("r").get<uint64_t>();
      r.residue = e.at("residue").get<uint64_t>();
      if (r.p < 3 || r.pair.i >= c.h.size() || r.pair.j >= c.h.size()) throw_invalid("certificate: bad r_p entry");
      c.rp.push_back(r);
    }
    for (const auto& e : j.at("cover")) {
      c.cover.push_back({e.at("a").get<uint64_t>(), e.at("q").get<uint64_t>()});
      if (c.cover.back().q < 2) throw_invalid("certificate: bad covering prime");
    }
    c.cover_by_four = j.at("cover_by_four").get<std::vector<uint64_t>>();
    for (const auto& e : j.at("rq")) {
      c.rq.push_back({e.at("q").get<uint64_t>(), e.at("r").get<uint64_t>()});
      if (c.rq.back().q < 2) throw_invalid("certificate: bad Q prime");
    }
    c.system_modulus = big_from_string(j.at("system_modulus").get<std::string>());
    c.W = big_from_string(j.at("W").get<std::string>());
    c.b = big_from_string(j.at("b").get<std::string>());
  } catch (const json::exception& e) {
    throw_invalid(std::string("certificate JSON: ") + e.what());
  }
  if (c.w > (uint64_t{1} << 32)) throw_bound("certificate: w is beyond the supported range");
  return c;
}

}  // namespace primesym

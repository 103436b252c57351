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

#include "primesym/admissible.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "primesym/error.hpp"
#include "primesym/primes.hpp"

namespace primesym {

using json = nlohmann::json;

namespace {

std::string pair_name(IndexPair p) {
  return "(" + std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ")";
}

BigInt inverse_mod(const BigInt& a, const BigInt& m) {
  BigInt inv;
  if (m == 1) return 0;
  if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kInternal, "no inverse of " + a.get_str() + " mod " + m.get_str());
  }
  return inv;
}

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

uint64_t mod_u64(const BigInt& a, uint64_t m) {
  return mpz_fdiv_ui(a.get_mpz_t(), m);
}

DifferenceRecord split_difference(IndexPair pair, const BigInt& diff, uint64_t bound) {
  DifferenceRecord rec{pair, {}, abs(diff)};
  auto primes = small_primes(static_cast<uint32_t>(bound));
  for (uint32_t p : *primes) {
    if (p > bound) break;
    if (!mpz_divisible_ui_p(rec.residual.get_mpz_t(), p)) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rec.residual.get_mpz_t(), p)) {
      mpz_divexact_ui(rec.residual.get_mpz_t(), rec.residual.get_mpz_t(), p);
      ++e;
    }
    rec.small.push_back({p, e});
  }
  return rec;
}

// g with every prime factor <= limit divided out.
BigInt strip_small(BigInt g, uint64_t limit) {
  auto primes = small_primes(static_cast<uint32_t>(std::max<uint64_t>(limit, 2)));
  for (uint32_t p : *primes) {
    if (p > limit) break;
    while (g != 0 && mpz_divisible_ui_p(g.get_mpz_t(), p)) {
      mpz_divexact_ui(g.get_mpz_t(), g.get_mpz_t(), p);
    }
  }
  return g;
}

std::string describe_factor(const BigInt& g) {
  if (big_fits_u64(g) && g > 1) {
    return std::to_string(factorize_64(big_to_u64(g)).factors.front().prime);
  }
  return g.get_str();
}

}  // namespace

std::string to_string(AdmissibleVariant v) {
  return v == AdmissibleVariant::kLemma22 ? "lemma22" : "lemma31";
}

AdmissibleVariant parse_admissible_variant(const std::string& s) {
  if (s == "lemma22") return AdmissibleVariant::kLemma22;
  if (s == "lemma31") return AdmissibleVariant::kLemma31;
  throw_invalid("unknown admissible variant '" + s + "' (expected lemma22 or lemma31)");
}

uint64_t admissible_threshold(unsigned k, AdmissibleVariant v) {
  return (v == AdmissibleVariant::kLemma22 ? 2u : 4u) * static_cast<uint64_t>(k);
}

BigInt admissible_modulus(uint64_t threshold) {
  BigInt K = 4;
  for (uint32_t p : *small_primes(static_cast<uint32_t>(std::max<uint64_t>(threshold, 2)))) {
    if (p >= threshold) break;
    K *= p;
  }
  return K;
}

uint64_t AdmissibleSet::witness(unsigned i, unsigned j) const {
  for (const auto& w : witnesses) {
    if (w.pair.i == i && w.pair.j == j) return w.prime;
  }
  return 0;
}

AdmissibleSet build_admissible(unsigned k, AdmissibleVariant variant,
                               const AdmissibleBuildOptions& options) {
  if (k < 2) throw_invalid("build_admissible: k must be > 1");
  if (k > options.max_k) {
    throw_bound("build_admissible: k = " + std::to_string(k) + " exceeds the cap of " +
                std::to_string(options.max_k));
  }
  AdmissibleSet set;
  set.k = k;
  set.variant = variant;
  set.threshold = admissible_threshold(k, variant);
  set.K = admissible_modulus(set.threshold);
  set.crt_prime_bound = options.crt_prime_bound;
  if (options.crt_prime_bound <= set.threshold + 2 * k * k) {
    throw_invalid("build_admissible: CRT prime bound too small for k = " + std::to_string(k));
  }
  set.h.push_back(0);
  const BigInt& K = set.K;
  auto primes = small_primes(static_cast<uint32_t>(options.crt_prime_bound));

  for (unsigned r = 1; r < k; ++r) {
    BuildRound round;
    round.r = r;
    std::set<uint64_t> X;
    for (const auto& d : set.differences) {
      for (const auto& f : d.small) {
        if (f.prime > set.threshold) X.insert(f.prime);
      }
      if (d.residual > 1) round.residuals.push_back(d.residual);
    }
    round.X.assign(X.begin(), X.end());

    BigInt prod_x = 1;
    for (uint64_t p : round.X) prod_x *= big_from_u64(p);
    BigInt k_inv = inverse_mod(mod(K, prod_x), prod_x);
    for (const auto& hi : set.h) round.b_i.push_back(mod(hi * k_inv, prod_x));

    CongruenceSystem system;
    for (uint64_t p : round.X) {
      std::vector<bool> used(p, false);
      for (const auto& bi : round.b_i) used[mod_u64(bi, p)] = true;
      uint64_t a = 0;
      while (used[a]) ++a;  // r < k < p leaves a free class
      round.a_p.emplace_back(p, a);
      system.add(big_from_u64(a), big_from_u64(p));
    }

    for (uint32_t p : *primes) {
      if (round.q.size() == r) break;
      if (p <= set.threshold || X.count(p)) continue;
      round.q.push_back(p);
    }
    if (round.q.size() != r) throw Error(ErrorCode::kInternal, "ran out of fresh primes");
    for (unsigned i = 0; i < r; ++i) {
      BigInt q = big_from_u64(round.q[i]);
      BigInt q2 = q * q;
      BigInt ci = mod(set.h[i] * inverse_mod(mod(K, q2), q2), q2);
      round.c.push_back(ci);
      system.add(ci + q, q2);
    }

    Congruence sol = crt_solve(system);
    round.crt_residue = sol.residue;
    round.crt_modulus = sol.modulus;
    BigInt lo;
    mpz_fdiv_q(lo.get_mpz_t(), set.h.back().get_mpz_t(), K.get_mpz_t());
    lo += 1;  // b > h_r / K
    BigInt b = lo + mod(sol.residue - lo, sol.modulus);
    BigInt g;
    while (true) {
      bool clean = true;
      for (const auto& R : round.residuals) {
        for (const auto& hs : set.h) {
          BigInt diff = K * b - hs;
          mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), R.get_mpz_t());
          if (g != 1) {
            clean = false;
            break;
          }
        }
        if (!clean) break;
      }
      if (clean) break;
      b += sol.modulus;
      ++round.rejected;
    }
    round.b = b;
    BigInt h_next = K * b;
    for (unsigned s = 0; s < r; ++s) {
      IndexPair pair{s, r};
      set.differences.push_back(split_difference(pair, h_next - set.h[s], options.crt_prime_bound));
      set.witnesses.push_back({pair, round.q[s]});
    }
    set.h.push_back(h_next);
    set.trace.push_back(std::move(round));
  }
  return set;
}

bool is_admissible(std::span<const BigInt> h) {
  std::vector<BigInt> sorted(h.begin(), h.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw_invalid("is_admissible: entries must be distinct");
  }
  const uint64_t k = h.size();
  if (k == 0) return true;
  for (uint32_t p : *small_primes(static_cast<uint32_t>(std::max<uint64_t>(k, 2)))) {
    if (p > k) break;
    std::vector<bool> seen(p, false);
    uint64_t distinct = 0;
    for (const auto& x : h) {
      uint64_t r = mod_u64(x, p);
      if (!seen[r]) {
        seen[r] = true;
        ++distinct;
      }
    }
    if (distinct == p) return false;
  }
  return true;
}

namespace {

// (i)-(iii) plus witness distinctness on h[0..count).
void check_core(const AdmissibleSet& set, size_t count, Report& report) {
  const auto& h = set.h;
  std::string bad;
  for (size_t i = 0; i < count && bad.empty(); ++i) {
    if (!mpz_divisible_p(h[i].get_mpz_t(), set.K.get_mpz_t())) {
      bad = "h_" + std::to_string(i + 1) + " = " + h[i].get_str() + " is not a multiple of K";
    }
  }
  report.add("(i) multiples of K", bad.empty(), bad.empty() ? "K = " + set.K.get_str() : bad);

  bad.clear();
  for (uint32_t p : *small_primes(static_cast<uint32_t>(std::max<uint64_t>(set.threshold, 2)))) {
    if (p >= set.threshold || !bad.empty()) break;
    for (size_t i = 0; i < count; ++i) {
      if (mod_u64(h[i], p) != 0) {
        bad = "h_" + std::to_string(i + 1) + " is nonzero mod " + std::to_string(p);
        break;
      }
    }
  }
  report.add("small-prime residues", bad.empty(), bad);

  bad.clear();
  std::set<uint64_t> distinct;
  size_t pairs = 0;
  for (unsigned i = 0; i < count && bad.empty(); ++i) {
    for (unsigned j = i + 1; j < count; ++j) {
      ++pairs;
      uint64_t p = set.witness(i, j);
      std::string name = pair_name({i, j});
      if (p == 0) {
        bad = "no witness for pair " + name;
      } else if (p <= set.threshold || !is_prime_64(p)) {
        bad = "witness " + std::to_string(p) + " for " + name + " is not a prime above " +
              std::to_string(set.threshold);
      } else if (p_adic_valuation(big_from_u64(p), h[j] - h[i]) != 1) {
        bad = std::to_string(p) + " does not exactly divide h_" + std::to_string(j + 1) + " - h_" +
              std::to_string(i + 1);
      }
      if (!bad.empty()) break;
      distinct.insert(p);
    }
  }
  report.add("(ii) exact large witness per pair", bad.empty(), bad);
  report.add("witnesses distinct", bad.empty() && distinct.size() == pairs,
             std::to_string(distinct.size()) + " distinct of " + std::to_string(pairs) + " pairs");

  // (iii): gcd of two distinct differences has no prime factor above the
  // threshold, i.e. nothing is left once primes <= threshold are divided out.
  std::vector<std::pair<IndexPair, BigInt>> diffs;
  for (unsigned i = 0; i < count; ++i) {
    for (unsigned j = i + 1; j < count; ++j) diffs.emplace_back(IndexPair{i, j}, h[j] - h[i]);
  }
  bad.clear();
  BigInt g;
  for (size_t a = 0; a < diffs.size() && bad.empty(); ++a) {
    for (size_t b = a + 1; b < diffs.size(); ++b) {
      mpz_gcd(g.get_mpz_t(), diffs[a].second.get_mpz_t(), diffs[b].second.get_mpz_t());
      BigInt rest = strip_small(g, set.threshold);
      if (rest != 1) {
        bad = "prime " + describe_factor(rest) + " > " + std::to_string(set.threshold) +
              " divides both h" + pair_name(diffs[a].first) + " and h" + pair_name(diffs[b].first);
        break;
      }
    }
  }
  report.add("(iii) no shared large prime", bad.empty(), bad);
}

void check_trace(const AdmissibleSet& set, Report& report) {
  std::string bad;
  const BigInt& K = set.K;
  for (const auto& round : set.trace) {
    if (!bad.empty()) break;
    const unsigned r = round.r;
    std::string tag = "round " + std::to_string(r) + ": ";
    if (r + 1 > set.h.size() || round.b_i.size() != r || round.q.size() != r || round.c.size() != r) {
      bad = tag + "inconsistent sizes";
      break;
    }
    // X_r and residuals recomputed from scratch.
    std::set<uint64_t> X;
    std::vector<BigInt> residuals;
    for (unsigned i = 0; i < r; ++i) {
      for (unsigned j = i + 1; j < r; ++j) {
        DifferenceRecord d = split_difference({i, j}, set.h[j] - set.h[i], set.crt_prime_bound);
        for (const auto& f : d.small) {
          if (f.prime > set.threshold) X.insert(f.prime);
        }
        if (d.residual > 1) residuals.push_back(d.residual);
      }
    }
    if (std::vector<uint64_t>(X.begin(), X.end()) != round.X) {
      bad = tag + "recorded X differs from the recomputed set";
      break;
    }
    BigInt prod_x = 1;
    for (uint64_t p : round.X) prod_x *= big_from_u64(p);
    const BigInt& b = round.b;
    for (unsigned i = 0; i < r && bad.empty(); ++i) {
      if (mod(K * round.b_i[i] - set.h[i], prod_x) != 0) bad = tag + "K b_i != h_i mod prod X";
    }
    for (const auto& [p, a] : round.a_p) {
      if (!bad.empty()) break;
      if (mod_u64(b, p) != a) bad = tag + "b != a_p mod " + std::to_string(p);
      for (const auto& bi : round.b_i) {
        if (mod_u64(bi, p) == a) bad = tag + "a_p collides with some b_i mod " + std::to_string(p);
      }
    }
    for (unsigned i = 0; i < r && bad.empty(); ++i) {
      uint64_t q = round.q[i];
      BigInt qb = big_from_u64(q), q2 = qb * qb;
      if (q <= set.threshold || X.count(q) || !is_prime_64(q)) {
        bad = tag + "q_" + std::to_string(i + 1) + " = " + std::to_string(q) + " is not a fresh large prime";
      } else if (mod(K * round.c[i] - set.h[i], q2) != 0) {
        bad = tag + "K c_i != h_i mod q_i^2";
      } else if (mod(b - round.c[i] - qb, q2) != 0) {
        bad = tag + "b != c_i + q_i mod q_i^2";
      } else if (p_adic_valuation(qb, set.h[r] - set.h[i]) != 1) {
        bad = tag + "q_i does not exactly divide h_{r+1} - h_i";
      }
    }
    if (!bad.empty()) break;
    BigInt g;
    for (const auto& R : residuals) {
      for (unsigned s = 0; s < r; ++s) {
        BigInt d = K * b - set.h[s];
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), R.get_mpz_t());
        if (g != 1) bad = tag + "new difference shares a factor with an earlier residual";
      }
    }
    if (set.h[r] != K * b) bad = tag + "h_{r+1} != K b";
    if (K * b <= set.h[r - 1]) bad = tag + "h_{r+1} <= h_r";
  }
  report.add("builder trace", bad.empty(),
             bad.empty() ? std::to_string(set.trace.size()) + " rounds replayed" : bad);
}

}  // namespace

Report verify_prefix(const AdmissibleSet& set, size_t count) {
  Report report;
  if (count > set.h.size()) throw_invalid("verify_prefix: count exceeds the set size");
  check_core(set, count, report);
  return report;
}

Report verify_properties(const AdmissibleSet& set) {
  Report report;
  std::string shape;
  if (set.k < 2) {
    shape = "k = " + std::to_string(set.k) + ": k > 1 is required";
  } else if (set.h.size() != set.k) {
    shape = "expected " + std::to_string(set.k) + " elements, got " + std::to_string(set.h.size());
  } else if (set.h.front() != 0) {
    shape = "h_1 must be 0";
  } else {
    for (size_t i = 1; i < set.h.size(); ++i) {
      if (set.h[i] <= set.h[i - 1]) shape = "h is not strictly increasing at position " + std::to_string(i + 1);
    }
  }
  report.add("shape", shape.empty(), shape);
  if (!shape.empty()) return report;

  bool k_ok = set.threshold == admissible_threshold(set.k, set.variant) &&
              set.K == admissible_modulus(set.threshold);
  report.add("modulus K", k_ok,
             k_ok ? "" : "expected threshold " + std::to_string(admissible_threshold(set.k, set.variant)) +
                             " and K = " + admissible_modulus(admissible_threshold(set.k, set.variant)).get_str());
  check_core(set, set.h.size(), report);

  bool adm = false;
  std::string adm_detail;
  try {
    adm = is_admissible(set.h);
  } catch (const Error& e) {
    adm_detail = e.what();
  }
  report.add("admissible", adm, adm_detail);
  if (!set.trace.empty()) check_trace(set, report);
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json big_array(const std::vector<BigInt>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

std::vector<BigInt> big_vector(const json& a) {
  std::vector<BigInt> out;
  for (const auto& x : a) out.push_back(big_from_string(x.get<std::string>()));
  return out;
}

}  // namespace

std::string to_json(const AdmissibleSet& set) {
  json j;
  j["schema"] = "primesym.admissible";
  j["version"] = 1;
  j["k"] = set.k;
  j["variant"] = to_string(set.variant);
  j["threshold"] = set.threshold;
  j["K"] = set.K.get_str();
  j["h"] = big_array(set.h);
  json w = json::array();
  for (const auto& x : set.witnesses) w.push_back({{"i", x.pair.i}, {"j", x.pair.j}, {"p", x.prime}});
  j["witnesses"] = w;
  j["crt_prime_bound"] = set.crt_prime_bound;
  json diffs = json::array();
  for (const auto& d : set.differences) {
    json small = json::array();
    for (const auto& f : d.small) small.push_back({f.prime, f.exponent});
    diffs.push_back({{"i", d.pair.i}, {"j", d.pair.j}, {"small", small}, {"residual", d.residual.get_str()}});
  }
  j["differences"] = diffs;
  json trace = json::array();
  for (const auto& r : set.trace) {
    json ap = json::array();
    for (const auto& [p, a] : r.a_p) ap.push_back({p, a});
    trace.push_back({{"r", r.r},
                     {"X", r.X},
                     {"residuals", big_array(r.residuals)},
                     {"b_i", big_array(r.b_i)},
                     {"a_p", ap},
                     {"q", r.q},
                     {"c", big_array(r.c)},
                     {"crt_residue", r.crt_residue.get_str()},
                     {"crt_modulus", r.crt_modulus.get_str()},
                     {"b", r.b.get_str()},
                     {"rejected", r.rejected}});
  }
  j["trace"] = trace;
  return j.dump(2);
}

AdmissibleSet admissible_from_json(const std::string& text) {
  AdmissibleSet set;
  try {
    json j = json::parse(text);
    if (j.at("schema") != "primesym.admissible") throw_invalid("admissible set: wrong schema");
    if (j.at("version") != 1) throw_invalid("admissible set: unsupported version");
    set.k = j.at("k").get<unsigned>();
    set.variant = parse_admissible_variant(j.at("variant").get<std::string>());
    set.threshold = j.at("threshold").get<uint64_t>();
    set.K = big_from_string(j.at("K").get<std::string>());
    set.h = big_vector(j.at("h"));
    for (const auto& w : j.at("witnesses")) {
      set.witnesses.push_back({{w.at("i").get<unsigned>(), w.at("j").get<unsigned>()}, w.at("p").get<uint64_t>()});
    }
    set.crt_prime_bound = j.value("crt_prime_bound", uint64_t{0});
    if (j.contains("differences")) {
      for (const auto& d : j.at("differences")) {
        DifferenceRecord rec;
        rec.pair = {d.at("i").get<unsigned>(), d.at("j").get<unsigned>()};
        for (const auto& f : d.at("small")) rec.small.push_back({f.at(0).get<uint64_t>(), f.at(1).get<unsigned>()});
        rec.residual = big_from_string(d.at("residual").get<std::string>());
        set.differences.push_back(std::move(rec));
      }
    }
    if (j.contains("trace")) {
      for (const auto& t : j.at("trace")) {
        BuildRound r;
        r.r = t.at("r").get<unsigned>();
        r.X = t.at("X").get<std::vector<uint64_t>>();
        r.residuals = big_vector(t.at("residuals"));
        r.b_i = big_vector(t.at("b_i"));
        for (const auto& ap : t.at("a_p")) r.a_p.emplace_back(ap.at(0).get<uint64_t>(), ap.at(1).get<uint64_t>());
        r.q = t.at("q").get<std::vector<uint64_t>>();
        r.c = big_vector(t.at("c"));
        r.crt_residue = big_from_string(t.at("crt_residue").get<std::string>());
        r.crt_modulus = big_from_string(t.at("crt_modulus").get<std::string>());
        r.b = big_from_string(t.at("b").get<std::string>());
        r.rejected = t.at("rejected").get<uint64_t>();
        set.trace.push_back(std::move(r));
      }
    }
  } catch (const json::exception& e) {
    throw_invalid(std::string("admissible set JSON: ") + e.what());
  }
  return set;
}

}  // namespace primesym

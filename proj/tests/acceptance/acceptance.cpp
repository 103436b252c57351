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

// Acceptance runner: one PASS/FAIL line per criterion.

#include <gmpxx.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "primesym/admissible.hpp"
#include "primesym/arith.hpp"
#include "primesym/certificate.hpp"
#include "primesym/error.hpp"
#include "primesym/pattern.hpp"
#include "primesym/primes.hpp"
#include "primesym/primroot.hpp"

using namespace primesym;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;  // 0: no time limit
  bool extended;
  std::function<Outcome(unsigned workers)> run;
};

// Independent checks on a reported window: consecutive primes, gap-free,
// pairwise symbols from GMP.
std::string check_window(const std::vector<uint64_t>& ps, int d1, int d2) {
  for (size_t i = 0; i < ps.size(); ++i) {
    mpz_class v(std::to_string(ps[i]));
    if (!mpz_probab_prime_p(v.get_mpz_t(), 30)) return std::to_string(ps[i]) + " is not prime";
    if (i == 0) continue;
    mpz_class x(std::to_string(ps[i - 1]));
    mpz_nextprime(x.get_mpz_t(), x.get_mpz_t());
    if (x != v) return "window skips the prime " + x.get_str();
  }
  for (size_t i = 0; i < ps.size(); ++i) {
    for (size_t j = i + 1; j < ps.size(); ++j) {
      mpz_class a(std::to_string(ps[i])), b(std::to_string(ps[j]));
      if (mpz_jacobi(a.get_mpz_t(), b.get_mpz_t()) != d1 || mpz_jacobi(b.get_mpz_t(), a.get_mpz_t()) != d2) {
        return "pair (" + std::to_string(i) + "," + std::to_string(j) + ") has the wrong symbols";
      }
    }
  }
  return {};
}

// pi(x) by a plain sieve of Eratosthenes, independent of the library.
uint64_t oracle_pi(uint64_t x) {
  std::vector<bool> composite(x + 1, false);
  uint64_t count = 0;
  for (uint64_t i = 2; i <= x; ++i) {
    if (composite[i]) continue;
    ++count;
    for (uint64_t j = i * i; j <= x; j += i) composite[j] = true;
  }
  return count;
}

std::string join(const std::vector<uint64_t>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

Outcome golden_search(unsigned m, int d1, int d2, uint64_t want_n, const std::vector<uint64_t>& want_primes,
                      unsigned workers) {
  PrimeIndexer idx;
  SearchOptions opts;
  opts.n_min = 2;
  opts.limit = 1;
  opts.workers = workers;
  std::vector<MatchRecord> hits;
  find_matches(idx, Predicate::signs(SignPattern::uniform(m, d1, d2)), opts, [&](const MatchRecord& r) {
    hits.push_back(r);
    return false;
  });
  if (hits.empty()) return {false, "no match found"};
  const auto& h = hits.front();
  std::string detail = "n = " + std::to_string(h.n) + ", primes " + join(h.primes);
  if (h.n != want_n || h.primes != want_primes) return {false, detail + "; expected n = " + std::to_string(want_n)};
  std::string bad = check_window(h.primes, d1, d2);
  if (!bad.empty()) return {false, bad};
  // The reported index is the true prime index.
  if (oracle_pi(h.primes.front()) != want_n) return {false, "plain-sieve pi disagrees with n"};
  return {true, detail};
}

Outcome ac_primroot(unsigned workers) {
  PrimeIndexer idx;
  SearchOptions opts;
  opts.n_min = 1;
  opts.limit = 1;
  opts.workers = workers;
  std::vector<MatchRecord> hits;
  find_matches(idx, Predicate::primroot(3), opts, [&](const MatchRecord& r) {
    hits.push_back(r);
    return false;
  });
  if (hits.empty()) return {false, "no match"};
  const auto& h = hits.front();
  std::string detail = "n = " + std::to_string(h.n) + ", primes " + join(h.primes);
  if (h.n != 8560 || h.primes[0] != 88259 || h.primes[1] != 88261 || h.primes[2] != 88289) {
    return {false, detail};
  }
  // Exhaustive order check for every ordered pair.
  for (size_t i = 0; i < h.primes.size(); ++i) {
    for (size_t j = 0; j < h.primes.size(); ++j) {
      if (i == j) continue;
      uint64_t p = h.primes[j], g = h.primes[i] % p, x = g, ord = 1;
      while (x != 1) {
        x = x * g % p;
        ++ord;
      }
      if (ord != p - 1) return {false, "order check failed for pair " + std::to_string(i) + "," + std::to_string(j)};
    }
  }
  return {true, detail};
}

Outcome ac_euler(unsigned) {
  uint64_t checked = 0, mismatches = 0;
  for (uint64_t p = 3; p < 10000; p += 2) {
    if (!is_prime_64(p)) continue;
    for (uint64_t a = 0; a < p; ++a) {
      uint64_t e = mod_pow(a, (p - 1) / 2, p);
      int want = e == 0 ? 0 : (e == 1 ? 1 : -1);
      mismatches += jacobi_u64(a, p) != want;
      ++checked;
    }
  }
  return {mismatches == 0, std::to_string(checked) + " residues, " + std::to_string(mismatches) + " mismatches"};
}

Outcome ac_reciprocity(unsigned) {
  std::mt19937_64 rng(20261019);
  uint64_t pairs = 0, failures = 0;
  auto odd = [&] { return (rng() >> 3) | 1; };
  while (pairs < 100000) {
    uint64_t m = odd() >> 2 | 1, n = odd() >> 2 | 1;
    if (std::gcd(m, n) != 1 || m == 1 || n == 1) continue;
    ++pairs;
    int jm = jacobi_u64(m, n), jn = jacobi_u64(n, m);
    int sign = (((m - 1) / 2) % 2 && ((n - 1) / 2) % 2) ? -1 : 1;
    bool ok = jm * jn == sign;
    // Supplements.
    ok &= jacobi(-1, n) == ((n % 4 == 1) ? 1 : -1);
    ok &= jacobi(2, n) == ((n % 8 == 1 || n % 8 == 7) ? 1 : -1);
    // Multiplicativity in the top and bottom arguments.
    uint64_t a = rng() >> 40, b = rng() >> 40;
    ok &= jacobi(mpz_class(mpz_class(a) * b), mpz_class(n)) == jacobi_u64(a, n) * jacobi_u64(b, n);
    ok &= jacobi(mpz_class(a), mpz_class(mpz_class(m) * n)) == jacobi_u64(a, m) * jacobi_u64(a, n);
    // Agreement with GMP.
    mpz_class x(std::to_string(m)), y(std::to_string(n));
    ok &= jm == mpz_jacobi(x.get_mpz_t(), y.get_mpz_t());
    failures += !ok;
  }
  return {failures == 0, std::to_string(pairs) + " pairs, " + std::to_string(failures) + " failures"};
}

Outcome ac_admissible(unsigned) {
  std::ostringstream os;
  bool ok = true;
  for (auto v : {AdmissibleVariant::kLemma22, AdmissibleVariant::kLemma31}) {
    for (unsigned k = 2; k <= 6; ++k) {
      auto set = build_admissible(k, v);
      auto report = verify_properties(set);
      bool adm = is_admissible(set.h);
      if (!report.passed() || !adm) {
        ok = false;
        const auto* f = report.first_failure();
        os << to_string(v) << " k=" << k << " fails " << (f ? f->name + ": " + f->detail : "admissibility") << "; ";
      }
    }
  }
  auto a = build_admissible(2, AdmissibleVariant::kLemma22);
  auto b = build_admissible(2, AdmissibleVariant::kLemma31);
  bool goldens = a.h == std::vector<BigInt>{0, 120} && b.h == std::vector<BigInt>{0, 9240};
  if (!goldens) os << "k=2 goldens differ: {0," << a.h[1].get_str() << "} {0," << b.h[1].get_str() << "}";
  if (ok && goldens) os << "k=2..6 both variants pass; k=2 sets {0,120} and {0,9240}";
  return {ok && goldens, os.str()};
}

Outcome ac_thm13(unsigned workers) {
  auto set = build_admissible(2, AdmissibleVariant::kLemma22);
  std::ostringstream os;
  bool ok = true;
  for (auto [d1, d2] : {std::pair{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
    auto c = build_certificate(set, CertVariant::kThm13, 1, d1, d2);
    bool verified = verify_certificate(c).passed();
    auto gaps = gap_set(c.h, c.variant);
    ScanOptions opts;
    opts.n_min = 1;
    opts.n_max = 10'000'000;
    opts.max_hits = 10;
    opts.workers = workers;
    uint64_t independent_failures = 0;
    auto st = scan_progression(c, opts, [&](const ScanHit& h) {
      // Re-derive the hit with GMP alone.
      mpz_class x = c.W * h.n + c.b, y = x + 120;
      bool good = mpz_probab_prime_p(x.get_mpz_t(), 30) && mpz_probab_prime_p(y.get_mpz_t(), 30) &&
                  mpz_jacobi(x.get_mpz_t(), y.get_mpz_t()) == d1 && mpz_jacobi(y.get_mpz_t(), x.get_mpz_t()) == d2;
      for (uint64_t a : gaps) {
        mpz_class z = x + a;
        good &= !mpz_probab_prime_p(z.get_mpz_t(), 30);
      }
      independent_failures += !good;
      return true;
    });
    bool this_ok = verified && st.symbol_violations == 0 && st.covering_violations == 0 &&
                   st.class_violations == 0 && independent_failures == 0 &&
                   (st.hits >= 10 || st.n_last == opts.n_max);
    ok &= this_ok;
    os << "(" << (d1 > 0 ? "+" : "-") << "," << (d2 > 0 ? "+" : "-") << "): " << st.hits << " hits by n="
       << st.n_last << ", " << st.symbol_violations + independent_failures << " symbol, " << st.covering_violations
       << " covering violations" << (verified ? "" : ", verification FAILED") << "; ";
  }
  return {ok, os.str()};
}

Outcome ac_lemma32(unsigned workers) {
  auto set = build_admissible(2, AdmissibleVariant::kLemma31);
  auto c = build_certificate(set, CertVariant::kLemma32, 1, -1, -1);
  bool verified = verify_certificate(c).passed();
  bool symbols = true;
  for (size_t i = 0; i < c.h.size(); ++i) {
    for (size_t j = 0; j < c.h.size(); ++j) {
      if (i == j) continue;
      mpz_class d = mpz_class(std::to_string(c.h[i])) - mpz_class(std::to_string(c.h[j]));
      mpz_class v = c.b + mpz_class(std::to_string(c.h[j]));
      symbols &= mpz_jacobi(d.get_mpz_t(), v.get_mpz_t()) == -1;
    }
  }
  ScanOptions opts;
  opts.n_min = 1;
  opts.n_max = 10000;
  opts.test_primality = false;
  opts.workers = workers;
  auto st = scan_progression(c, opts, [](const ScanHit&) { return true; });
  // Spot-check the covering with GMP on a sample of n.
  uint64_t spot_failures = 0;
  for (uint64_t n : {1ULL, 17ULL, 4096ULL, 10000ULL}) {
    mpz_class base = c.W * n + c.b;
    for (const auto& e : c.cover) {
      mpz_class z = base + mpz_class(std::to_string(e.a));
      spot_failures += !mpz_divisible_ui_p(z.get_mpz_t(), e.q);
    }
    for (uint64_t a : c.cover_by_four) {
      mpz_class z = base + mpz_class(std::to_string(a));
      spot_failures += !mpz_divisible_ui_p(z.get_mpz_t(), 4);
    }
  }
  bool ok = verified && symbols && st.covering_violations == 0 && st.class_violations == 0 &&
            spot_failures == 0 && st.scanned == 10000;
  std::ostringstream os;
  os << "symbols " << (symbols ? "-1 for both ordered pairs" : "WRONG") << ", " << st.covering_checks
     << " covering checks over " << st.scanned << " n, " << st.covering_violations + spot_failures
     << " violations" << (verified ? "" : ", verification FAILED");
  return {ok, os.str()};
}

Outcome ac_primroot_oracle(unsigned) {
  uint64_t mismatches = 0, bad_counts = 0, primes = 0;
  for (uint64_t p = 3; p < 1000; p += 2) {
    if (!is_prime_64(p)) continue;
    ++primes;
    uint64_t count = 0;
    for (uint64_t g = 1; g < p; ++g) {
      uint64_t x = g, ord = 1;
      while (x != 1) {
        x = x * g % p;
        ++ord;
      }
      bool got = is_primitive_root(static_cast<int64_t>(g), p);
      mismatches += got != (ord == p - 1);
      count += got;
    }
    uint64_t phi = p - 1, n = p - 1;
    for (uint64_t d = 2; d * d <= n; ++d) {
      if (n % d) continue;
      while (n % d == 0) n /= d;
      phi -= phi / d;
    }
    if (n > 1) phi -= phi / n;
    bad_counts += count != phi;
  }
  return {mismatches == 0 && bad_counts == 0, std::to_string(primes) + " primes, " + std::to_string(mismatches) +
                                                   " mismatches, " + std::to_string(bad_counts) + " wrong counts"};
}

Outcome ac_engine(unsigned workers) {
  std::vector<uint64_t> ps;
  {
    std::vector<bool> comp(200000, false);
    for (uint64_t i = 2; i < comp.size(); ++i) {
      if (comp[i]) continue;
      ps.push_back(i);
      for (uint64_t j = i * i; j < comp.size(); j += i) comp[j] = true;
    }
  }
  auto euler = [](uint64_t a, uint64_t p) {
    uint64_t e = mod_pow(a, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
  };
  PrimeIndexer idx;
  std::ostringstream os;
  bool ok = true;
  unsigned par = std::max(4u, workers);
  for (auto [d1, d2] : {std::pair{1, 1}, {-1, -1}, {-1, 1}, {1, -1}}) {
    std::vector<uint64_t> want, got;
    for (uint64_t n = 2; n <= 10000; ++n) {
      uint64_t p = ps[n - 1], q = ps[n];
      if (euler(p, q) == d1 && euler(q, p) == d2) want.push_back(n);
    }
    SearchOptions opts;
    opts.n_min = 2;
    opts.n_max = 10000;
    opts.workers = par;
    opts.batch_values = 1 << 12;
    find_matches(idx, Predicate::signs(SignPattern::uniform(1, d1, d2)), opts, [&](const MatchRecord& r) {
      got.push_back(r.n);
      return true;
    });
    ok &= got == want;
    os << (d1 > 0 ? "+" : "-") << (d2 > 0 ? "+" : "-") << ": " << got.size() << (got == want ? " equal" : " DIFFER")
       << "; ";
  }
  os << par << " workers";
  return {ok, os.str()};
}

std::vector<Criterion> criteria() {
  return {
      {"AC1", "m=6 (+1,+1) first n > 1 is 178633", 60, false,
       [](unsigned w) {
         return golden_search(6, 1, 1, 178633, {2434589, 2434609, 2434613, 2434657, 2434669, 2434673, 2434681}, w);
       }},
      {"AC2", "m=5 (-1,-1) first n > 1 is 2066981", 300, false,
       [](unsigned w) {
         return golden_search(5, -1, -1, 2066981, {33611561, 33611573, 33611603, 33611621, 33611629, 33611653}, w);
       }},
      {"AC3", "m=6 (-1,+1) first n > 1 is 7455790", 900, false,
       [](unsigned w) {
         return golden_search(6, -1, 1, 7455790,
                              {131449631, 131449639, 131449679, 131449691, 131449727, 131449739, 131449751}, w);
       }},
      {"AC4", "m=5 (+1,-1) first n > 1 is 59753753", 3600, true,
       [](unsigned w) {
         return golden_search(5, 1, -1, 59753753,
                              {1185350899, 1185350939, 1185350983, 1185351031, 1185351059, 1185351091}, w);
       }},
      {"AC5", "m=3 pairwise primitive roots first n is 8560", 10, false, ac_primroot},
      {"AC6", "Jacobi symbol vs Euler criterion, p < 10^4", 0, false, ac_euler},
      {"AC7", "reciprocity laws on 10^5 random pairs", 0, false, ac_reciprocity},
      {"AC8", "admissible builder k = 2..6", 0, false, ac_admissible},
      {"AC9", "thm13 certificates end to end", 0, false, ac_thm13},
      {"AC10", "lemma32 certificate symbols and covering", 0, false, ac_lemma32},
      {"AC11", "primitive roots vs exhaustive orders, p < 1000", 0, false, ac_primroot_oracle},
      {"AC12", "parallel search equals brute force, m = 1", 0, false, ac_engine},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primesym acceptance suite"};
  bool extended = false;
#ifdef PRIMESYM_EXTENDED_DEFAULT
  extended = true;
#endif
  if (const char* env = std::getenv("PRIMESYM_EXTENDED")) extended = extended || std::string(env) == "1";
  std::vector<std::string> only;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool list = false;
  app.add_flag("--extended", extended, "Also run the extended-tier criterion (long)");
  app.add_option("--only", only, "Run only these criteria (e.g. AC1 AC9)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--list", list, "List criteria and exit");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : criteria()) {
    if (list) {
      std::printf("%-5s %s%s\n", c.id.c_str(), c.title.c_str(), c.extended ? " [extended]" : "");
      continue;
    }
    bool selected = only.empty() || std::find(only.begin(), only.end(), c.id) != only.end();
    if (!selected) continue;
    if (c.extended && !extended && only.empty()) {
      std::printf("%-5s SKIP  %s (extended tier; pass --extended)\n", c.id.c_str(), c.title.c_str());
      std::fflush(stdout);
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(workers);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = std::to_string(secs).substr(0, std::to_string(secs).find('.') + 2) + " s";
    if (c.budget_seconds > 0) {
      timing += " of " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
      if (secs > c.budget_seconds) {
        o.passed = false;
        o.detail += " (over time budget)";
      }
    }
    std::printf("%-5s %s  %s: %s [%s]\n", c.id.c_str(), o.passed ? "PASS" : "FAIL", c.title.c_str(),
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}

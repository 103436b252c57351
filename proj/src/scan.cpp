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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "primesym/certificate.hpp"
#include "primesym/error.hpp"
#include "primesym/primes.hpp"

namespace primesym {

using json = nlohmann::json;

bool ScanHit::ok() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const ScanPair& p) { return p.ok(); });
}

std::string to_json(const ScanHit& hit) {
  json entries = json::array();
  for (const auto& e : hit.entries) {
    json x = {{"s", e.s + 1}, {"value", e.value.get_str()}, {"prime", e.prime}};
    if (e.prime && e.probable) x["probable"] = true;
    entries.push_back(x);
  }
  json window = json::array();
  for (unsigned s : hit.window) window.push_back(s + 1);
  json pairs = json::array();
  for (const auto& p : hit.pairs) {
    pairs.push_back({{"s", p.s + 1},
                     {"t", p.t + 1},
                     {"predicted", {p.predicted_st, p.predicted_ts}},
                     {"observed", {p.observed_st, p.observed_ts}}});
  }
  json j = {{"n", hit.n}, {"entries", entries}, {"window", window},
            {"pairs", pairs}, {"ok", hit.ok()}, {"probable", hit.probable}};
  return j.dump();
}

namespace {

constexpr int kPrimalityReps = 25;

uint64_t fnv1a(const std::string& s) {
  uint64_t x = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    x ^= ch;
    x *= 1099511628211ULL;
  }
  return x;
}

std::string fingerprint(const Certificate& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(to_string(c.variant) + ":" + c.W.get_str() + ":" + c.b.get_str())));
  return buf;
}

uint64_t inverse_mod_u64(uint64_t a, uint64_t p) { return mod_pow(a, p - 2, p); }

struct Residue {
  uint64_t modulus;
  uint64_t w;  // W mod modulus
  uint64_t c;  // constant term mod modulus
};

bool divides_at(const Residue& r, uint64_t n) {
  return (mul_mod(r.w, n % r.modulus, r.modulus) + r.c) % r.modulus == 0;
}

struct Plan {
  const Certificate* cert;
  bool thm;
  int pred_st, pred_ts;
  uint64_t want8;
  std::vector<Residue> cover;   // one per gap offset, including the mod-4 ones
  std::vector<Residue> cls;     // W n + b + h_s mod 8
  struct Root {
    uint32_t p;
    std::vector<uint32_t> n0;  // n with p | W n + b + h_s
  };
  std::vector<Root> roots;
};

Plan make_plan(const Certificate& c, const ScanOptions& opt) {
  Plan plan;
  plan.cert = &c;
  plan.thm = c.variant == CertVariant::kThm13;
  plan.pred_st = plan.thm ? c.d1 : -1;
  plan.pred_ts = plan.thm ? c.d2 : -1;
  plan.want8 = plan.thm ? (c.delta == 1 ? 1 : 7) : 1;
  for (const auto& e : c.cover) {
    plan.cover.push_back({e.q, mpz_fdiv_ui(c.W.get_mpz_t(), e.q), mpz_fdiv_ui(BigInt(c.b + big_from_u64(e.a)).get_mpz_t(), e.q)});
  }
  for (uint64_t a : c.cover_by_four) {
    plan.cover.push_back({4, mpz_fdiv_ui(c.W.get_mpz_t(), 4), mpz_fdiv_ui(BigInt(c.b + big_from_u64(a)).get_mpz_t(), 4)});
  }
  for (uint64_t hs : c.h) {
    plan.cls.push_back({8, mpz_fdiv_ui(c.W.get_mpz_t(), 8), mpz_fdiv_ui(BigInt(c.b + big_from_u64(hs)).get_mpz_t(), 8)});
  }
  if (opt.test_primality && opt.sieve_limit > c.w && c.W > opt.sieve_limit) {
    for (uint32_t p : *small_primes(opt.sieve_limit)) {
      if (p <= c.w) continue;
      if (p > opt.sieve_limit) break;
      uint64_t wp = mpz_fdiv_ui(c.W.get_mpz_t(), p);
      if (wp == 0) continue;
      uint64_t inv = inverse_mod_u64(wp, p);
      Plan::Root root{p, {}};
      for (uint64_t hs : c.h) {
        uint64_t v = mpz_fdiv_ui(BigInt(c.b + big_from_u64(hs)).get_mpz_t(), p);
        root.n0.push_back(static_cast<uint32_t>(mul_mod((p - v) % p, inv, p)));
      }
      plan.roots.push_back(std::move(root));
    }
  }
  return plan;
}

struct SliceResult {
  std::vector<ScanHit> hits;
  uint64_t covering_checks = 0;
  uint64_t covering_violations = 0;
  uint64_t class_violations = 0;
};

bool test_prime(const BigInt& v, bool& probable) {
  if (big_fits_u64(v)) {
    probable = false;
    return is_prime_64(big_to_u64(v));
  }
  int r = mpz_probab_prime_p(v.get_mpz_t(), kPrimalityReps);
  probable = r == 1;
  return r != 0;
}

SliceResult scan_slice(const Plan& plan, const ScanOptions& opt, uint64_t lo, uint64_t hi) {
  SliceResult out;
  const Certificate& c = *plan.cert;
  const size_t k = c.h.size();
  const uint64_t len = hi - lo;
  std::vector<std::vector<uint8_t>> composite;
  if (opt.test_primality) {
    composite.assign(k, std::vector<uint8_t>(len, 0));
    for (const auto& root : plan.roots) {
      const uint64_t p = root.p;
      const uint64_t base = lo % p;
      for (size_t s = 0; s < k; ++s) {
        uint64_t off = (root.n0[s] + p - base) % p;
        for (uint64_t i = off; i < len; i += p) composite[s][i] = 1;
      }
    }
  }
  std::vector<int> state(k);  // -1 unknown, 0 composite, 1 prime
  std::vector<uint8_t> probable(k);
  std::vector<BigInt> values(k);
  for (uint64_t n = lo; n < hi; ++n) {
    for (const auto& r : plan.cover) {
      ++out.covering_checks;
      if (!divides_at(r, n)) ++out.covering_violations;
    }
    for (const auto& r : plan.cls) {
      if ((mul_mod(r.w, n % 8, 8) + r.c) % 8 != plan.want8) ++out.class_violations;
    }
    if (!opt.test_primality) continue;

    size_t candidates = 0;
    for (size_t s = 0; s < k; ++s) {
      state[s] = composite[s][n - lo] ? 0 : -1;
      if (state[s] < 0) ++candidates;
    }
    if (candidates < 2) continue;
    size_t found = 0, remaining = candidates;
    for (size_t s = 0; s < k && found + remaining >= 2; ++s) {
      if (state[s] == 0) continue;
      --remaining;
      values[s] = c.W * n + c.b + c.h[s];
      bool prob = false;
      state[s] = test_prime(values[s], prob) ? 1 : 0;
      probable[s] = prob;
      if (state[s] == 1) ++found;
    }
    if (found < 2) continue;

    ScanHit hit;
    hit.n = n;
    for (size_t s = 0; s < k; ++s) {
      ScanEntry e;
      e.s = static_cast<unsigned>(s);
      e.value = c.W * n + c.b + c.h[s];
      if (state[s] < 0) {
        bool prob = false;
        state[s] = test_prime(e.value, prob) ? 1 : 0;
        probable[s] = prob;
      }
      e.prime = state[s] == 1;
      e.probable = e.prime && probable[s];
      if (e.prime) {
        hit.window.push_back(e.s);
        hit.probable = hit.probable || e.probable;
      }
      hit.entries.push_back(std::move(e));
    }
    for (size_t x = 0; x < hit.window.size(); ++x) {
      for (size_t y = x + 1; y < hit.window.size(); ++y) {
        const BigInt& a = hit.entries[hit.window[x]].value;
        const BigInt& b = hit.entries[hit.window[y]].value;
        ScanPair pr;
        pr.s = hit.window[x];
        pr.t = hit.window[y];
        pr.predicted_st = plan.pred_st;
        pr.predicted_ts = plan.pred_ts;
        pr.observed_st = jacobi(a, b);
        pr.observed_ts = jacobi(b, a);
        hit.pairs.push_back(pr);
      }
    }
    out.hits.push_back(std::move(hit));
  }
  return out;
}

void save_checkpoint(const std::string& path, const std::string& fp, const ScanStats& st) {
  json j = {{"schema", "primesym.scan-checkpoint"},
            {"version", 1},
            {"certificate", fp},
            {"n_min", st.n_first},
            {"n_last", st.n_last},
            {"scanned", st.scanned},
            {"hits", st.hits},
            {"probable_hits", st.probable_hits},
            {"symbol_violations", st.symbol_violations},
            {"covering_checks", st.covering_checks},
            {"covering_violations", st.covering_violations},
            {"class_violations", st.class_violations}};
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw_bound("cannot write scan checkpoint " + tmp);
    f << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

bool load_checkpoint(const std::string& path, const std::string& fp, ScanStats& st) {
  std::ifstream f(path);
  if (!f) return false;
  std::stringstream ss;
  ss << f.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw_invalid("scan checkpoint " + path + ": " + e.what());
  }
  if (j.value("schema", "") != "primesym.scan-checkpoint") throw_invalid("scan checkpoint " + path + ": wrong schema");
  if (j.value("certificate", "") != fp) throw_invalid("scan checkpoint " + path + " belongs to a different certificate");
  if (j.at("n_min").get<uint64_t>() != st.n_first) throw_invalid("scan checkpoint " + path + " was started at a different n");
  st.n_last = j.at("n_last").get<uint64_t>();
  st.scanned = j.at("scanned").get<uint64_t>();
  st.hits = j.at("hits").get<uint64_t>();
  st.probable_hits = j.at("probable_hits").get<uint64_t>();
  st.symbol_violations = j.at("symbol_violations").get<uint64_t>();
  st.covering_checks = j.at("covering_checks").get<uint64_t>();
  st.covering_violations = j.at("covering_violations").get<uint64_t>();
  st.class_violations = j.at("class_violations").get<uint64_t>();
  st.resumed = true;
  return true;
}

}  // namespace

ScanStats scan_progression(const Certificate& cert, const ScanOptions& opt,
                           const std::function<bool(const ScanHit&)>& sink) {
  if (opt.n_min < 1 || opt.n_max < opt.n_min) throw_invalid("scan: need 1 <= n_min <= n_max");
  if (opt.workers < 1) throw_invalid("scan: workers must be >= 1");
  if (cert.h.empty() || sgn(cert.W) <= 0) throw_invalid("scan: malformed certificate");
  const Plan plan = make_plan(cert, opt);
  const std::string fp = fingerprint(cert);

  ScanStats st;
  st.n_first = opt.n_min;
  st.n_last = opt.n_min - 1;
  if (!opt.checkpoint_path.empty()) load_checkpoint(opt.checkpoint_path, fp, st);
  auto checkpoint = [&] {
    if (!opt.checkpoint_path.empty()) save_checkpoint(opt.checkpoint_path, fp, st);
  };

  const uint64_t batch = std::max<uint64_t>(opt.batch, 1);
  bool done = opt.max_hits != 0 && st.hits >= opt.max_hits;
  while (!done && st.n_last < opt.n_max) {
    if (opt.stop && opt.stop->load()) {
      st.interrupted = true;
      break;
    }
    const uint64_t lo = st.n_last + 1;
    const uint64_t hi = std::min(opt.n_max, lo + batch - 1) + 1;
    const unsigned workers = static_cast<unsigned>(std::min<uint64_t>(opt.workers, hi - lo));
    std::vector<SliceResult> parts(workers);
    std::vector<std::thread> threads;
    const uint64_t span = (hi - lo + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      uint64_t a = lo + w * span, z = std::min(hi, a + span);
      if (a >= z) continue;
      if (workers == 1) {
        parts[w] = scan_slice(plan, opt, a, z);
      } else {
        threads.emplace_back([&, w, a, z] { parts[w] = scan_slice(plan, opt, a, z); });
      }
    }
    for (auto& t : threads) t.join();

    uint64_t last = hi - 1;
    for (auto& part : parts) {
      st.covering_checks += part.covering_checks;
      st.covering_violations += part.covering_violations;
      st.class_violations += part.class_violations;
      for (auto& hit : part.hits) {
        if (done) break;
        ++st.hits;
        if (hit.probable) ++st.probable_hits;
        for (const auto& p : hit.pairs) {
          if (!p.ok()) ++st.symbol_violations;
        }
        bool more = sink(hit);
        if (!more || (opt.max_hits != 0 && st.hits >= opt.max_hits)) {
          done = true;
          last = hit.n;
        }
      }
    }
    st.n_last = last;
    st.scanned = st.n_last + 1 - st.n_first;
    checkpoint();
    if (opt.progress) opt.progress(st.n_last, st.hits);
  }
  checkpoint();
  return st;
}

}  // namespace primesym

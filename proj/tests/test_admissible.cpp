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

#include "doctest.h"
#include "primesym/admissible.hpp"
#include "primesym/arith.hpp"
#include "primesym/error.hpp"
#include "primesym/primes.hpp"

using namespace primesym;

namespace {

std::vector<BigInt> bigs(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

const CheckResult* find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// Admissibility by brute force over residues of every prime <= k.
bool admissible_oracle(const std::vector<BigInt>& h) {
  for (uint64_t p = 2; p <= h.size(); ++p) {
    if (!is_prime_64(p)) continue;
    std::vector<bool> hit(p, false);
    for (const auto& x : h) {
      BigInt r = x % static_cast<unsigned long>(p);
      if (r < 0) r += static_cast<unsigned long>(p);
      hit[r.get_ui()] = true;
    }
    if (std::find(hit.begin(), hit.end(), false) == hit.end()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("thresholds and moduli") {
  CHECK(admissible_threshold(2, AdmissibleVariant::kLemma22) == 4);
  CHECK(admissible_threshold(2, AdmissibleVariant::kLemma31) == 8);
  CHECK(admissible_modulus(4) == 24);
  CHECK(admissible_modulus(8) == 840);
  CHECK(parse_admissible_variant("lemma31") == AdmissibleVariant::kLemma31);
  CHECK(to_string(AdmissibleVariant::kLemma22) == "lemma22");
  CHECK_THROWS_AS(parse_admissible_variant("lemma99"), Error);
}

TEST_CASE("k = 2 goldens") {
  auto a = build_admissible(2, AdmissibleVariant::kLemma22);
  CHECK(a.h == bigs({0, 120}));
  CHECK(a.K == 24);
  CHECK(a.witness(0, 1) == 5);
  REQUIRE(a.trace.size() == 1);
  const auto& t = a.trace[0];
  CHECK(t.r == 1);
  CHECK(t.X.empty());
  CHECK(t.q == std::vector<uint64_t>{5});
  CHECK(t.c == bigs({0}));
  CHECK(t.b == 5);

  auto b = build_admissible(2, AdmissibleVariant::kLemma31);
  CHECK(b.h == bigs({0, 9240}));
  CHECK(b.K == 840);
  CHECK(b.witness(0, 1) == 11);
  CHECK(verify_properties(a).passed());
  CHECK(verify_properties(b).passed());
}

TEST_CASE("builder output passes every property for k = 2..7") {
  for (auto v : {AdmissibleVariant::kLemma22, AdmissibleVariant::kLemma31}) {
    for (unsigned k = 2; k <= 7; ++k) {
      CAPTURE(k);
      auto set = build_admissible(k, v);
      auto report = verify_properties(set);
      if (!report.passed()) FAIL_CHECK(report.to_json());
      CHECK(is_admissible(set.h));
      CHECK(admissible_oracle(set.h));
      REQUIRE(set.h.size() == k);
      for (unsigned i = 0; i < k; ++i) {
        for (unsigned j = i + 1; j < k; ++j) {
          uint64_t p = set.witness(i, j);
          REQUIRE(p > set.threshold);
          BigInt d = set.h[j] - set.h[i];
          REQUIRE(d % static_cast<unsigned long>(p) == 0);
          REQUIRE((d / static_cast<unsigned long>(p)) % static_cast<unsigned long>(p) != 0);
        }
      }
    }
  }
}

TEST_CASE("builder is deterministic") {
  auto a = build_admissible(5, AdmissibleVariant::kLemma22);
  auto b = build_admissible(5, AdmissibleVariant::kLemma22);
  CHECK(a.h == b.h);
  CHECK(to_json(a) == to_json(b));
}

TEST_CASE("build_admissible rejects bad k") {
  CHECK_THROWS_AS(build_admissible(1, AdmissibleVariant::kLemma22), Error);
  CHECK_THROWS_AS(build_admissible(0, AdmissibleVariant::kLemma31), Error);
  AdmissibleBuildOptions opts;
  opts.max_k = 4;
  CHECK_THROWS_AS(build_admissible(5, AdmissibleVariant::kLemma22, opts), Error);
}

TEST_CASE("is_admissible") {
  CHECK(is_admissible(bigs({0, 2})));
  CHECK_FALSE(is_admissible(bigs({0, 1})));
  CHECK(is_admissible(bigs({0, 2, 6})));
  CHECK_FALSE(is_admissible(bigs({0, 2, 4})));
  CHECK(is_admissible(bigs({0, 4, 6, 10, 12, 16})));
  CHECK(is_admissible(bigs({-6, 0, 4})));
  CHECK_THROWS_AS(is_admissible(bigs({0, 2, 2})), Error);
  // Agreement with the residue oracle on small sets.
  for (long a = 1; a < 30; ++a) {
    for (long b = a + 1; b < 30; ++b) {
      auto h = bigs({0, a, b});
      REQUIRE(is_admissible(h) == admissible_oracle(h));
    }
  }
}

TEST_CASE("tampered sets are reported") {
  auto base = build_admissible(2, AdmissibleVariant::kLemma22);
  AdmissibleSet t = base;
  t.h.push_back(BigInt(240));
  t.witnesses.push_back({{0, 2}, 5});
  t.witnesses.push_back({{1, 2}, 5});
  auto r = verify_prefix(t, 3);
  CHECK_FALSE(r.passed());
  const auto* iii = find_check(r, "(iii) no shared large prime");
  REQUIRE(iii != nullptr);
  CHECK_FALSE(iii->passed);
  CHECK(iii->detail.find("prime 5") != std::string::npos);

  // A non-multiple of K breaks (i).
  AdmissibleSet u = base;
  u.h[1] = 125;
  auto r2 = verify_properties(u);
  CHECK_FALSE(find_check(r2, "(i) multiples of K")->passed);

  // Duplicate element.
  AdmissibleSet v = base;
  v.h[1] = 0;
  CHECK_FALSE(verify_properties(v).passed());

  // A forged trace is caught by the replay.
  auto big = build_admissible(3, AdmissibleVariant::kLemma22);
  big.trace[1].b += 1;
  CHECK_FALSE(verify_properties(big).passed());
}

TEST_CASE("JSON round trip") {
  for (auto v : {AdmissibleVariant::kLemma22, AdmissibleVariant::kLemma31}) {
    auto set = build_admissible(4, v);
    std::string text = to_json(set);
    auto back = admissible_from_json(text);
    CHECK(back.h == set.h);
    CHECK(back.K == set.K);
    CHECK(back.variant == set.variant);
    CHECK(to_json(back) == text);
    CHECK(verify_properties(back).passed());
  }
  CHECK_THROWS_AS(admissible_from_json("{}"), Error);
  CHECK_THROWS_AS(admissible_from_json("[1,2"), Error);
}

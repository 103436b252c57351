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

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "primesym/primesym.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  primesym_string_free(s);
  return out;
}

struct Ctx {
  primesym_context* ctx = nullptr;
  Ctx() {
    primesym_context_options opts{};
    REQUIRE(primesym_context_new(&opts, &ctx) == PRIMESYM_OK);
  }
  ~Ctx() { primesym_context_free(ctx); }
};

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::strlen(primesym_version()) > 0);
  int out = 0;
  CHECK(primesym_jacobi(3, 4, &out) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(std::string(primesym_last_error()).size() > 0);
  CHECK(primesym_jacobi(3, 5, nullptr) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(primesym_context_new(nullptr, nullptr) == PRIMESYM_INVALID_ARGUMENT);
}

TEST_CASE("primitives") {
  int out = 0;
  REQUIRE(primesym_is_prime(88259, &out) == PRIMESYM_OK);
  CHECK(out == 1);
  REQUIRE(primesym_jacobi(2434609, 2434589, &out) == PRIMESYM_OK);
  CHECK(out == 1);
  REQUIRE(primesym_jacobi(-1, 7, &out) == PRIMESYM_OK);
  CHECK(out == -1);
  REQUIRE(primesym_jacobi_str("123456789012345678901234567890", "1000000000000000000000000000057", &out) ==
          PRIMESYM_OK);
  CHECK((out == 1 || out == -1 || out == 0));
  CHECK(primesym_jacobi_str("x", "7", &out) == PRIMESYM_INVALID_ARGUMENT);
  REQUIRE(primesym_is_primitive_root(88261, 88259, &out) == PRIMESYM_OK);
  CHECK(out == 1);
  CHECK(primesym_is_primitive_root(2, 9, &out) == PRIMESYM_INVALID_ARGUMENT);

  uint64_t ps[3] = {3, 5, 7};
  int mat[9];
  REQUIRE(primesym_symbol_matrix(ps, 3, mat) == PRIMESYM_OK);
  CHECK(mat[0] == 0);
  CHECK(mat[1] == -1);  // (3/5)
  CHECK(mat[2] == -1);  // (3/7)
  CHECK(mat[5] == -1);  // (5/7)
}

TEST_CASE("prime index") {
  Ctx c;
  uint64_t v = 0;
  REQUIRE(primesym_nth_prime(c.ctx, 8560, &v) == PRIMESYM_OK);
  CHECK(v == 88259);
  REQUIRE(primesym_prime_index(c.ctx, 2434589, &v) == PRIMESYM_OK);
  CHECK(v == 178633);
  CHECK(primesym_prime_index(c.ctx, 100, &v) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(primesym_nth_prime(c.ctx, 0, &v) == PRIMESYM_INVALID_ARGUMENT);
  uint64_t w[4];
  REQUIRE(primesym_window(c.ctx, 8560, 3, w) == PRIMESYM_OK);
  CHECK(w[0] == 88259);
  CHECK(w[1] == 88261);
  CHECK(w[2] == 88289);

  primesym_context* small = nullptr;
  primesym_context_options opts{};
  opts.max_value = 1000;
  REQUIRE(primesym_context_new(&opts, &small) == PRIMESYM_OK);
  CHECK(primesym_nth_prime(small, 10000, &v) == PRIMESYM_BOUND_EXCEEDED);
  primesym_context_free(small);
}

TEST_CASE("search through the C API") {
  Ctx c;
  primesym_search_params p{};
  p.m = 3;
  p.pattern = "primroot";
  p.n_min = 1;
  p.limit = 1;
  struct Seen {
    std::vector<uint64_t> n;
    std::vector<std::string> json;
  } seen;
  auto fn = [](void* user, const primesym_match* m) -> int {
    auto* s = static_cast<Seen*>(user);
    s->n.push_back(m->n);
    s->json.push_back(m->json);
    return 1;
  };
  primesym_search_summary sum{};
  REQUIRE(primesym_search(c.ctx, &p, fn, nullptr, &seen, &sum) == PRIMESYM_OK);
  REQUIRE(seen.n.size() == 1);
  CHECK(seen.n[0] == 8560);
  auto j = nlohmann::json::parse(seen.json[0]);
  CHECK(j["primes"][0] == 88259);
  CHECK(sum.matches == 1);

  p.pattern = "??";
  CHECK(primesym_search(c.ctx, &p, fn, nullptr, &seen, &sum) == PRIMESYM_INVALID_ARGUMENT);

  p.pattern = "--";
  p.m = 1;
  p.n_min = 2;
  p.n_max = 1000;
  p.limit = 0;
  seen = {};
  REQUIRE(primesym_search(c.ctx, &p, fn, nullptr, &seen, &sum) == PRIMESYM_OK);
  CHECK(sum.exhausted == 1);
  CHECK(sum.matches == seen.n.size());
  for (size_t i = 1; i < seen.n.size(); ++i) CHECK(seen.n[i] > seen.n[i - 1]);

  // The callback can stop the search early.
  auto stop_fn = [](void*, const primesym_match*) -> int { return 0; };
  REQUIRE(primesym_search(c.ctx, &p, stop_fn, nullptr, nullptr, &sum) == PRIMESYM_OK);
  CHECK(sum.matches == 1);

  char* header = nullptr;
  REQUIRE(primesym_csv_header(2, &header) == PRIMESYM_OK);
  CHECK(take(header) == "n,p0,p1,p2");
}

TEST_CASE("admissible sets through the C API") {
  primesym_admissible* set = nullptr;
  REQUIRE(primesym_admissible_build(2, "lemma22", 0, &set) == PRIMESYM_OK);
  CHECK(primesym_admissible_size(set) == 2);
  char* e = nullptr;
  REQUIRE(primesym_admissible_element(set, 1, &e) == PRIMESYM_OK);
  CHECK(take(e) == "120");
  CHECK(primesym_admissible_element(set, 2, &e) == PRIMESYM_INVALID_ARGUMENT);
  char* report = nullptr;
  REQUIRE(primesym_admissible_verify(set, &report) == PRIMESYM_OK);
  CHECK(nlohmann::json::parse(take(report))["passed"] == true);

  char* text = nullptr;
  REQUIRE(primesym_admissible_to_json(set, &text) == PRIMESYM_OK);
  std::string js = take(text);
  primesym_admissible* back = nullptr;
  REQUIRE(primesym_admissible_from_json(js.c_str(), &back) == PRIMESYM_OK);
  CHECK(primesym_admissible_size(back) == 2);
  primesym_admissible_free(back);
  CHECK(primesym_admissible_from_json("{}", &back) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(primesym_admissible_build(1, "lemma22", 0, &back) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(primesym_admissible_build(2, "nope", 0, &back) == PRIMESYM_INVALID_ARGUMENT);

  const char* good[] = {"0", "2", "6"};
  const char* bad[] = {"0", "2", "4"};
  int out = -1;
  REQUIRE(primesym_is_admissible(good, 3, &out) == PRIMESYM_OK);
  CHECK(out == 1);
  REQUIRE(primesym_is_admissible(bad, 3, &out) == PRIMESYM_OK);
  CHECK(out == 0);

  uint64_t w = 0;
  REQUIRE(primesym_minimal_w(set, "thm13", 0, &w) == PRIMESYM_OK);
  CHECK(w == 859);
  primesym_admissible_free(set);
}

TEST_CASE("certificates through the C API") {
  Ctx c;
  primesym_admissible* set = nullptr;
  REQUIRE(primesym_admissible_build(2, "lemma22", 0, &set) == PRIMESYM_OK);
  primesym_certificate* cert = nullptr;
  CHECK(primesym_certificate_build(set, "thm13", 1, 1, 1, 700, 0, &cert) == PRIMESYM_INVALID_ARGUMENT);
  CHECK(primesym_certificate_build(set, "thm13", 1, 1, 1, 0, 500, &cert) == PRIMESYM_BOUND_EXCEEDED);
  REQUIRE(primesym_certificate_build(set, "thm13", 1, 1, 1, 0, 0, &cert) == PRIMESYM_OK);

  char* report = nullptr;
  REQUIRE(primesym_certificate_verify(cert, &report) == PRIMESYM_OK);
  CHECK(nlohmann::json::parse(take(report))["passed"] == true);
  char* summary = nullptr;
  REQUIRE(primesym_certificate_summary(cert, &summary) == PRIMESYM_OK);
  CHECK(take(summary).size() > 0);

  char* text = nullptr;
  REQUIRE(primesym_certificate_to_json(cert, &text) == PRIMESYM_OK);
  std::string js = take(text);
  auto doc = nlohmann::json::parse(js);
  primesym_certificate* back = nullptr;
  REQUIRE(primesym_certificate_from_json(js.c_str(), &back) == PRIMESYM_OK);

  // Tampering with b makes verification fail with a report.
  doc["b"] = "1";
  primesym_certificate* bad = nullptr;
  std::string tampered = doc.dump();
  if (primesym_certificate_from_json(tampered.c_str(), &bad) == PRIMESYM_OK) {
    CHECK(primesym_certificate_verify(bad, &report) == PRIMESYM_VERIFICATION_FAILED);
    CHECK(nlohmann::json::parse(take(report))["passed"] == false);
    primesym_certificate_free(bad);
  }

  primesym_scan_params sp{};
  sp.n_min = 1;
  sp.n_max = 1000;
  sp.test_primality = 1;
  std::vector<uint64_t> hits;
  auto on_hit = [](void* user, uint64_t n, int ok, const char*) -> int {
    CHECK(ok == 1);
    static_cast<std::vector<uint64_t>*>(user)->push_back(n);
    return 1;
  };
  primesym_scan_summary ss{};
  REQUIRE(primesym_certificate_scan(c.ctx, back, &sp, on_hit, nullptr, &hits, &ss) == PRIMESYM_OK);
  CHECK(hits == std::vector<uint64_t>{87, 826});
  CHECK(ss.hits == 2);
  CHECK(ss.scanned == 1000);
  CHECK(ss.symbol_violations == 0);

  primesym_context_interrupt(c.ctx);
  CHECK(primesym_certificate_scan(c.ctx, back, &sp, on_hit, nullptr, &hits, &ss) == PRIMESYM_INTERRUPTED);
  primesym_context_clear_interrupt(c.ctx);

  primesym_certificate_free(back);
  primesym_certificate_free(cert);
  primesym_admissible_free(set);
}

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

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "primesym/primes.hpp"

namespace primesym {

// Prescribed Legendre-symbol signs on a window of m+1 consecutive primes.
//
// Uniform patterns fix (p_i/p_j) = d1 and (p_j/p_i) = d2 for every i < j.
// Matrix patterns fix (p_i/p_j) = delta_ij and (p_j/p_i) = delta * delta_ij.
struct SignPattern {
  enum class Mode { kUniform, kMatrix };

  Mode mode = Mode::kUniform;
  unsigned m = 1;
  int d1 = 1;
  int d2 = 1;
  int delta = 1;
  std::vector<int8_t> upper;  // delta_ij, i < j, row-major

  static SignPattern uniform(unsigned m, int d1, int d2);
  static SignPattern matrix(unsigned m, int delta, std::vector<int8_t> upper);
  // "++", "--", "-+" or "+-".
  static SignPattern parse_uniform(std::string_view text, unsigned m);
  // {"m": 2, "delta": 1, "rows": [[1, -1], [1]]}; rows[i] lists j = i+1..m.
  static SignPattern matrix_from_json(const std::string& json);

  // (p_i/p_j, p_j/p_i) required for window positions i < j.
  std::pair<int, int> expected(unsigned i, unsigned j) const;
  std::string label() const;
  bool operator==(const SignPattern&) const = default;
};

// (p/q, q/p) for distinct odd primes.
std::pair<int, int> pair_signs(uint64_t p, uint64_t q);

bool window_matches_signs(const PrimeWindow& window, const SignPattern& pattern);

struct PairWitness {
  unsigned i;
  unsigned j;
  uint64_t prime;
  bool operator==(const PairWitness&) const = default;
};

struct StrictResult {
  bool ok = false;
  std::vector<PairWitness> witnesses;                       // all pairs when ok
  std::optional<std::pair<unsigned, unsigned>> failing_pair;  // first failure otherwise
};

// For every pair i < j, the smallest prime p > 2m+1 with p || (p_j - p_i).
StrictResult window_matches_strict(const PrimeWindow& window, unsigned m);

// (m+1)x(m+1) matrix of jacobi(p_i, p_j) with a zero diagonal.
std::vector<std::vector<int>> symbol_matrix(const PrimeWindow& window);

// What a search looks for.
struct Predicate {
  enum class Kind { kSigns, kPrimRoot };

  Kind kind = Kind::kSigns;
  unsigned m = 1;
  SignPattern pattern;  // kSigns only
  bool strict = false;  // additionally require window_matches_strict

  static Predicate signs(SignPattern pattern, bool strict = false);
  static Predicate primroot(unsigned m);
  // Pattern strings accepted by the CLI: ++ -- -+ +- primroot matrix:<file>.
  // For matrix patterns the file content is passed in `matrix_json`.
  static Predicate parse(std::string_view spec, unsigned m, bool strict,
                         const std::string& matrix_json = {});

  // Reference evaluation of a single window; the oracle for the engine.
  bool matches(const PrimeWindow& window) const;
  std::string describe() const;
  uint64_t hash() const;
  std::string label() const;
};

struct MatchRecord {
  uint64_t n = 0;
  std::vector<uint64_t> primes;
  std::string pattern;
  std::vector<PairWitness> witnesses;

  bool operator==(const MatchRecord&) const = default;
};

std::string to_json(const MatchRecord& record, const Predicate& predicate);
// Parses one JSON line and re-verifies it against `predicate`; a record that
// no longer satisfies the predicate throws kVerificationFailed.
MatchRecord match_from_json(const std::string& line, const Predicate& predicate);
std::string to_csv(const MatchRecord& record);
std::string csv_header(unsigned m);
// OEIS b-file line "index value" with value = n.
std::string to_bfile(const MatchRecord& record, uint64_t sequence_index);

struct SearchProgress {
  uint64_t current_n = 0;
  uint64_t matches = 0;
  double windows_per_second = 0;
};

struct SearchOptions {
  uint64_t n_min = 2;
  uint64_t n_max = UINT64_MAX;
  uint64_t limit = 0;  // 0 = unlimited
  unsigned workers = 1;
  uint64_t batch_values = uint64_t{1} << 22;  // values per worker per batch
  std::string checkpoint_path;
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const SearchProgress&)> progress;
};

struct SearchResult {
  uint64_t matches = 0;       // including matches counted by a resumed checkpoint
  uint64_t last_n = 0;        // every n <= last_n (from n_min) has been decided
  bool interrupted = false;
  bool resumed = false;
  bool exhausted = false;     // reached n_max
};

// Emits every n in [n_min, n_max] whose window satisfies `predicate`, in
// ascending order, until `limit` records or the sink returns false.
SearchResult find_matches(PrimeIndexer& indexer, const Predicate& predicate,
                          const SearchOptions& options,
                          const std::function<bool(const MatchRecord&)>& sink);

struct SearchCheckpoint {
  std::string predicate;
  uint64_t predicate_hash = 0;
  uint64_t n_min = 0;
  uint64_t last_n = 0;
  uint64_t matches = 0;
};

std::optional<SearchCheckpoint> load_search_checkpoint(const std::string& path);
void save_search_checkpoint(const std::string& path, const SearchCheckpoint& cp);

}  // namespace primesym

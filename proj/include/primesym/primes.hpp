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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace primesym {

// Deterministic Miller-Rabin, exact for every n < 2^64.
bool is_prime_64(uint64_t n);

struct SieveConfig {
  // Bits (odd values) per cache-sized segment.
  uint64_t segment_bits = uint64_t{1} << 20;
  // Largest bitmap a single sieve_range call may allocate.
  uint64_t max_range_bits = uint64_t{1} << 33;
};

// Primality bitmap for the odd values of [lo, hi); 2 is tracked separately.
class PrimeSegment {
 public:
  PrimeSegment() = default;

  uint64_t lo() const { return lo_; }
  uint64_t hi() const { return hi_; }

  bool is_prime(uint64_t v) const;
  uint64_t count() const;
  std::vector<uint64_t> primes() const;

  template <typename Fn>
  void for_each_prime(Fn&& fn) const {
    if (has_two_) fn(uint64_t{2});
    for (size_t w = 0; w < bits_.size(); ++w) {
      uint64_t word = bits_[w];
      while (word) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(word));
        word &= word - 1;
        fn(first_odd_ + 2 * (64 * w + b));
      }
    }
  }

 private:
  friend PrimeSegment sieve_range(uint64_t lo, uint64_t hi, const SieveConfig& cfg);

  uint64_t lo_ = 0;
  uint64_t hi_ = 0;
  uint64_t first_odd_ = 1;
  uint64_t odd_count_ = 0;
  bool has_two_ = false;
  std::vector<uint64_t> bits_;  // set bit = prime
};

// Exact primality bitmap for [lo, hi). Ranges whose bitmap exceeds
// cfg.max_range_bits throw kBoundExceeded asking the caller to split.
PrimeSegment sieve_range(uint64_t lo, uint64_t hi, const SieveConfig& cfg = {});

// Snapshot of a process-wide cache holding at least every prime <= limit.
std::shared_ptr<const std::vector<uint32_t>> small_primes(uint32_t limit);

struct PrimeWindow {
  uint64_t n = 0;               // index of primes.front()
  std::vector<uint64_t> primes;  // p_n, ..., p_{n+m}

  unsigned m() const { return primes.empty() ? 0 : static_cast<unsigned>(primes.size() - 1); }
  bool operator==(const PrimeWindow&) const = default;
};

struct IndexerConfig {
  // Largest value the indexer will ever sieve to.
  uint64_t max_value = uint64_t{1} << 40;
  uint64_t stride = 1'000'000;
  // Empty path disables the on-disk checkpoint cache.
  std::string cache_path;
  unsigned workers = 1;
  SieveConfig sieve;
};

class WindowStream;

// Maps prime indices to primes and back. A table of (n, p_n) checkpoints at a
// fixed index stride is grown on demand by sequential segmented sieving and
// optionally persisted so later runs skip the re-sieve.
class PrimeIndexer {
 public:
  struct Checkpoint {
    uint64_t n;
    uint64_t p;
    bool operator==(const Checkpoint&) const = default;
  };

  explicit PrimeIndexer(IndexerConfig cfg = {});

  const IndexerConfig& config() const { return cfg_; }

  uint64_t nth_prime(uint64_t n);
  uint64_t index_of_prime(uint64_t p);
  // pi(x): number of primes <= x.
  uint64_t prime_count(uint64_t x);
  PrimeWindow window(uint64_t n, unsigned m);
  WindowStream windows(unsigned m, uint64_t n_start, uint64_t n_end);

  std::vector<Checkpoint> checkpoints() const;
  // Highest value below which the table is complete, and pi(covered-1).
  uint64_t covered_hi() const;

  void save_cache() const;
  static std::string cache_format_version();

 private:
  void load_cache();
  // Sieve forward until either the table covers `value` or holds index `n`.
  void extend(uint64_t value_target, uint64_t index_target);
  Checkpoint nearest_by_index(uint64_t n) const;
  Checkpoint nearest_by_value(uint64_t p) const;

  IndexerConfig cfg_;
  mutable std::mutex mu_;
  std::vector<Checkpoint> table_;
  uint64_t covered_hi_ = 3;     // table complete for values < covered_hi_
  uint64_t covered_count_ = 1;  // pi(covered_hi_ - 1)
};

// Consecutive-prime windows for n in [n_start, n_end], ascending.
class WindowStream {
 public:
  WindowStream(PrimeIndexer& indexer, unsigned m, uint64_t n_start, uint64_t n_end);

  std::optional<PrimeWindow> next();

 private:
  bool refill();

  PrimeIndexer* indexer_;
  unsigned m_;
  uint64_t next_n_;
  uint64_t n_end_;
  uint64_t cursor_ = 0;  // next value to sieve from
  std::vector<uint64_t> buffer_;
  size_t head_ = 0;
};

}  // namespace primesym

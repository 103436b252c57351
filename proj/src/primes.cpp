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

#include "primesym/primes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "primesym/arith.hpp"
#include "primesym/error.hpp"

namespace primesym {

namespace {

bool miller_rabin_round(uint64_t n, uint64_t d, unsigned s, uint64_t a) {
  a %= n;
  if (a == 0) return true;
  uint64_t x = mod_pow(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

uint64_t isqrt(uint64_t n) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && (r > UINT32_MAX || r * r > n)) --r;
  while (r < UINT32_MAX && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Sieve primes above 13 only; 3..13 come from the presieve pattern.
constexpr std::array<uint32_t, 5> kPresievePrimes = {3, 5, 7, 11, 13};
constexpr uint32_t kPresievePeriod = 3 * 5 * 7 * 11 * 13;  // in odd positions

// Bit i set iff 2i+1 is coprime to every presieve prime; padded by two words
// so any 64-bit window starting below the period can be read directly.
const std::vector<uint64_t>& presieve_pattern() {
  static const std::vector<uint64_t> pattern = [] {
    const size_t nbits = kPresievePeriod + 128;
    std::vector<uint64_t> words((nbits + 63) / 64, 0);
    for (size_t i = 0; i < nbits; ++i) {
      uint64_t v = 2 * (i % kPresievePeriod) + 1;
      bool coprime = true;
      for (uint32_t p : kPresievePrimes) coprime = coprime && (v % p != 0);
      if (coprime) words[i / 64] |= uint64_t{1} << (i % 64);
    }
    return words;
  }();
  return pattern;
}

uint64_t pattern_word(const std::vector<uint64_t>& pat, uint64_t pos) {
  uint64_t w = pos / 64, b = pos % 64;
  if (b == 0) return pat[w];
  return (pat[w] >> b) | (pat[w + 1] << (64 - b));
}

constexpr uint32_t kBasePrimeCap = uint32_t{1} << 24;

}  // namespace

bool is_prime_64(uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<uint64_t, 12> kSmall = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (uint64_t p : kSmall) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;
  uint64_t d = n - 1;
  unsigned s = static_cast<unsigned>(std::countr_zero(d));
  d >>= s;
  // Jim Sinclair's base set, deterministic below 2^64.
  static constexpr std::array<uint64_t, 7> kBases = {2, 325, 9375, 28178, 450775, 9780504,
                                                     1795265022};
  for (uint64_t a : kBases) {
    if (!miller_rabin_round(n, d, s, a)) return false;
  }
  return true;
}

std::shared_ptr<const std::vector<uint32_t>> small_primes(uint32_t limit) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<uint32_t>> cache;
  static uint32_t cached_limit = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (cache && cached_limit >= limit) return cache;
  uint32_t target = std::max<uint32_t>(limit, std::min<uint64_t>(uint64_t{cached_limit} * 2, UINT32_MAX));
  target = std::max<uint32_t>(target, 1 << 16);
  std::vector<uint8_t> composite(target + 1, 0);
  auto primes = std::make_shared<std::vector<uint32_t>>();
  for (uint64_t i = 2; i <= target; ++i) {
    if (composite[i]) continue;
    primes->push_back(static_cast<uint32_t>(i));
    for (uint64_t j = i * i; j <= target; j += i) composite[j] = 1;
  }
  cache = std::move(primes);
  cached_limit = target;
  return cache;
}

bool PrimeSegment::is_prime(uint64_t v) const {
  if (v == 2) return has_two_;
  if (v < first_odd_ || v >= hi_ || (v & 1) == 0) return false;
  uint64_t i = (v - first_odd_) / 2;
  return (bits_[i / 64] >> (i % 64)) & 1;
}

uint64_t PrimeSegment::count() const {
  uint64_t c = has_two_ ? 1 : 0;
  for (uint64_t w : bits_) c += static_cast<uint64_t>(std::popcount(w));
  return c;
}

std::vector<uint64_t> PrimeSegment::primes() const {
  std::vector<uint64_t> out;
  out.reserve(count());
  for_each_prime([&](uint64_t p) { out.push_back(p); });
  return out;
}

PrimeSegment sieve_range(uint64_t lo, uint64_t hi, const SieveConfig& cfg) {
  if (hi <= lo) throw_invalid("sieve_range: need hi > lo");
  PrimeSegment seg;
  seg.lo_ = lo;
  seg.hi_ = hi;
  seg.has_two_ = lo <= 2 && hi > 2;
  seg.first_odd_ = lo <= 3 ? 3 : (lo | 1);
  seg.odd_count_ = hi > seg.first_odd_ ? (hi - seg.first_odd_ + 1) / 2 : 0;
  if (seg.odd_count_ > cfg.max_range_bits) {
    throw_bound("sieve_range: [" + std::to_string(lo) + ", " + std::to_string(hi) +
                ") needs " + std::to_string(seg.odd_count_) +
                " bits, above the configured budget of " + std::to_string(cfg.max_range_bits) +
                "; split the range into smaller pieces");
  }
  if (seg.odd_count_ == 0) return seg;

  const uint64_t nwords = (seg.odd_count_ + 63) / 64;
  seg.bits_.assign(nwords, 0);

  const auto& pat = presieve_pattern();
  const uint64_t offset = ((seg.first_odd_ - 1) / 2) % kPresievePeriod;
  for (uint64_t w = 0; w < nwords; ++w) {
    seg.bits_[w] = pattern_word(pat, (offset + 64 * w) % kPresievePeriod);
  }
  const uint64_t tail = seg.odd_count_ % 64;
  if (tail) seg.bits_.back() &= (uint64_t{1} << tail) - 1;
  for (uint32_t p : kPresievePrimes) {
    if (p >= seg.first_odd_ && p < hi) {
      uint64_t i = (p - seg.first_odd_) / 2;
      seg.bits_[i / 64] |= uint64_t{1} << (i % 64);
    }
  }
  if (seg.first_odd_ == 1) seg.bits_[0] &= ~uint64_t{1};

  const uint64_t root = isqrt(hi - 1);
  const uint32_t base_limit = static_cast<uint32_t>(std::min<uint64_t>(root, kBasePrimeCap));
  auto base = small_primes(base_limit);
  const auto begin = std::upper_bound(base->begin(), base->end(), 13u);
  // The shared table may extend past base_limit, so end can precede begin.
  const auto end = std::max(begin, std::upper_bound(base->begin(), base->end(), base_limit));

  const uint64_t chunk_bits = std::max<uint64_t>(cfg.segment_bits, 64);
  for (uint64_t c0 = 0; c0 < seg.odd_count_; c0 += chunk_bits) {
    const uint64_t c1 = std::min(seg.odd_count_, c0 + chunk_bits);
    const unsigned __int128 v0 = seg.first_odd_ + 2 * static_cast<unsigned __int128>(c0);
    for (auto it = begin; it != end; ++it) {
      const uint64_t p = *it;
      unsigned __int128 start = static_cast<unsigned __int128>(p) * p;
      if (start < v0) start = (v0 + p - 1) / p * p;
      if ((start & 1) == 0) start += p;
      if (start < seg.first_odd_) continue;
      unsigned __int128 idx = (start - seg.first_odd_) / 2;
      if (idx >= c1) continue;
      for (uint64_t i = static_cast<uint64_t>(idx); i < c1; i += p) {
        seg.bits_[i / 64] &= ~(uint64_t{1} << (i % 64));
      }
    }
  }

  if (root > kBasePrimeCap) {
    // Survivors may still have a factor above the base table; settle them exactly.
    for (uint64_t w = 0; w < nwords; ++w) {
      uint64_t word = seg.bits_[w];
      while (word) {
        unsigned b = static_cast<unsigned>(std::countr_zero(word));
        word &= word - 1;
        uint64_t v = seg.first_odd_ + 2 * (64 * w + b);
        if (!is_prime_64(v)) seg.bits_[w] &= ~(uint64_t{1} << b);
      }
    }
  }
  return seg;
}

// ---------------------------------------------------------------------------
// PrimeIndexer

namespace {
constexpr uint64_t kExtendChunk = uint64_t{1} << 25;  // values per sieve call
constexpr const char* kCacheMagic = "primesym-prime-index";
constexpr int kCacheVersion = 1;
}  // namespace

std::string PrimeIndexer::cache_format_version() {
  return std::string(kCacheMagic) + " v" + std::to_string(kCacheVersion);
}

PrimeIndexer::PrimeIndexer(IndexerConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.stride == 0) throw_invalid("indexer stride must be positive");
  if (cfg_.workers == 0) cfg_.workers = 1;
  if (cfg_.max_value < 3) throw_invalid("indexer bound must be at least 3");
  table_.push_back({1, 2});
  if (!cfg_.cache_path.empty()) load_cache();
}

void PrimeIndexer::load_cache() {
  std::ifstream in(cfg_.cache_path);
  if (!in) return;
  std::string magic, version;
  in >> magic >> version;
  if (magic != kCacheMagic || version != "v" + std::to_string(kCacheVersion)) return;
  std::string key;
  uint64_t stride = 0, hi = 0, count = 0;
  in >> key >> stride;
  if (key != "stride" || stride != cfg_.stride) return;
  in >> key >> hi >> count;
  if (key != "covered") return;
  std::vector<Checkpoint> table;
  uint64_t n, p;
  while (in >> n >> p) table.push_back({n, p});
  // Reject anything that does not look like a table this code would write.
  if (table.empty() || table.front() != Checkpoint{1, 2}) return;
  for (size_t i = 1; i < table.size(); ++i) {
    if (table[i].n != i * cfg_.stride || table[i].p <= table[i - 1].p || table[i].p >= hi) return;
  }
  if (count < table.back().n) return;
  table_ = std::move(table);
  covered_hi_ = hi;
  covered_count_ = count;
}

void PrimeIndexer::save_cache() const {
  if (cfg_.cache_path.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  namespace fs = std::filesystem;
  fs::path path(cfg_.cache_path);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return;
    out << kCacheMagic << " v" << kCacheVersion << "\n";
    out << "stride " << cfg_.stride << "\n";
    out << "covered " << covered_hi_ << " " << covered_count_ << "\n";
    for (const auto& c : table_) out << c.n << " " << c.p << "\n";
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
}

void PrimeIndexer::extend(uint64_t value_target, uint64_t index_target) {
  bool grew = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const uint64_t limit = cfg_.max_value;
    while (covered_hi_ <= value_target || covered_count_ < index_target) {
      if (covered_hi_ > limit) {
        throw_bound("prime index bound exceeded: the indexer is limited to values <= " +
                    std::to_string(limit) + " (raise --bound)");
      }
      // One batch of contiguous chunks, sieved in parallel, folded in order.
      std::vector<std::pair<uint64_t, uint64_t>> ranges;
      uint64_t lo = covered_hi_;
      // Small first chunks so tiny lookups stay cheap; doubles up to kExtendChunk.
      const uint64_t chunk = std::clamp<uint64_t>(covered_hi_, uint64_t{1} << 16, kExtendChunk);
      for (unsigned w = 0; w < cfg_.workers && lo <= limit; ++w) {
        uint64_t hi = lo + std::min<uint64_t>(chunk, limit - lo + 1);
        ranges.emplace_back(lo, hi);
        lo = hi;
      }
      std::vector<PrimeSegment> segs(ranges.size());
      if (ranges.size() == 1) {
        segs[0] = sieve_range(ranges[0].first, ranges[0].second, cfg_.sieve);
      } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < ranges.size(); ++i) {
          pool.emplace_back([&, i] { segs[i] = sieve_range(ranges[i].first, ranges[i].second, cfg_.sieve); });
        }
        for (auto& t : pool) t.join();
      }
      for (const auto& seg : segs) {
        uint64_t c = seg.count();
        uint64_t next_cp = (table_.back().n / cfg_.stride + 1) * cfg_.stride;
        if (covered_count_ + c >= next_cp) {
          uint64_t idx = covered_count_;
          seg.for_each_prime([&](uint64_t p) {
            ++idx;
            if (idx % cfg_.stride == 0) table_.push_back({idx, p});
          });
          grew = true;
        }
        covered_count_ += c;
        covered_hi_ = seg.hi();
      }
    }
  }
  if (grew) save_cache();
}

PrimeIndexer::Checkpoint PrimeIndexer::nearest_by_index(uint64_t n) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = std::upper_bound(table_.begin(), table_.end(), n,
                             [](uint64_t v, const Checkpoint& c) { return v < c.n; });
  return *std::prev(it);
}

PrimeIndexer::Checkpoint PrimeIndexer::nearest_by_value(uint64_t p) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = std::upper_bound(table_.begin(), table_.end(), p,
                             [](uint64_t v, const Checkpoint& c) { return v < c.p; });
  return *std::prev(it);
}

std::vector<PrimeIndexer::Checkpoint> PrimeIndexer::checkpoints() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_;
}

uint64_t PrimeIndexer::covered_hi() const {
  std::lock_guard<std::mutex> lock(mu_);
  return covered_hi_;
}

uint64_t PrimeIndexer::nth_prime(uint64_t n) {
  if (n == 0) throw_invalid("nth_prime: n must be >= 1");
  extend(0, n);
  Checkpoint c = nearest_by_index(n);
  uint64_t idx = c.n;
  if (idx == n) return c.p;
  uint64_t lo = c.p + 1;
  while (true) {
    if (lo > cfg_.max_value) throw_bound("nth_prime: p_" + std::to_string(n) + " exceeds the bound");
    uint64_t hi = lo + std::min<uint64_t>(kExtendChunk / 4, cfg_.max_value - lo + 1);
    PrimeSegment seg = sieve_range(lo, hi, cfg_.sieve);
    uint64_t cnt = seg.count();
    if (idx + cnt >= n) {
      uint64_t found = 0;
      seg.for_each_prime([&](uint64_t p) {
        if (found == 0 && ++idx == n) found = p;
      });
      return found;
    }
    idx += cnt;
    lo = hi;
  }
}

uint64_t PrimeIndexer::prime_count(uint64_t x) {
  if (x < 2) return 0;
  if (x > cfg_.max_value) throw_bound("prime_count: " + std::to_string(x) + " exceeds the bound");
  extend(x, 0);
  Checkpoint c = nearest_by_value(x);
  if (c.p == x) return c.n;
  return c.n + sieve_range(c.p + 1, x + 1, cfg_.sieve).count();
}

uint64_t PrimeIndexer::index_of_prime(uint64_t p) {
  if (p > cfg_.max_value) throw_bound("index_of_prime: " + std::to_string(p) + " exceeds the bound");
  if (!is_prime_64(p)) throw_invalid("index_of_prime: " + std::to_string(p) + " is not prime");
  return prime_count(p);
}

PrimeWindow PrimeIndexer::window(uint64_t n, unsigned m) {
  WindowStream s(*this, m, n, n);
  auto w = s.next();
  if (!w) throw Error(ErrorCode::kInternal, "window: stream ended early");
  return *w;
}

WindowStream PrimeIndexer::windows(unsigned m, uint64_t n_start, uint64_t n_end) {
  return WindowStream(*this, m, n_start, n_end);
}

WindowStream::WindowStream(PrimeIndexer& indexer, unsigned m, uint64_t n_start, uint64_t n_end)
    : indexer_(&indexer), m_(m), next_n_(n_start), n_end_(n_end) {
  if (m == 0) throw_invalid("window length m must be >= 1");
  if (n_start == 0) throw_invalid("window index must be >= 1");
  if (n_start <= n_end) {
    uint64_t p = indexer.nth_prime(n_start);
    buffer_.push_back(p);
    cursor_ = p + 1;
  }
}

bool WindowStream::refill() {
  const uint64_t bound = indexer_->config().max_value;
  if (cursor_ > bound) {
    throw_bound("window stream: p_" + std::to_string(next_n_ + m_) + " exceeds the bound " +
                std::to_string(bound));
  }
  if (head_ > 0) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(head_));
    head_ = 0;
  }
  uint64_t span = std::min<uint64_t>(uint64_t{1} << 20, bound - cursor_ + 1);
  PrimeSegment seg = sieve_range(cursor_, cursor_ + span, indexer_->config().sieve);
  seg.for_each_prime([&](uint64_t p) { buffer_.push_back(p); });
  cursor_ += span;
  return true;
}

std::optional<PrimeWindow> WindowStream::next() {
  if (next_n_ > n_end_) return std::nullopt;
  while (buffer_.size() - head_ < m_ + 1) refill();
  PrimeWindow w;
  w.n = next_n_;
  w.primes.assign(buffer_.begin() + static_cast<std::ptrdiff_t>(head_),
                  buffer_.begin() + static_cast<std::ptrdiff_t>(head_ + m_ + 1));
  ++head_;
  ++next_n_;
  return w;
}

}  // namespace primesym

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

#include "primesym/pattern.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "primesym/arith.hpp"
#include "primesym/error.hpp"
#include "primesym/primroot.hpp"

namespace primesym {

using json = nlohmann::json;

namespace {

void check_sign(int v, const char* what) {
  if (v != 1 && v != -1) throw_invalid(std::string(what) + " must be +1 or -1");
}

size_t upper_index(unsigned m, unsigned i, unsigned j) {
  // rows 0..i-1 hold m, m-1, ..., m-i+1 entries
  return static_cast<size_t>(i) * m - static_cast<size_t>(i) * (i - 1) / 2 + (j - i - 1);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Uniform pair test for odd primes a < b in window order.
struct UniformPair {
  int d1, d2;
  bool operator()(uint64_t a, uint64_t b) const {
    if (a == 2 || b == 2) return false;
    int recip = (a & b & 2) ? -1 : 1;
    if (d1 * d2 != recip) return false;
    return jacobi_u64(a, b) == d1;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// SignPattern

SignPattern SignPattern::uniform(unsigned m, int d1, int d2) {
  if (m == 0) throw_invalid("pattern: m must be >= 1");
  check_sign(d1, "d1");
  check_sign(d2, "d2");
  SignPattern p;
  p.mode = Mode::kUniform;
  p.m = m;
  p.d1 = d1;
  p.d2 = d2;
  p.delta = d1 * d2;
  return p;
}

SignPattern SignPattern::matrix(unsigned m, int delta, std::vector<int8_t> upper) {
  if (m == 0) throw_invalid("pattern: m must be >= 1");
  check_sign(delta, "delta");
  size_t want = static_cast<size_t>(m) * (m + 1) / 2;
  if (upper.size() != want) {
    throw_invalid("matrix pattern: expected " + std::to_string(want) + " entries for m = " +
                  std::to_string(m) + ", got " + std::to_string(upper.size()));
  }
  for (int8_t v : upper) check_sign(v, "matrix entry");
  SignPattern p;
  p.mode = Mode::kMatrix;
  p.m = m;
  p.delta = delta;
  p.upper = std::move(upper);
  return p;
}

SignPattern SignPattern::parse_uniform(std::string_view text, unsigned m) {
  if (text.size() != 2 || (text[0] != '+' && text[0] != '-') || (text[1] != '+' && text[1] != '-')) {
    throw_invalid("invalid sign pattern '" + std::string(text) + "' (expected ++, --, -+ or +-)");
  }
  return uniform(m, text[0] == '+' ? 1 : -1, text[1] == '+' ? 1 : -1);
}

SignPattern SignPattern::matrix_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_invalid(std::string("matrix pattern: ") + e.what());
  }
  if (!j.is_object() || !j.contains("m") || !j.contains("rows")) {
    throw_invalid("matrix pattern: need an object with 'm' and 'rows'");
  }
  unsigned m = j.at("m").get<unsigned>();
  int delta = j.value("delta", 1);
  const auto& rows = j.at("rows");
  if (!rows.is_array() || rows.size() != m) {
    throw_invalid("matrix pattern: 'rows' must have m = " + std::to_string(m) + " rows");
  }
  std::vector<int8_t> upper;
  for (unsigned i = 0; i < m; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != m - i) {
      throw_invalid("matrix pattern: row " + std::to_string(i) + " must have " +
                    std::to_string(m - i) + " entries");
    }
    for (const auto& v : row) upper.push_back(static_cast<int8_t>(v.get<int>()));
  }
  return matrix(m, delta, std::move(upper));
}

std::pair<int, int> SignPattern::expected(unsigned i, unsigned j) const {
  if (mode == Mode::kUniform) return {d1, d2};
  int dij = upper.at(upper_index(m, i, j));
  return {dij, delta * dij};
}

std::string SignPattern::label() const {
  if (mode == Mode::kMatrix) return "matrix";
  std::string s;
  s += d1 > 0 ? '+' : '-';
  s += d2 > 0 ? '+' : '-';
  return s;
}

// ---------------------------------------------------------------------------
// Predicates on one window

std::pair<int, int> pair_signs(uint64_t p, uint64_t q) {
  if (p == q) throw_invalid("pair_signs: primes must be distinct");
  if ((p & 1) == 0 || (q & 1) == 0) throw_invalid("pair_signs: primes must be odd");
  return {jacobi_u64(p, q), jacobi_u64(q, p)};
}

bool window_matches_signs(const PrimeWindow& window, const SignPattern& pattern) {
  if (window.primes.size() != pattern.m + 1) {
    throw_invalid("window has " + std::to_string(window.primes.size()) +
                  " primes but the pattern needs m + 1 = " + std::to_string(pattern.m + 1));
  }
  const auto& ps = window.primes;
  // Symbols with the prime 2 are undefined; such a window never matches.
  if (std::find(ps.begin(), ps.end(), 2) != ps.end()) return false;
  for (unsigned i = 0; i < ps.size(); ++i) {
    for (unsigned j = i + 1; j < ps.size(); ++j) {
      if (pair_signs(ps[i], ps[j]) != pattern.expected(i, j)) return false;
    }
  }
  return true;
}

StrictResult window_matches_strict(const PrimeWindow& window, unsigned m) {
  StrictResult out;
  const auto& ps = window.primes;
  const uint64_t bound = 2 * static_cast<uint64_t>(m) + 1;
  for (unsigned i = 0; i < ps.size(); ++i) {
    for (unsigned j = i + 1; j < ps.size(); ++j) {
      uint64_t diff = ps[j] > ps[i] ? ps[j] - ps[i] : ps[i] - ps[j];
      std::optional<uint64_t> witness;
      if (diff >= 2) {
        for (const auto& f : factorize_64(diff).factors) {
          if (f.prime > bound && f.exponent == 1) {
            witness = f.prime;
            break;
          }
        }
      }
      if (!witness) {
        out.ok = false;
        out.witnesses.clear();
        out.failing_pair = std::make_pair(i, j);
        return out;
      }
      out.witnesses.push_back({i, j, *witness});
    }
  }
  out.ok = true;
  return out;
}

std::vector<std::vector<int>> symbol_matrix(const PrimeWindow& window) {
  const auto& ps = window.primes;
  std::vector<std::vector<int>> out(ps.size(), std::vector<int>(ps.size(), 0));
  for (size_t i = 0; i < ps.size(); ++i) {
    for (size_t j = 0; j < ps.size(); ++j) {
      if (i != j) out[i][j] = jacobi_u64(ps[i], ps[j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predicate

Predicate Predicate::signs(SignPattern pattern, bool strict) {
  Predicate p;
  p.kind = Kind::kSigns;
  p.m = pattern.m;
  p.pattern = std::move(pattern);
  p.strict = strict;
  return p;
}

Predicate Predicate::primroot(unsigned m) {
  if (m == 0) throw_invalid("pattern: m must be >= 1");
  Predicate p;
  p.kind = Kind::kPrimRoot;
  p.m = m;
  return p;
}

Predicate Predicate::parse(std::string_view spec, unsigned m, bool strict,
                           const std::string& matrix_json) {
  if (spec == "primroot") {
    if (strict) throw_invalid("--strict applies to sign patterns only");
    return primroot(m);
  }
  if (spec.starts_with("matrix:")) {
    SignPattern pat = SignPattern::matrix_from_json(matrix_json);
    if (pat.m != m) {
      throw_invalid("matrix pattern has m = " + std::to_string(pat.m) + " but --m is " +
                    std::to_string(m));
    }
    return signs(std::move(pat), strict);
  }
  return signs(SignPattern::parse_uniform(spec, m), strict);
}

bool Predicate::matches(const PrimeWindow& window) const {
  if (window.primes.size() != m + 1) throw_invalid("window length does not match the predicate");
  if (kind == Kind::kPrimRoot) return window_pairwise_primroot(window);
  if (!window_matches_signs(window, pattern)) return false;
  return !strict || window_matches_strict(window, m).ok;
}

std::string Predicate::describe() const {
  std::ostringstream os;
  if (kind == Kind::kPrimRoot) {
    os << "primroot m=" << m;
    return os.str();
  }
  if (pattern.mode == SignPattern::Mode::kUniform) {
    os << "signs m=" << m << " d1=" << (pattern.d1 > 0 ? "+1" : "-1")
       << " d2=" << (pattern.d2 > 0 ? "+1" : "-1");
  } else {
    os << "matrix m=" << m << " delta=" << pattern.delta << " upper=";
    for (int8_t v : pattern.upper) os << (v > 0 ? '+' : '-');
  }
  if (strict) os << " strict";
  return os.str();
}

uint64_t Predicate::hash() const { return fnv1a(describe()); }

std::string Predicate::label() const {
  return kind == Kind::kPrimRoot ? std::string("primroot") : pattern.label();
}

// ---------------------------------------------------------------------------
// Records

std::string to_json(const MatchRecord& record, const Predicate& predicate) {
  json j;
  j["n"] = record.n;
  j["m"] = predicate.m;
  j["pattern"] = record.pattern;
  if (predicate.kind == Predicate::Kind::kSigns &&
      predicate.pattern.mode == SignPattern::Mode::kMatrix) {
    json rows = json::array();
    for (unsigned i = 0; i < predicate.m; ++i) {
      json row = json::array();
      for (unsigned j2 = i + 1; j2 <= predicate.m; ++j2) row.push_back(predicate.pattern.expected(i, j2).first);
      rows.push_back(row);
    }
    j["delta"] = predicate.pattern.delta;
    j["rows"] = rows;
  }
  j["primes"] = record.primes;
  if (predicate.strict) {
    json w = json::array();
    for (const auto& pw : record.witnesses) w.push_back({{"i", pw.i}, {"j", pw.j}, {"p", pw.prime}});
    j["witnesses"] = w;
  }
  return j.dump();
}

MatchRecord match_from_json(const std::string& line, const Predicate& predicate) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw_invalid(std::string("match record: ") + e.what());
  }
  MatchRecord r;
  try {
    r.n = j.at("n").get<uint64_t>();
    r.primes = j.at("primes").get<std::vector<uint64_t>>();
    r.pattern = j.at("pattern").get<std::string>();
    if (j.contains("witnesses")) {
      for (const auto& w : j.at("witnesses")) {
        r.witnesses.push_back({w.at("i").get<unsigned>(), w.at("j").get<unsigned>(), w.at("p").get<uint64_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw_invalid(std::string("match record: ") + e.what());
  }
  PrimeWindow w{r.n, r.primes};
  if (r.pattern != predicate.label() || r.primes.size() != predicate.m + 1 ||
      !predicate.matches(w)) {
    throw Error(ErrorCode::kVerificationFailed,
                "match record n=" + std::to_string(r.n) + " does not satisfy " + predicate.describe());
  }
  for (size_t i = 1; i < r.primes.size(); ++i) {
    if (r.primes[i] <= r.primes[i - 1] || !is_prime_64(r.primes[i])) {
      throw Error(ErrorCode::kVerificationFailed, "match record primes are not increasing primes");
    }
  }
  if (predicate.strict && r.witnesses != window_matches_strict(w, predicate.m).witnesses) {
    throw Error(ErrorCode::kVerificationFailed, "match record witnesses do not re-verify");
  }
  return r;
}

std::string csv_header(unsigned m) {
  std::string s = "n";
  for (unsigned i = 0; i <= m; ++i) s += ",p" + std::to_string(i);
  return s;
}

std::string to_csv(const MatchRecord& record) {
  std::string s = std::to_string(record.n);
  for (uint64_t p : record.primes) s += "," + std::to_string(p);
  return s;
}

std::string to_bfile(const MatchRecord& record, uint64_t sequence_index) {
  return std::to_string(sequence_index) + " " + std::to_string(record.n);
}

// ---------------------------------------------------------------------------
// Checkpoints

std::optional<SearchCheckpoint> load_search_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    json j = json::parse(ss.str());
    if (j.at("schema") != "primesym.search-checkpoint" || j.at("version") != 1) {
      throw_invalid("checkpoint " + path + " has an unknown schema");
    }
    SearchCheckpoint cp;
    cp.predicate = j.at("predicate").get<std::string>();
    cp.predicate_hash = std::stoull(j.at("predicate_hash").get<std::string>(), nullptr, 16);
    cp.n_min = j.at("n_min").get<uint64_t>();
    cp.last_n = j.at("last_n").get<uint64_t>();
    cp.matches = j.at("matches").get<uint64_t>();
    return cp;
  } catch (const json::exception& e) {
    throw_invalid("checkpoint " + path + " is malformed: " + e.what());
  }
}

void save_search_checkpoint(const std::string& path, const SearchCheckpoint& cp) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cp.predicate_hash));
  json j = {{"schema", "primesym.search-checkpoint"},
            {"version", 1},
            {"predicate", cp.predicate},
            {"predicate_hash", hash},
            {"n_min", cp.n_min},
            {"last_n", cp.last_n},
            {"matches", cp.matches}};
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kInternal, "cannot write checkpoint " + tmp);
    out << j.dump(2) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kInternal, "cannot replace checkpoint " + path + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Engine

namespace {

struct Hit {
  size_t pos;
  std::vector<PairWitness> witnesses;
};

// Decides the windows starting at buffer positions [begin, end). Every window
// needs buffer[pos .. pos+m], which the caller guarantees.
class ChunkScanner {
 public:
  ChunkScanner(const Predicate& pred, const std::vector<uint64_t>& buf)
      : pred_(pred), buf_(buf), m_(pred.m) {}

  std::vector<Hit> scan(size_t begin, size_t end) {
    std::vector<Hit> hits;
    if (begin >= end) return hits;
    const bool uniform_prefilter =
        pred_.kind == Predicate::Kind::kPrimRoot ||
        pred_.pattern.mode == SignPattern::Mode::kUniform;
    if (!uniform_prefilter) {
      for (size_t s = begin; s < end; ++s) {
        if (full_check(s)) hits.push_back(finish(s));
      }
      return hits;
    }
    // Primitive roots are non-residues, so (-1,-1) prefilters primroot scans.
    UniformPair pair = pred_.kind == Predicate::Kind::kPrimRoot
                           ? UniformPair{-1, -1}
                           : UniformPair{pred_.pattern.d1, pred_.pattern.d2};
    begin_ = begin;
    good_back_.assign(end - begin + m_ + 1, -1);
    size_t s = begin;
    while (s < end) {
      if (buf_[s] == 2) {
        // Only the window at n = 1 contains 2; decide it directly.
        if (full_check(s)) hits.push_back(finish(s));
        ++s;
        continue;
      }
      size_t next = s + 1;
      bool ok = true;
      for (size_t j = s + 1; j <= s + m_; ++j) {
        int gb = good_back(j, pair);
        if (static_cast<size_t>(gb) < j - s) {
          ok = false;
          next = std::max(s + 1, j - static_cast<size_t>(gb));
          break;
        }
      }
      if (ok && accept_candidate(s)) hits.push_back(finish(s));
      s = next;
    }
    return hits;
  }

 private:
  // Number of l = 1, 2, ... (up to m, not crossing begin_) for which
  // (buf[j-l], buf[j]) satisfies the pair test, stopping at the first failure.
  int good_back(size_t j, const UniformPair& pair) {
    int8_t& memo = good_back_[j - begin_];
    if (memo >= 0) return memo;
    int count = 0;
    size_t max_l = std::min<size_t>(m_, j - begin_);
    for (size_t l = 1; l <= max_l; ++l) {
      if (!pair(buf_[j - l], buf_[j])) break;
      ++count;
    }
    memo = static_cast<int8_t>(count);
    return count;
  }

  PrimeWindow window_at(size_t s) const {
    return PrimeWindow{0, std::vector<uint64_t>(buf_.begin() + static_cast<std::ptrdiff_t>(s),
                                                buf_.begin() + static_cast<std::ptrdiff_t>(s + m_ + 1))};
  }

  bool accept_candidate(size_t s) {
    if (pred_.kind == Predicate::Kind::kPrimRoot) return window_pairwise_primroot(window_at(s));
    if (pred_.strict) return strict_check(s);
    return true;
  }

  bool full_check(size_t s) {
    PrimeWindow w = window_at(s);
    if (pred_.kind == Predicate::Kind::kPrimRoot) return window_pairwise_primroot(w);
    if (!window_matches_signs(w, pred_.pattern)) return false;
    return !pred_.strict || strict_check(s);
  }

  bool strict_check(size_t s) {
    StrictResult r = window_matches_strict(window_at(s), m_);
    if (r.ok) last_witnesses_ = std::move(r.witnesses);
    return r.ok;
  }

  Hit finish(size_t s) {
    Hit h{s, {}};
    if (pred_.strict) h.witnesses = std::move(last_witnesses_);
    last_witnesses_.clear();
    return h;
  }

  const Predicate& pred_;
  const std::vector<uint64_t>& buf_;
  const unsigned m_;
  size_t begin_ = 0;
  std::vector<int8_t> good_back_;
  std::vector<PairWitness> last_witnesses_;
};

}  // namespace

SearchResult find_matches(PrimeIndexer& indexer, const Predicate& predicate,
                          const SearchOptions& options,
                          const std::function<bool(const MatchRecord&)>& sink) {
  if (predicate.m == 0) throw_invalid("search: m must be >= 1");
  if (predicate.m > 100) throw_invalid("search: m above 100 is not supported");
  if (options.n_min == 0) throw_invalid("search: n_min must be >= 1");
  const unsigned workers = std::max(1u, options.workers);
  const uint64_t bound = indexer.config().max_value;

  SearchResult result;
  uint64_t start_n = options.n_min;
  SearchCheckpoint cp{predicate.describe(), predicate.hash(), options.n_min, 0, 0};
  if (!options.checkpoint_path.empty()) {
    if (auto prev = load_search_checkpoint(options.checkpoint_path)) {
      if (prev->predicate_hash != cp.predicate_hash || prev->n_min != options.n_min) {
        throw_invalid("checkpoint " + options.checkpoint_path + " belongs to a different search ('" +
                      prev->predicate + "' from n=" + std::to_string(prev->n_min) + ")");
      }
      cp = *prev;
      start_n = cp.last_n + 1;
      result.resumed = true;
      result.matches = cp.matches;
      result.last_n = cp.last_n;
    }
  }
  auto save_cp = [&](uint64_t last_n) {
    result.last_n = last_n;
    if (options.checkpoint_path.empty()) return;
    cp.last_n = last_n;
    cp.matches = result.matches;
    save_search_checkpoint(options.checkpoint_path, cp);
  };
  auto limit_reached = [&] { return options.limit != 0 && result.matches >= options.limit; };

  if (start_n > options.n_max || limit_reached()) {
    result.exhausted = start_n > options.n_max;
    return result;
  }

  const unsigned m = predicate.m;
  std::vector<uint64_t> buf;
  uint64_t base_n = start_n;  // index of buf[0]
  uint64_t cursor = indexer.nth_prime(start_n);
  const auto t0 = std::chrono::steady_clock::now();
  uint64_t decided = 0;

  while (true) {
    // Sieve the next batch, one contiguous slice per worker.
    if (cursor > bound) {
      save_cp(base_n - 1);
      throw_bound("search reached the sieve bound " + std::to_string(bound) + " at n = " +
                  std::to_string(base_n) + " (raise --bound)");
    }
    std::vector<std::pair<uint64_t, uint64_t>> ranges;
    uint64_t lo = cursor;
    for (unsigned w = 0; w < workers && lo <= bound; ++w) {
      uint64_t hi = lo + std::min<uint64_t>(options.batch_values, bound - lo + 1);
      ranges.emplace_back(lo, hi);
      lo = hi;
    }
    std::vector<std::vector<uint64_t>> pieces(ranges.size());
    auto sieve_piece = [&](size_t i) {
      pieces[i] = sieve_range(ranges[i].first, ranges[i].second, indexer.config().sieve).primes();
    };
    if (ranges.size() == 1) {
      sieve_piece(0);
    } else {
      std::vector<std::thread> pool;
      for (size_t i = 0; i < ranges.size(); ++i) pool.emplace_back(sieve_piece, i);
      for (auto& t : pool) t.join();
    }
    for (const auto& piece : pieces) buf.insert(buf.end(), piece.begin(), piece.end());
    cursor = lo;

    if (buf.size() < m + 1) continue;
    size_t count = buf.size() - m;  // windows fully inside the buffer
    uint64_t last_wanted = options.n_max;
    if (base_n + count - 1 > last_wanted) count = static_cast<size_t>(last_wanted - base_n + 1);

    // Decide the windows in parallel over contiguous position slices.
    std::vector<std::vector<Hit>> slices(workers);
    size_t per = (count + workers - 1) / workers;
    auto scan_slice = [&](unsigned w) {
      size_t b = std::min(count, static_cast<size_t>(w) * per);
      size_t e = std::min(count, b + per);
      ChunkScanner scanner(predicate, buf);
      slices[w] = scanner.scan(b, e);
    };
    if (workers == 1) {
      scan_slice(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan_slice, w);
      for (auto& t : pool) t.join();
    }

    // Slices are contiguous and ascending, so concatenation preserves order.
    for (auto& slice : slices) {
      for (auto& hit : slice) {
        MatchRecord rec;
        rec.n = base_n + hit.pos;
        rec.primes.assign(buf.begin() + static_cast<std::ptrdiff_t>(hit.pos),
                          buf.begin() + static_cast<std::ptrdiff_t>(hit.pos + m + 1));
        rec.pattern = predicate.label();
        rec.witnesses = std::move(hit.witnesses);
        ++result.matches;
        bool more = sink(rec);
        if (limit_reached() || !more) {
          save_cp(rec.n);
          return result;
        }
      }
    }

    decided += count;
    uint64_t last_n = base_n + count - 1;
    save_cp(last_n);
    if (options.progress) {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      options.progress({last_n, result.matches, secs > 0 ? static_cast<double>(decided) / secs : 0});
    }
    if (last_n >= options.n_max) {
      result.exhausted = true;
      return result;
    }
    if (options.stop && options.stop->load()) {
      result.interrupted = true;
      return result;
    }
    buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(count));
    base_n += count;
  }
}

}  // namespace primesym

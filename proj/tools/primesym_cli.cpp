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

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "primesym/primesym.h"

namespace {

primesym_context* g_ctx = nullptr;

extern "C" void on_sigint(int) {
  if (g_ctx) primesym_context_interrupt(g_ctx);
}

struct Global {
  std::string cache_dir;
  unsigned workers = 1;
  uint64_t bound = 0;  // 0: library default
  bool quiet = false;
};

int report_error(primesym_status s) {
  std::cerr << "error: " << primesym_last_error() << "\n";
  return static_cast<int>(s);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text << "\n";
}

// Owns a library string.
struct LibString {
  char* p = nullptr;
  ~LibString() { primesym_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int parse_sign(const std::string& s) {
  if (s == "+1" || s == "1" || s == "+") return 1;
  if (s == "-1" || s == "-") return -1;
  throw CLI::ValidationError("sign", "expected +1 or -1, got '" + s + "'");
}

primesym_context* open_context(const Global& g) {
  std::string cache;
  if (!g.cache_dir.empty()) cache = g.cache_dir + "/prime-index.txt";
  primesym_context_options opt{};
  opt.cache_path = cache.empty() ? nullptr : cache.c_str();
  opt.workers = g.workers;
  opt.max_value = g.bound;
  primesym_context* ctx = nullptr;
  if (primesym_status s = primesym_context_new(&opt, &ctx); s != PRIMESYM_OK) {
    report_error(s);
    return nullptr;
  }
  g_ctx = ctx;
  std::signal(SIGINT, on_sigint);
  return ctx;
}

struct ContextGuard {
  primesym_context* ctx;
  ~ContextGuard() {
    g_ctx = nullptr;
    primesym_context_free(ctx);
  }
};

void progress_line(void* user, uint64_t current, uint64_t found, double rate) {
  if (*static_cast<bool*>(user)) return;
  std::fprintf(stderr, "\rn=%llu found=%llu rate=%.0f/s   ", static_cast<unsigned long long>(current),
               static_cast<unsigned long long>(found), rate);
  std::fflush(stderr);
}

// ---- search ----

struct SearchArgs {
  unsigned m = 1;
  std::string pattern;
  bool strict = false;
  uint64_t min_n = 2;
  uint64_t max_n = 0;
  bool first = false;
  bool all = false;
  uint64_t limit = 0;
  std::string checkpoint;
  std::string format = "jsonl";
  uint64_t bfile_offset = 1;
};

struct SearchSink {
  std::string format;
  uint64_t index;
};

int match_out(void* user, const primesym_match* m) {
  auto* sink = static_cast<SearchSink*>(user);
  if (sink->format == "csv") {
    std::cout << m->csv << "\n";
  } else if (sink->format == "bfile") {
    std::cout << sink->index++ << " " << m->n << "\n";
  } else {
    std::cout << m->json << "\n";
  }
  std::cout.flush();
  return 1;
}

int cmd_search(const Global& g, const SearchArgs& a) {
  std::string matrix_json, pattern = a.pattern;
  if (pattern.rfind("matrix:", 0) == 0) {
    matrix_json = read_file(pattern.substr(7));
    pattern = "matrix";
  }
  primesym_context* ctx = open_context(g);
  if (!ctx) return PRIMESYM_INVALID_ARGUMENT;
  ContextGuard guard{ctx};
  primesym_search_params p{};
  p.m = a.m;
  p.pattern = pattern.c_str();
  p.matrix_json = matrix_json.empty() ? nullptr : matrix_json.c_str();
  p.strict = a.strict;
  p.n_min = a.min_n;
  p.n_max = a.max_n;
  p.limit = a.first ? 1 : a.limit;
  if (!a.first && !a.all && a.limit == 0 && a.max_n == 0) p.limit = 1;
  p.checkpoint_path = a.checkpoint.empty() ? nullptr : a.checkpoint.c_str();
  if (a.format == "csv") {
    LibString header;
    if (auto s = primesym_csv_header(a.m, &header.p); s != PRIMESYM_OK) return report_error(s);
    std::cout << header.str() << "\n";
  }
  SearchSink sink{a.format, a.bfile_offset};
  bool quiet = g.quiet;
  struct Both {
    SearchSink* sink;
    bool* quiet;
  } both{&sink, &quiet};
  primesym_search_summary sum{};
  primesym_status s = primesym_search(
      ctx, &p, [](void* u, const primesym_match* m) { return match_out(static_cast<Both*>(u)->sink, m); },
      [](void* u, uint64_t c, uint64_t f, double r) { progress_line(static_cast<Both*>(u)->quiet, c, f, r); },
      &both, &sum);
  if (!g.quiet) std::fprintf(stderr, "\n");
  if (s == PRIMESYM_INTERRUPTED) {
    std::cerr << "interrupted at n=" << sum.last_n << "; checkpoint saved\n";
    return s;
  }
  if (s != PRIMESYM_OK) return report_error(s);
  if (!g.quiet) std::cerr << "matches=" << sum.matches << " last_n=" << sum.last_n << "\n";
  return 0;
}

// ---- admissible ----

int cmd_admissible(unsigned k, const std::string& variant, uint64_t crt_bound, const std::string& out,
                   bool quiet) {
  primesym_admissible* set = nullptr;
  if (auto s = primesym_admissible_build(k, variant.c_str(), crt_bound, &set); s != PRIMESYM_OK) {
    return report_error(s);
  }
  LibString js, report;
  primesym_status s = primesym_admissible_to_json(set, &js.p);
  if (s == PRIMESYM_OK) s = primesym_admissible_verify(set, &report.p);
  std::string h;
  for (size_t i = 0; i < primesym_admissible_size(set); ++i) {
    LibString e;
    primesym_admissible_element(set, i, &e.p);
    h += (i ? "," : "") + e.str();
  }
  primesym_admissible_free(set);
  if (!js.p) return report_error(s);
  write_output(out, js.str());
  if (!quiet) std::cerr << "H = {" << h << "}\n" << report.str() << "\n";
  if (s != PRIMESYM_OK) return report_error(s);
  return 0;
}

// ---- certificate ----

int load_certificate(const std::string& path, primesym_certificate** cert) {
  std::string text = read_file(path);
  primesym_status s = primesym_certificate_from_json(text.c_str(), cert);
  return s == PRIMESYM_OK ? 0 : report_error(s);
}

int cmd_cert_build(const std::string& from, const std::string& variant, unsigned m, const std::string& d1,
                   const std::string& d2, const std::string& w, uint64_t max_w, const std::string& out,
                   bool quiet) {
  std::string text = read_file(from);
  primesym_admissible* set = nullptr;
  if (auto s = primesym_admissible_from_json(text.c_str(), &set); s != PRIMESYM_OK) return report_error(s);
  uint64_t wv = 0;
  if (w != "auto") {
    try {
      wv = std::stoull(w);
    } catch (const std::exception&) {
      primesym_admissible_free(set);
      std::cerr << "error: --w must be 'auto' or a positive integer\n";
      return PRIMESYM_INVALID_ARGUMENT;
    }
    if (wv == 0) {
      primesym_admissible_free(set);
      std::cerr << "error: --w must be positive\n";
      return PRIMESYM_INVALID_ARGUMENT;
    }
  }
  primesym_certificate* cert = nullptr;
  primesym_status s = primesym_certificate_build(set, variant.c_str(), m, parse_sign(d1), parse_sign(d2), wv,
                                                 max_w, &cert);
  primesym_admissible_free(set);
  if (s != PRIMESYM_OK) return report_error(s);
  LibString js, summary;
  s = primesym_certificate_to_json(cert, &js.p);
  if (s == PRIMESYM_OK) s = primesym_certificate_summary(cert, &summary.p);
  primesym_certificate_free(cert);
  if (s != PRIMESYM_OK) return report_error(s);
  write_output(out, js.str());
  if (!quiet) std::cerr << summary.str() << "\n";
  return 0;
}

int cmd_cert_verify(const std::string& path) {
  primesym_certificate* cert = nullptr;
  if (int rc = load_certificate(path, &cert)) return rc;
  LibString report;
  primesym_status s = primesym_certificate_verify(cert, &report.p);
  primesym_certificate_free(cert);
  if (report.p) std::cout << report.str() << "\n";
  if (s != PRIMESYM_OK) return report_error(s);
  return 0;
}

struct ScanArgs {
  std::string path;
  uint64_t min_n = 1;
  uint64_t max_n = 1000000;
  uint64_t max_hits = 0;
  bool no_primality = false;
  std::string checkpoint;
};

int cmd_cert_scan(const Global& g, const ScanArgs& a) {
  primesym_certificate* cert = nullptr;
  if (int rc = load_certificate(a.path, &cert)) return rc;
  primesym_context* ctx = open_context(g);
  if (!ctx) {
    primesym_certificate_free(cert);
    return PRIMESYM_INVALID_ARGUMENT;
  }
  ContextGuard guard{ctx};
  primesym_scan_params p{};
  p.n_min = a.min_n;
  p.n_max = a.max_n;
  p.max_hits = a.max_hits;
  p.test_primality = !a.no_primality;
  p.checkpoint_path = a.checkpoint.empty() ? nullptr : a.checkpoint.c_str();
  bool quiet = g.quiet;
  primesym_scan_summary sum{};
  primesym_status s = primesym_certificate_scan(
      ctx, cert, &p,
      [](void*, uint64_t, int, const char* js) {
        std::cout << js << "\n";
        std::cout.flush();
        return 1;
      },
      progress_line, &quiet, &sum);
  primesym_certificate_free(cert);
  if (!g.quiet) std::fprintf(stderr, "\n");
  std::fprintf(stderr,
               "{\"n_first\":%llu,\"n_last\":%llu,\"scanned\":%llu,\"hits\":%llu,\"probable_hits\":%llu,"
               "\"symbol_violations\":%llu,\"covering_checks\":%llu,\"covering_violations\":%llu,"
               "\"class_violations\":%llu,\"resumed\":%s}\n",
               (unsigned long long)sum.n_first, (unsigned long long)sum.n_last, (unsigned long long)sum.scanned,
               (unsigned long long)sum.hits, (unsigned long long)sum.probable_hits,
               (unsigned long long)sum.symbol_violations, (unsigned long long)sum.covering_checks,
               (unsigned long long)sum.covering_violations, (unsigned long long)sum.class_violations,
               sum.resumed ? "true" : "false");
  if (s != PRIMESYM_OK) return report_error(s);
  return 0;
}

// ---- prime ----

int cmd_prime_nth(const Global& g, uint64_t n) {
  primesym_context* ctx = open_context(g);
  if (!ctx) return PRIMESYM_INVALID_ARGUMENT;
  ContextGuard guard{ctx};
  uint64_t p = 0;
  if (auto s = primesym_nth_prime(ctx, n, &p); s != PRIMESYM_OK) return report_error(s);
  std::cout << p << "\n";
  return 0;
}

int cmd_prime_index(const Global& g, uint64_t p) {
  primesym_context* ctx = open_context(g);
  if (!ctx) return PRIMESYM_INVALID_ARGUMENT;
  ContextGuard guard{ctx};
  uint64_t n = 0;
  if (auto s = primesym_prime_index(ctx, p, &n); s != PRIMESYM_OK) return report_error(s);
  std::cout << n << "\n";
  return 0;
}

int cmd_prime_window(const Global& g, uint64_t n, unsigned m, bool symbols) {
  primesym_context* ctx = open_context(g);
  if (!ctx) return PRIMESYM_INVALID_ARGUMENT;
  ContextGuard guard{ctx};
  std::vector<uint64_t> primes(m + 1);
  if (auto s = primesym_window(ctx, n, m, primes.data()); s != PRIMESYM_OK) return report_error(s);
  for (size_t i = 0; i < primes.size(); ++i) std::cout << (i ? " " : "") << primes[i];
  std::cout << "\n";
  if (symbols) {
    std::vector<int> mat(primes.size() * primes.size());
    if (auto s = primesym_symbol_matrix(primes.data(), primes.size(), mat.data()); s != PRIMESYM_OK) {
      return report_error(s);
    }
    for (size_t i = 0; i < primes.size(); ++i) {
      for (size_t j = 0; j < primes.size(); ++j) {
        int v = mat[i * primes.size() + j];
        std::cout << (j ? " " : "") << (v > 0 ? "+" : v < 0 ? "-" : "0");
      }
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legendre-symbol patterns in consecutive primes"};
  app.require_subcommand(1);
  Global g;
  if (const char* env = std::getenv("PRIMESYM_CACHE_DIR")) g.cache_dir = env;
  app.add_option("--cache-dir", g.cache_dir, "Directory for the prime index cache (env PRIMESYM_CACHE_DIR)");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--bound", g.bound, "Largest value the prime sieve may reach (default 2^40)");
  app.add_flag("-q,--quiet", g.quiet, "No progress output on stderr");
  app.add_flag_callback("--version", [] {
    std::cout << "primesym " << primesym_version() << "\n";
    throw CLI::Success();
  });

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Find windows of consecutive primes matching a pattern");
  search->add_option("--m", sa.m, "Window has m+1 primes")->required()->check(CLI::PositiveNumber);
  search->add_option("--pattern", sa.pattern, "++, --, -+, +-, primroot or matrix:<file>")->required();
  search->add_flag("--strict", sa.strict, "Also require an exact witness prime > 2m+1 per pair");
  search->add_option("--min-n", sa.min_n, "First window index");
  search->add_option("--max-n", sa.max_n, "Last window index");
  auto* first = search->add_flag("--first", sa.first, "Stop after the first match");
  auto* all = search->add_flag("--all", sa.all, "Report every match up to --max-n");
  search->add_option("--limit", sa.limit, "Stop after this many matches");
  first->excludes(all);
  search->add_option("--checkpoint", sa.checkpoint, "Resume file, updated after every batch");
  search->add_option("--format", sa.format, "Output format")->check(CLI::IsMember({"jsonl", "csv", "bfile"}));
  search->add_option("--bfile-offset", sa.bfile_offset, "First index in b-file output");

  unsigned k = 2;
  std::string adm_variant = "lemma22", adm_out;
  uint64_t crt_bound = 0;
  auto* adm = app.add_subcommand("admissible", "Build and verify an admissible set");
  adm->add_option("--k", k, "Set size (k >= 2)")->required();
  adm->add_option("--variant", adm_variant, "lemma22 or lemma31")->check(CLI::IsMember({"lemma22", "lemma31"}));
  adm->add_option("--crt-bound", crt_bound, "Largest prime handled directly by the CRT step");
  adm->add_option("--out", adm_out, "Write the set JSON here instead of stdout");

  auto* cert = app.add_subcommand("certificate", "Progression certificates");
  cert->require_subcommand(1);
  std::string from, cvariant = "thm13", d1 = "+1", d2 = "+1", w = "auto", cout_path;
  unsigned cm = 1;
  uint64_t max_w = 0;
  auto* cbuild = cert->add_subcommand("build", "Solve the congruence system for b");
  cbuild->add_option("--from", from, "Admissible set JSON")->required();
  cbuild->add_option("--variant", cvariant, "thm13 or lemma32")->check(CLI::IsMember({"thm13", "lemma32"}));
  cbuild->add_option("--m", cm, "Window parameter m < k (thm13)");
  cbuild->add_option("--d1", d1, "(p_i / p_j) for i < j (thm13)");
  cbuild->add_option("--d2", d2, "(p_j / p_i) for i < j (thm13)");
  cbuild->add_option("--w", w, "Prime cutoff or 'auto'");
  cbuild->add_option("--max-w", max_w, "Refuse w above this value");
  cbuild->add_option("--out", cout_path, "Write the certificate here instead of stdout");
  std::string verify_path;
  auto* cverify = cert->add_subcommand("verify", "Re-derive every claim of a certificate");
  cverify->add_option("file", verify_path, "Certificate JSON")->required();
  ScanArgs scan;
  auto* cscan = cert->add_subcommand("scan", "Scan W n + b + h_s for prime-rich n");
  cscan->add_option("file", scan.path, "Certificate JSON")->required();
  cscan->add_option("--min-n", scan.min_n, "First n (>= 1)");
  cscan->add_option("--max-n", scan.max_n, "Last n");
  cscan->add_option("--max-hits", scan.max_hits, "Stop after this many hits");
  cscan->add_flag("--no-primality", scan.no_primality, "Check congruence structure only");
  cscan->add_option("--checkpoint", scan.checkpoint, "Resume file");

  auto* prime = app.add_subcommand("prime", "Prime indexing");
  prime->require_subcommand(1);
  uint64_t pn = 0, pp = 0, wn = 0;
  unsigned wm = 1;
  bool wsym = false;
  auto* nth = prime->add_subcommand("nth", "The n-th prime");
  nth->add_option("n", pn, "Index (p_1 = 2)")->required();
  auto* index = prime->add_subcommand("index", "Index of a prime");
  index->add_option("p", pp, "Prime")->required();
  auto* window = prime->add_subcommand("window", "Primes p_n ... p_{n+m}");
  window->add_option("--n", wn, "Start index")->required();
  window->add_option("--m", wm, "Window has m+1 primes")->required();
  window->add_flag("--symbols", wsym, "Print the symbol matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : PRIMESYM_INVALID_ARGUMENT;
  }

  try {
    if (search->parsed()) return cmd_search(g, sa);
    if (adm->parsed()) return cmd_admissible(k, adm_variant, crt_bound, adm_out, g.quiet);
    if (cbuild->parsed()) return cmd_cert_build(from, cvariant, cm, d1, d2, w, max_w, cout_path, g.quiet);
    if (cverify->parsed()) return cmd_cert_verify(verify_path);
    if (cscan->parsed()) return cmd_cert_scan(g, scan);
    if (nth->parsed()) return cmd_prime_nth(g, pn);
    if (index->parsed()) return cmd_prime_index(g, pp);
    if (window->parsed()) return cmd_prime_window(g, wn, wm, wsym);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return PRIMESYM_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return PRIMESYM_INVALID_ARGUMENT;
  }
  return PRIMESYM_INVALID_ARGUMENT;
}

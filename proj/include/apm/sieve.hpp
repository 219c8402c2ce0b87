#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "apm/errors.hpp"
#include "apm/parallel.hpp"

namespace apm::arith {

struct Factorization {
  std::uint64_t n = 1;
  std::vector<std::pair<std::uint64_t, int>> factors;  // (p, alpha), p ascending
};

struct SieveConfig {
  std::size_t segment_size = std::size_t{1} << 20;
  std::size_t max_bytes = std::size_t{3} << 30;  // lambda + spf arrays
  unsigned threads = 0;                          // 0 = hardware
};

// Λ(n) and smallest-prime-factor tables for 1..N. Immutable once built and
// safe to share across threads.
class SieveTable {
 public:
  SieveTable() = default;

  std::uint64_t limit() const { return limit_; }
  double lambda(std::uint64_t n) const { return lambda_[n]; }
  std::uint32_t smallest_prime_factor(std::uint64_t n) const {
    return spf_[n];
  }
  bool is_prime(std::uint64_t n) const { return n >= 2 && spf_[n] == n; }
  const std::vector<double>& lambda_raw() const { return lambda_; }

  static SieveTable build(std::uint64_t N, const SieveConfig& cfg = {});
  static SieveTable from_lambda(std::uint64_t N, std::vector<double> lam);

 private:
  std::uint64_t limit_ = 0;
  std::vector<double> lambda_;      // [0..N], index 0 unused
  std::vector<std::uint32_t> spf_;  // [0..N], spf[1] = 1
};

inline std::vector<std::uint32_t> primes_up_to(std::uint64_t n) {
  std::vector<bool> comp(n + 1, false);
  std::vector<std::uint32_t> ps;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (!comp[i]) {
      ps.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
  }
  return ps;
}

inline SieveTable SieveTable::build(std::uint64_t N, const SieveConfig& cfg) {
  if (N < 1) throw DomainError("build_sieve: N must be >= 1");
  if (N > 0xFFFFFFFFull)
    throw ResourceError("build_sieve: N exceeds the 2^32-1 index limit");
  std::size_t need = static_cast<std::size_t>(N + 1) * (sizeof(double) + 4);
  if (need > cfg.max_bytes)
    throw ResourceError("build_sieve: table needs " + std::to_string(need) +
                        " bytes, over the configured limit of " +
                        std::to_string(cfg.max_bytes) + " bytes");

  SieveTable t;
  t.limit_ = N;
  t.lambda_.assign(N + 1, 0.0);
  t.spf_.assign(N + 1, 0);
  if (N >= 1) t.spf_[1] = 1;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)N)) + 1;
  auto base = primes_up_to(root);

  std::size_t seg = std::max<std::size_t>(cfg.segment_size, 64);
  std::size_t n_seg = static_cast<std::size_t>((N - 1) / seg) + 1;

  parallel_blocks<int>(
      n_seg,
      [&](std::size_t si) {
        std::uint64_t lo = 2 + si * seg;
        std::uint64_t hi = std::min<std::uint64_t>(N, lo + seg - 1);
        if (lo > N) return 0;
        for (std::uint32_t p : base) {
          std::uint64_t pp = p;
          if (pp * pp > hi) break;
          std::uint64_t start = std::max<std::uint64_t>(pp * pp,
                                                        ((lo + pp - 1) / pp) * pp);
          for (std::uint64_t m = start; m <= hi; m += pp)
            if (!t.spf_[m]) t.spf_[m] = p;
        }
        for (std::uint64_t n = lo; n <= hi; ++n)
          if (!t.spf_[n]) t.spf_[n] = static_cast<std::uint32_t>(n);
        // Λ(n) = log p exactly when n is a power of its smallest prime.
        for (std::uint64_t n = lo; n <= hi; ++n) {
          std::uint64_t p = t.spf_[n], m = n;
          while (m % p == 0) m /= p;
          if (m == 1) t.lambda_[n] = std::log(static_cast<double>(p));
        }
        return 0;
      },
      cfg.threads);
  return t;
}

inline SieveTable SieveTable::from_lambda(std::uint64_t N,
                                          std::vector<double> lam) {
  SieveTable t;
  t.limit_ = N;
  t.lambda_ = std::move(lam);
  t.spf_.assign(N + 1, 0);
  if (N >= 1) t.spf_[1] = 1;
  auto base = primes_up_to(N);
  for (std::uint32_t p : base)
    for (std::uint64_t m = p; m <= N; m += p)
      if (!t.spf_[m]) t.spf_[m] = p;
  return t;
}

inline Factorization factorize(std::uint64_t n, const SieveTable& table) {
  if (n < 1 || n > table.limit())
    throw DomainError("factorize: n out of table range");
  Factorization f;
  f.n = n;
  while (n > 1) {
    std::uint64_t p = table.smallest_prime_factor(n);
    int a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    f.factors.emplace_back(p, a);
  }
  return f;
}

// Trial-division factorization for callers without a table (small arguments).
inline Factorization factorize64(std::uint64_t n) {
  if (n < 1) throw DomainError("factorize64: n must be >= 1");
  Factorization f;
  f.n = n;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    f.factors.emplace_back(p, a);
  }
  if (n > 1) f.factors.emplace_back(n, 1);
  return f;
}

inline int mobius(const Factorization& f) {
  for (auto& [p, a] : f.factors)
    if (a > 1) return 0;
  return (f.factors.size() % 2 == 0) ? 1 : -1;
}

inline std::uint64_t euler_phi(const Factorization& f) {
  std::uint64_t out = 1;
  for (auto& [p, a] : f.factors) {
    std::uint64_t pe = 1;
    for (int i = 1; i < a; ++i) pe *= p;
    out *= pe * (p - 1);
  }
  return out;
}

inline int mobius(std::uint64_t n, const SieveTable& t) {
  return mobius(factorize(n, t));
}
inline std::uint64_t euler_phi(std::uint64_t n, const SieveTable& t) {
  return euler_phi(factorize(n, t));
}
inline int mobius64(std::uint64_t n) { return mobius(factorize64(n)); }
inline std::uint64_t phi64(std::uint64_t n) {
  return euler_phi(factorize64(n));
}

inline bool is_squarefree(const Factorization& f) {
  for (auto& [p, a] : f.factors)
    if (a > 1) return false;
  return true;
}

inline std::uint64_t radical(const Factorization& f) {
  std::uint64_t r = 1;
  for (auto& [p, a] : f.factors) r *= p;
  return r;
}
inline std::uint64_t radical64(std::uint64_t n) {
  return radical(factorize64(n));
}

inline std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> ds{1};
  for (auto& [p, a] : f.factors) {
    std::size_t sz = ds.size();
    std::uint64_t pe = 1;
    for (int i = 1; i <= a; ++i) {
      pe *= p;
      for (std::size_t k = 0; k < sz; ++k) ds.push_back(ds[k] * pe);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

// Streams p = 2, 3, 5, ... up to limit in ascending order without holding
// a full table; bounded memory per segment.
template <typename Fn>
void for_each_prime(std::uint64_t limit, Fn&& fn,
                    std::size_t segment = std::size_t{1} << 20) {
  if (limit < 2) return;
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)limit)) + 1;
  auto base = primes_up_to(root);
  for (std::uint32_t p : base)
    if (p <= limit) fn(static_cast<std::uint64_t>(p));
  std::uint64_t lo = root + 1;
  std::vector<bool> comp;
  while (lo <= limit) {
    std::uint64_t hi = std::min(limit, lo + segment - 1);
    comp.assign(hi - lo + 1, false);
    for (std::uint32_t p : base) {
      std::uint64_t pp = p;
      std::uint64_t start = ((lo + pp - 1) / pp) * pp;
      for (std::uint64_t m = start; m <= hi; m += pp) comp[m - lo] = true;
    }
    for (std::uint64_t n = lo; n <= hi; ++n)
      if (!comp[n - lo]) fn(n);
    lo = hi + 1;
  }
}

// Binary Λ cache: "APML1", version 0x01, N as u64 LE, then N doubles LE.
inline void write_lambda_cache(const SieveTable& t, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ResourceError("cannot open cache file for write: " + path);
  std::fwrite("APML1", 1, 5, f);
  unsigned char ver = 0x01;
  std::fwrite(&ver, 1, 1, f);
  std::uint64_t n = t.limit();
  unsigned char nb[8];
  for (int i = 0; i < 8; ++i) nb[i] = (n >> (8 * i)) & 0xFF;
  std::fwrite(nb, 1, 8, f);
  std::fwrite(t.lambda_raw().data() + 1, sizeof(double), n, f);
  std::fclose(f);
}

inline SieveTable read_lambda_cache(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ResourceError("cannot open cache file: " + path);
  char magic[5];
  unsigned char ver = 0;
  if (std::fread(magic, 1, 5, f) != 5 || std::string(magic, 5) != "APML1" ||
      std::fread(&ver, 1, 1, f) != 1 || ver != 0x01) {
    std::fclose(f);
    throw DomainError("bad sieve cache header: " + path);
  }
  unsigned char nb[8];
  if (std::fread(nb, 1, 8, f) != 8) {
    std::fclose(f);
    throw DomainError("truncated sieve cache: " + path);
  }
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= std::uint64_t(nb[i]) << (8 * i);
  std::vector<double> lam(n + 1, 0.0);
  if (std::fread(lam.data() + 1, sizeof(double), n, f) != n) {
    std::fclose(f);
    throw DomainError("truncated sieve cache: " + path);
  }
  std::fclose(f);
  return SieveTable::from_lambda(n, std::move(lam));
}

}  // namespace apm::arith

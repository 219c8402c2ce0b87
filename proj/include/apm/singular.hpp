#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "apm/errors.hpp"
#include "apm/rational.hpp"
#include "apm/sieve.hpp"

namespace apm::singular {

using apm::Rat;

// Per-prime parameter r(p) seeding every multiplicative function here.
// Default instantiation: r(2) = 0 and r(p) = 1/(p-2) for odd p, so that
// 1 + r(p) = (p-1)/(p-2). Finitely many primes may be overridden.
struct LocalProfile {
  std::map<std::uint64_t, Rat> overrides;

  Rat r(std::uint64_t p) const {
    auto it = overrides.find(p);
    if (it != overrides.end()) return it->second;
    if (p == 2) return Rat(0);
    return Rat(1, static_cast<long>(p - 2));
  }
  bool is_default() const { return overrides.empty(); }
  std::uint64_t max_override() const {
    return overrides.empty() ? 0 : overrides.rbegin()->first;
  }

  // Lines "p num/den"; blank lines and '#' comments skipped.
  static LocalProfile parse(std::istream& in) {
    LocalProfile prof;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      std::uint64_t p;
      std::string val;
      if (!(row >> p >> val)) continue;
      prof.overrides[p] = parse_rat(val);
    }
    return prof;
  }
  static LocalProfile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open profile file: " + path);
    return parse(in);
  }
};

// Squarefree modulus; f_Delta and friends only see radicals, so the
// constructor normalizes to the squarefree kernel.
class DeltaModulus {
 public:
  explicit DeltaModulus(std::uint64_t d = 1) {
    if (d < 1) throw DomainError("DeltaModulus: must be positive");
    fac_ = arith::factorize64(d);
    delta_ = arith::radical(fac_);
    if (delta_ != d) fac_ = arith::factorize64(delta_);
  }
  std::uint64_t value() const { return delta_; }
  bool contains(std::uint64_t p) const { return delta_ % p == 0; }
  const arith::Factorization& factorization() const { return fac_; }

 private:
  std::uint64_t delta_ = 1;
  arith::Factorization fac_;
};

// f_Delta(n) = prod over distinct p|n with p∤Delta of (1 + r(p)).
inline Rat f_delta(const arith::Factorization& nf, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  Rat out(1);
  for (auto& [p, a] : nf.factors) {
    (void)a;
    if (!dm.contains(p)) out *= Rat(1) + prof.r(p);
  }
  return out;
}
inline Rat f_delta(std::uint64_t n, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  if (n < 1) throw DomainError("f_delta: n must be >= 1");
  return f_delta(arith::factorize64(n), dm, prof);
}

// g_Delta = Mobius inverse of f_Delta: zero off squarefree q coprime to
// Delta, else prod r(p) over p|q.
inline Rat g_delta(const arith::Factorization& qf, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  Rat out(1);
  for (auto& [p, a] : qf.factors) {
    if (a > 1 || dm.contains(p)) return Rat(0);
    out *= prof.r(p);
  }
  return out;
}
inline Rat g_delta(std::uint64_t q, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  if (q < 1) throw DomainError("g_delta: q must be >= 1");
  return g_delta(arith::factorize64(q), dm, prof);
}

// R_Delta prime-power table: p∤Delta -> (r - 1/p, -r/p, 0, ...);
// p|Delta -> (-1/p, 0, ...). Extended multiplicatively.
inline Rat r_delta_local(std::uint64_t p, int alpha, const DeltaModulus& dm,
                         const LocalProfile& prof) {
  long pl = static_cast<long>(p);
  if (dm.contains(p)) return alpha == 1 ? Rat(-1, pl) : Rat(0);
  if (alpha == 1) return prof.r(p) - Rat(1, pl);
  if (alpha == 2) return -prof.r(p) / pl;
  return Rat(0);
}

inline Rat r_delta(const arith::Factorization& nf, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  Rat out(1);
  for (auto& [p, a] : nf.factors) {
    Rat loc = r_delta_local(p, a, dm, prof);
    if (loc == 0) return Rat(0);
    out *= loc;
  }
  return out;
}
inline Rat r_delta(std::uint64_t n, const DeltaModulus& dm,
                   const LocalProfile& prof) {
  if (n < 1) throw DomainError("r_delta: n must be >= 1");
  return r_delta(arith::factorize64(n), dm, prof);
}

// I(p) = -r(1+3r+r^2) for odd p, 2 for p = 2; I(Delta) multiplicative on
// squarefree Delta, 0 otherwise, I(1) = 1.
inline Rat big_i_local(std::uint64_t p, const LocalProfile& prof) {
  if (p == 2) return Rat(2);
  Rat r = prof.r(p);
  return -r * (Rat(1) + 3 * r + r * r);
}

inline Rat big_i(std::uint64_t delta, const LocalProfile& prof) {
  if (delta < 1) throw DomainError("big_i: Delta must be >= 1");
  auto f = arith::factorize64(delta);
  if (!arith::is_squarefree(f)) return Rat(0);
  Rat out(1);
  for (auto& [p, a] : f.factors) {
    (void)a;
    out *= big_i_local(p, prof);
  }
  return out;
}

}  // namespace apm::singular

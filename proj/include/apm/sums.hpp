#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "apm/analytic.hpp"
#include "apm/errors.hpp"
#include "apm/rational.hpp"
#include "apm/singular.hpp"

namespace apm::sums {

using analytic::Cplx;
using singular::DeltaModulus;
using singular::LocalProfile;

struct SumValue {
  Rat value{0};
  std::uint64_t terms = 0;
};

// f_Delta(l) for l <= N, sieved once.
class FTable {
 public:
  FTable(std::uint64_t N, const DeltaModulus& dm, const LocalProfile& prof)
      : table_(arith::SieveTable::build(std::max<std::uint64_t>(N, 2))) {
    f_.resize(N + 1);
    f_[0] = Rat(0);
    for (std::uint64_t l = 1; l <= N; ++l)
      f_[l] = singular::f_delta(arith::factorize(l, table_), dm, prof);
  }
  const Rat& operator()(std::uint64_t l) const { return f_[l]; }
  const arith::SieveTable& sieve() const { return table_; }

 private:
  arith::SieveTable table_;
  std::vector<Rat> f_;
};

// ---------------------------------------------------------------------------
// S_Delta(X) = sum_q g(q) sum_{l+l' <= X, q | l+l', (ll',q)=1}
//              (X-l-l')^2 (l+l') f(l) f(l'), exact rationals. The threshold
// may be a non-integer rational (section-2 usage S_{dD}(X/d)).
// ---------------------------------------------------------------------------
inline SumValue s_delta_brute(const Rat& X, const DeltaModulus& dm,
                              const LocalProfile& prof,
                              const FTable* cached = nullptr) {
  if (X > 5000) throw ResourceError("s_delta_brute: X > 5000 refused (O(X^2))");
  SumValue out;
  if (X < 2) return out;
  std::uint64_t top =
      static_cast<std::uint64_t>(mpz_class(X.get_num() / X.get_den()).get_ui());
  const FTable* ft = cached;
  std::unique_ptr<FTable> own;
  if (!ft || ft->sieve().limit() < top) {
    own = std::make_unique<FTable>(top, dm, prof);
    ft = own.get();
  }
  // Folding the q-sum exactly: since q | n and (l, q) = 1 = (n-l, q),
  //   sum_{q|n} g(q) [ (l,q)=1 ] = prod_{p|n, p not | l Delta} (1 + r(p))
  // so c(n) = sum_{l<n} f(l) f(n-l) f_{l Delta}(n).
  for (std::uint64_t n = 2; n <= top; ++n) {
    out.terms += n - 1;  // combinatorial pair count of the defining sum
    Rat w = (X - Rat(long(n)));
    w = w * w * long(n);
    if (w == 0) continue;
    auto fn = arith::factorize64(n);
    Rat cn(0);
    for (std::uint64_t l = 1; l < n; ++l) {
      Rat gfac(1);
      for (auto& [p, a] : fn.factors) {
        (void)a;
        if (!dm.contains(p) && l % p != 0) gfac *= Rat(1) + prof.r(p);
      }
      cn += (*ft)(l) * (*ft)(n - l) * gfac;
    }
    out.value += w * cn;
  }
  return out;
}

inline SumValue s_delta_brute(std::uint64_t X, const DeltaModulus& dm,
                              const LocalProfile& prof,
                              const FTable* cached = nullptr) {
  if (X < 2) throw DomainError("s_delta_brute: X must be >= 2");
  return s_delta_brute(Rat(long(X)), dm, prof, cached);
}

// Exact series over an ascending X grid sharing one pass: expands
// (X-n)^2 n = X^2 n - 2X n^2 + n^3 against prefix sums of n^k c(n).
inline std::vector<Rat> s_delta_series(const std::vector<std::uint64_t>& xs,
                                       const DeltaModulus& dm,
                                       const LocalProfile& prof) {
  if (xs.empty()) return {};
  std::uint64_t top = xs.back();
  FTable ft(top, dm, prof);
  std::vector<Rat> out(xs.size(), Rat(0));
  Rat t1(0), t2(0), t3(0);  // prefix sums of n c(n), n^2 c(n), n^3 c(n)
  std::size_t xi = 0;
  for (std::uint64_t n = 2; n <= top; ++n) {
    while (xi < xs.size() && xs[xi] < n) {
      Rat X{long(xs[xi])};
      out[xi] = X * X * t1 - 2 * X * t2 + t3;
      ++xi;
    }
    Rat cn(0);
    auto fn = arith::factorize64(n);
    for (std::uint64_t l = 1; l < n; ++l) {
      Rat gfac(1);
      for (auto& [p, a] : fn.factors) {
        (void)a;
        if (!dm.contains(p) && l % p != 0) gfac *= Rat(1) + prof.r(p);
      }
      cn += ft(l) * ft(n - l) * gfac;
    }
    Rat nn{long(n)};
    t1 += nn * cn;
    t2 += nn * nn * cn;
    t3 += nn * nn * nn * cn;
  }
  while (xi < xs.size()) {
    Rat X{long(xs[xi])};
    out[xi] = X * X * t1 - 2 * X * t2 + t3;
    ++xi;
  }
  return out;
}

// L_Delta(q) at threshold X: the inner sum alone. Zero for q > X.
inline SumValue l_delta(std::uint64_t q, const Rat& X, const DeltaModulus& dm,
                        const LocalProfile& prof,
                        const FTable* cached = nullptr) {
  if (q < 1) throw DomainError("l_delta: q must be >= 1");
  SumValue out;
  if (X < 2) return out;
  std::uint64_t top =
      static_cast<std::uint64_t>(mpz_class(X.get_num() / X.get_den()).get_ui());
  const FTable* ft = cached;
  std::unique_ptr<FTable> own;
  if (!ft || ft->sieve().limit() < top) {
    own = std::make_unique<FTable>(top, dm, prof);
    ft = own.get();
  }
  for (std::uint64_t n = (q >= 2 ? q : 2); n <= top; n += (q >= 1 ? q : 1)) {
    if (n < 2) continue;
    Rat w = (X - Rat(long(n)));
    w = w * w * long(n);
    Rat wq(0);
    for (std::uint64_t l = 1; l < n; ++l) {
      if (std::gcd(l, q) != 1 || std::gcd(n - l, q) != 1) continue;
      wq += (*ft)(l) * (*ft)(n - l);
      ++out.terms;
    }
    out.value += w * wq;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section-2 splitting identities.
// ---------------------------------------------------------------------------
struct JStarDelta {
  Rat lhs, rhs_q, rhs_d;
};

inline JStarDelta j_star_delta(const Rat& X, const DeltaModulus& dm,
                               const LocalProfile& prof) {
  if (X > 2000) throw ResourceError("j_star_delta: X > 2000 refused");
  JStarDelta out{Rat(0), Rat(0), Rat(0)};
  if (X < 2) return out;
  std::uint64_t top =
      static_cast<std::uint64_t>(mpz_class(X.get_num() / X.get_den()).get_ui());
  FTable ft(top, dm, prof);

  // lhs: direct double sum with the f(l+l') weight
  for (std::uint64_t n = 2; n <= top; ++n) {
    Rat w = (X - Rat(long(n)));
    w = w * w * long(n);
    Rat fl = singular::f_delta(arith::factorize64(n), dm, prof);
    Rat inner(0);
    for (std::uint64_t l = 1; l < n; ++l) inner += ft(l) * ft(n - l);
    out.lhs += w * fl * inner;
  }

  // rhs_q: expand f(l+l') = sum_{q | l+l'} g(q); no coprimality here
  for (std::uint64_t n = 2; n <= top; ++n) {
    Rat w = (X - Rat(long(n)));
    w = w * w * long(n);
    Rat gsum(0);
    for (std::uint64_t q : arith::divisors(arith::factorize64(n)))
      gsum += singular::g_delta(arith::factorize64(q), dm, prof);
    Rat inner(0);
    for (std::uint64_t l = 1; l < n; ++l) inner += ft(l) * ft(n - l);
    out.rhs_q += w * gsum * inner;
  }

  // rhs_d: sum_d d^3 g(d) f(d)^2 S_{d Delta}(X/d), real threshold
  for (std::uint64_t d = 1; d <= top; ++d) {
    Rat g = singular::g_delta(arith::factorize64(d), dm, prof);
    if (g == 0) continue;
    Rat f = singular::f_delta(arith::factorize64(d), dm, prof);
    DeltaModulus dmd(d * dm.value());
    Rat s = s_delta_brute(X / long(d), dmd, prof).value;
    out.rhs_d += Rat(long(d)) * long(d) * long(d) * g * f * f * s;
  }
  return out;
}

// J*(X) = sum_Delta Delta^3 I(Delta) J*_Delta(X/Delta)
inline Rat j_star_lhs(const Rat& Y, const DeltaModulus& dm,
                      const LocalProfile& prof) {
  if (Y < 2) return Rat(0);
  std::uint64_t top =
      static_cast<std::uint64_t>(mpz_class(Y.get_num() / Y.get_den()).get_ui());
  FTable ft(top, dm, prof);
  Rat out(0);
  for (std::uint64_t n = 2; n <= top; ++n) {
    Rat w = (Y - Rat(long(n)));
    w = w * w * long(n);
    Rat fl = singular::f_delta(arith::factorize64(n), dm, prof);
    Rat inner(0);
    for (std::uint64_t l = 1; l < n; ++l) inner += ft(l) * ft(n - l);
    out += w * fl * inner;
  }
  return out;
}

inline Rat j_star(std::uint64_t X, const LocalProfile& prof) {
  if (X > 2000) throw ResourceError("j_star: X > 2000 refused");
  Rat out(0);
  for (std::uint64_t delta = 1; 2 * delta <= X; ++delta) {
    Rat I = singular::big_i(delta, prof);
    if (I == 0) continue;
    DeltaModulus dm(delta);
    Rat j = j_star_lhs(Rat(long(X)) / long(delta), dm, prof);
    out += Rat(long(delta)) * long(delta) * long(delta) * I * j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// h_q^u(N) for N = p^k: exact Laurent polynomials in t = p^u.
// ---------------------------------------------------------------------------
struct HPoly {
  std::map<long, Rat> c;  // exponent -> coefficient
  void add(long e, const Rat& v) {
    if (v == 0) return;
    auto [it, fresh] = c.emplace(e, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) c.erase(it);
    }
  }
  bool operator==(const HPoly& o) const { return c == o.c; }
  Cplx eval(double lnp, Cplx u) const {
    Cplx out(0, 0);
    for (auto& [e, v] : c) out += to_double(v) * std::exp(u * (double(e) * lnp));
    return out;
  }
};

// brute force over abcll' = p^k with l, l' | q
inline HPoly h_small_brute(std::uint64_t q, std::uint64_t p, int k,
                           const DeltaModulus& dm, const LocalProfile& prof) {
  HPoly out;
  bool p_in_q = (q % p == 0);
  for (int lam = 0; lam <= (p_in_q ? 1 : 0); ++lam)
    for (int lam2 = 0; lam2 <= (p_in_q ? 1 : 0); ++lam2)
      for (int gam = 0; lam + lam2 + gam <= k; ++gam) {
        Rat rc = (gam == 0) ? Rat(1)
                            : singular::r_delta_local(p, gam, dm, prof);
        if (rc == 0) continue;
        if (gam > 0 && p_in_q) continue;  // chi_0(p^gam) = 0
        for (int alp = 0; lam + lam2 + gam + alp <= k; ++alp) {
          // beta absorbs the rest; weight mu(l) mu(l') l R(c) c a^u
          Rat w = rc;
          if (lam) w = -w * long(p);
          if (lam2) w = -w;
          w *= rat_pow(Rat(long(p)), gam);  // the c factor
          out.add(alp, w);
        }
      }
  return out;
}

inline HPoly h_small_closed(std::uint64_t q, std::uint64_t p, int k,
                            const DeltaModulus& dm, const LocalProfile& prof) {
  HPoly out;
  if (q % p == 0) {
    // N^u (1 - p^{1-u}) = t^k - p t^{k-1}
    out.add(k, Rat(1));
    if (k >= 1) out.add(k - 1, Rat(-long(p)));
    return out;
  }
  for (int gam = 0; gam <= std::min(k, 2); ++gam) {
    Rat rc = (gam == 0) ? Rat(1) : singular::r_delta_local(p, gam, dm, prof);
    if (rc == 0) continue;
    Rat w = rc * rat_pow(Rat(long(p)), gam);
    for (int alp = 0; alp + gam <= k; ++alp) out.add(alp, w);
  }
  return out;
}

struct HSmall {
  HPoly brute, closed;
  bool exact_equal;
  Cplx brute_value, closed_value;
};

inline HSmall h_small(std::uint64_t q, Cplx u, std::uint64_t p, int k,
                      const DeltaModulus& dm, const LocalProfile& prof) {
  if (k < 0 || k > 8) throw DomainError("h_small: need 0 <= k <= 8");
  auto fp = arith::factorize64(p);
  if (fp.factors.size() != 1 || fp.factors[0].second != 1)
    throw DomainError("h_small: N must be a prime power (p prime)");
  HSmall out;
  out.brute = h_small_brute(q, p, k, dm, prof);
  out.closed = h_small_closed(q, p, k, dm, prof);
  out.exact_equal = (out.brute == out.closed);
  double lnp = std::log(double(p));
  out.brute_value = out.brute.eval(lnp, u);
  out.closed_value = out.closed.eval(lnp, u);
  return out;
}

// ---------------------------------------------------------------------------
// frak-h local sums: series sum_j h(p^j)^2 / p^{j(2+u)} against the closed
// rational functions in U = p^{-u}. The truncated series is closed with
// three exact geometric tails (h(p^j) = c1 t^j + c0 exactly for j >= 2).
// ---------------------------------------------------------------------------
struct FrakH {
  Cplx series, closed, residual;  // residual = series * (1 - p^{u-2})
};

inline FrakH frak_h(std::uint64_t p, Cplx u, const DeltaModulus& dm,
                    const LocalProfile& prof, char variant, int K = 40) {
  if (K < 40) throw DomainError("frak_h: cutoff K must be >= 40");
  double lnp = std::log(double(p));
  Cplx t = std::exp(u * lnp);        // p^u
  Cplx U = std::exp(-u * lnp);       // p^{-u}
  Cplx p2U = double(p) * double(p) * U;
  if (std::abs(p2U) <= 1.0)
    throw DomainError("frak_h: series needs |p^2 U| > 1");
  if (std::abs(t) * double(p) * double(p) <= 1.0)
    throw DomainError("frak_h: series needs |p^{2+u}| > 1");

  std::uint64_t q = 1;
  DeltaModulus dm_eff = dm;
  if (variant == 'p') {
    q = p;
  } else if (variant == '1') {
    if (dm.contains(p)) throw DomainError("frak_h: variant '1' needs p∤Delta");
  } else if (variant == '*') {
    if (!dm.contains(p))
      throw DomainError("frak_h: variant '1*' needs p|Delta");
  } else {
    throw DomainError("frak_h: variant must be 'p', '1' or '*'");
  }

  // series; beyond j = K either plain truncation (fast ratios) or the
  // exact geometric closure from h(p^j) = c1 t^j + c0 for j >= 2
  Cplx z = std::exp(-(2.0 + u) * lnp);  // p^{-(2+u)}
  Cplx r1 = t * t * z;                  // = p^{u-2}
  bool plain = std::max(std::abs(r1), std::abs(z)) <= 0.6;
  int Keff = plain ? std::max(K, 90) : K;
  Cplx series(0, 0);
  Cplx h_km1(0, 0), h_k(0, 0);
  // accumulate (h p^{-(2+u)j/2})^2 so neither factor overflows
  Cplx whalf = std::exp(-(2.0 + u) * (lnp / 2.0));
  Cplx wj(1, 0);
  for (int j = 0; j <= Keff; ++j) {
    HPoly h = h_small_closed(q, p, j, dm_eff, prof);
    Cplx hv = h.eval(lnp, u);
    Cplx scaled = hv * wj;
    series += scaled * scaled;
    if (j == Keff - 1) h_km1 = hv;
    if (j == Keff) h_k = hv;
    wj *= whalf;
  }
  if (!plain) {
    // |t - 1| > 0.4 here, so the two-point extraction is stable
    Cplx tK = std::exp(u * (double(Keff) * lnp));
    Cplx c1 = (h_k - h_km1) / (tK - tK / t);
    Cplx c0 = h_k - c1 * tK;
    Cplx r2 = 1.0 / (double(p) * double(p));
    Cplx r3 = z;
    auto geom_tail = [&](Cplx coef, Cplx ratio) {
      return coef * std::pow(ratio, double(Keff + 1)) / (1.0 - ratio);
    };
    series += geom_tail(c1 * c1, r1) + geom_tail(2.0 * c1 * c0, r2) +
              geom_tail(c0 * c0, r3);
  }

  FrakH out;
  out.series = series;
  out.residual = series * (1.0 - r1);
  switch (variant) {
    case 'p':
      out.closed = p2U * (1.0 - 2.0 / double(p) + U) / (p2U - 1.0);
      break;
    case '1': {
      double r = to_double(prof.r(p));
      out.closed = p2U * (1.0 + 2.0 * r / double(p) + r * r * U) / (p2U - 1.0);
      break;
    }
    default:
      out.closed = p2U / (p2U - 1.0);  // residual factor is exactly 1
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// a_q(n): brute double sum over D, D' <= A_max vs the local-product form
// C K(q) J_q(n).
// ---------------------------------------------------------------------------
struct DualValue {
  double brute;
  double brute_tail;  // heuristic truncation bound for the brute side
  double euler;
  double euler_tail;
};

inline std::vector<std::uint64_t> squarefree_supported(std::uint64_t top,
                                                       const DeltaModulus& dm,
                                                       const LocalProfile& prof) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= top; ++d) {
    auto fd = arith::factorize64(d);
    if (!arith::is_squarefree(fd)) continue;
    if (singular::g_delta(fd, dm, prof) == 0 && d != 1) continue;
    out.push_back(d);
  }
  return out;
}

inline double a_q_brute(std::uint64_t n, std::uint64_t q,
                        const DeltaModulus& dm, const LocalProfile& prof,
                        std::uint64_t a_max) {
  auto fq = arith::factorize64(q);
  if (!arith::is_squarefree(fq)) throw DomainError("a_q: q must be squarefree");
  auto hs = arith::divisors(fq);
  std::vector<std::uint64_t> ds = squarefree_supported(a_max, dm, prof);
  std::vector<double> gv(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    gv[i] = to_double(singular::g_delta(arith::factorize64(ds[i]), dm, prof));
  double total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.size(); ++j) {
      double gg = gv[i] * gv[j];
      if (gg == 0.0) continue;
      for (std::uint64_t h : hs) {
        std::uint64_t dh = std::lcm(ds[i], h);
        for (std::uint64_t h2 : hs) {
          std::uint64_t dh2 = std::lcm(ds[j], h2);
          if (n % std::gcd(dh, dh2) != 0) continue;
          double sign = (arith::mobius64(h) * arith::mobius64(h2));
          total += sign * gg / double(std::lcm(dh, dh2));
        }
      }
    }
  }
  return total;
}

inline double a_q_euler(std::uint64_t n, std::uint64_t q,
                        const DeltaModulus& dm, const LocalProfile& prof,
                        const analytic::ProductConfig& cfg, double* tail) {
  auto fq = arith::factorize64(q);
  if (!arith::is_squarefree(fq)) throw DomainError("a_q: q must be squarefree");
  auto C = analytic::euler_product(analytic::Kind::AQ, Cplx(2.0), dm, prof, cfg);
  double val = C.value.real();
  *tail = C.tail_bound;
  for (auto& [p, a] : fq.factors) {
    (void)a;
    double g = dm.contains(p) ? 0.0 : to_double(prof.r(p));
    val *= (1.0 - 1.0 / double(p)) / (1.0 + 2.0 * g / double(p));
  }
  for (auto& [p, a] : arith::factorize64(n).factors) {
    (void)a;
    if (q % p == 0) continue;
    double g = dm.contains(p) ? 0.0 : to_double(prof.r(p));
    double u1 = 1.0 + 2.0 * g / double(p);
    double U1 = g * g / double(p);
    val *= 1.0 + U1 / u1;
  }
  return val;
}

inline DualValue a_q(std::uint64_t n, std::uint64_t q, const DeltaModulus& dm,
                     const LocalProfile& prof, std::uint64_t a_max = 1000,
                     const analytic::ProductConfig& cfg = {}) {
  if (n < 1) throw DomainError("a_q: n must be >= 1");
  DualValue out{};
  out.brute = a_q_brute(n, q, dm, prof, a_max);
  double half = a_q_brute(n, q, dm, prof, a_max / 2);
  out.brute_tail = 2.0 * std::abs(out.brute - half);
  out.euler = a_q_euler(n, q, dm, prof, cfg, &out.euler_tail);
  return out;
}

// ---------------------------------------------------------------------------
// K_q(s) = sum_{n = 0 mod q} a_q(n)/n^s: truncated series with an
// Euler-Maclaurin smooth tail vs the closed zeta(s) P(s) theta_s(q) q^{-s}.
// ---------------------------------------------------------------------------
struct KqValue {
  Cplx series;
  double series_tail;
  Cplx closed;
  double closed_tail;
};

// sum_{m > M} m^{-s} by Euler-Maclaurin
inline Cplx zeta_tail_from(Cplx s, double M) {
  if (M < 16) {
    Cplx acc(0, 0);
    for (int m = int(M) + 1; m <= 24; ++m)
      acc += std::exp(-s * std::log(double(m)));
    return acc + zeta_tail_from(s, 24.0);
  }
  Cplx lnM = std::log(Cplx(M));
  Cplx b = std::exp(-s * lnM);  // M^{-s}
  Cplx sum = b * M / (s - 1.0) - 0.5 * b;
  Cplx poch = s;
  Cplx pw = b / M;
  for (int j = 0; j < 8; ++j) {
    sum += poch * pw / analytic::detail::kEmA[j];
    poch *= (s + Cplx(2 * j + 1)) * (s + Cplx(2 * j + 2));
    pw /= M * M;
  }
  return sum;
}

inline KqValue k_q(Cplx s, std::uint64_t q, const DeltaModulus& dm,
                   const LocalProfile& prof, std::uint64_t n_max = 100000,
                   std::uint64_t b_max = 20000,
                   const analytic::ProductConfig& cfg = {}) {
  if (s.real() < 1.5) throw DomainError("k_q: series regime needs Re s >= 3/2");
  auto fq = arith::factorize64(q);
  if (!arith::is_squarefree(fq)) throw DomainError("k_q: q must be squarefree");
  if (std::gcd(q, dm.value()) != 1)
    throw DomainError("k_q: closed form needs (q, Delta) = 1");

  // m(A) = g(A) G_q(A) over squarefree A: -1 per prime of A dividing q
  auto series_at = [&](std::uint64_t B) {
    // support of m(A) = g(A) G_q(A): squarefree A whose primes either
    // divide q (factor -1) or carry g(p) = r(p) != 0 off Delta
    std::vector<std::uint64_t> as;
    std::vector<double> mv;
    for (std::uint64_t d = 1; d <= B; ++d) {
      auto fd = arith::factorize64(d);
      if (!arith::is_squarefree(fd)) continue;
      double m = 1.0;
      for (auto& [p, e] : fd.factors) {
        (void)e;
        if (q % p == 0)
          m *= -1.0;
        else if (dm.contains(p))
          m = 0.0;
        else
          m *= to_double(prof.r(p));
      }
      if (m == 0.0 && d != 1) continue;
      as.push_back(d);
      mv.push_back(m);
    }
    // T(e) = sum over pairs with gcd = e of m m' / lcm
    std::vector<double> T(B + 1, 0.0);
    for (std::size_t i = 0; i < as.size(); ++i) {
      if (mv[i] == 0) continue;
      for (std::size_t j = 0; j < as.size(); ++j) {
        if (mv[j] == 0) continue;
        std::uint64_t g = std::gcd(as[i], as[j]);
        T[g] += mv[i] * mv[j] / double(std::lcm(as[i], as[j]));
      }
    }
    Cplx acc(0, 0);
    for (std::uint64_t e = 1; e <= B; ++e) {
      if (T[e] == 0.0) continue;
      std::uint64_t step = std::lcm(e, std::max<std::uint64_t>(q, 1));
      Cplx part(0, 0);
      for (std::uint64_t nn = step; nn <= n_max; nn += step)
        part += std::exp(-s * std::log(double(nn)));
      part += std::exp(-s * std::log(double(step))) *
              zeta_tail_from(s, std::floor(double(n_max) / double(step)));
      acc += T[e] * part;
    }
    return acc;
  };

  KqValue out{};
  // the raw cutoff series converges like c/B; one Richardson step in the
  // cutoff removes the 1/B term (validated against the closed form)
  Cplx series = series_at(b_max);
  Cplx series_half = series_at(b_max / 2);
  out.series = 2.0 * series - series_half;
  out.series_tail = std::abs(series - series_half);

  auto P = analytic::p_delta(s, dm, prof, cfg);
  Cplx closed = analytic::zeta(s) * P.value * analytic::theta_s(q, s, prof) *
                std::exp(-s * std::log(double(q)));
  out.closed = closed;
  out.closed_tail = P.tail_bound * std::abs(closed / P.value);
  return out;
}

// ---------------------------------------------------------------------------
// lattice pair count: #{(l,l') : l + l' = n, D|l, D'|l'} vs n/[D,D'].
// ---------------------------------------------------------------------------
struct LatticeCount {
  std::uint64_t exact;
  Rat main;
};

inline LatticeCount lattice_pair_count(std::uint64_t n, std::uint64_t D,
                                       std::uint64_t D2) {
  if (n < 2) throw DomainError("lattice_pair_count: n must be >= 2");
  LatticeCount out{0, Rat(0)};
  for (std::uint64_t l = D; l < n; l += D)
    if ((n - l) % D2 == 0) ++out.exact;
  std::uint64_t g = std::gcd(D, D2);
  if (n % g == 0) out.main = Rat(long(n)) / long(std::lcm(D, D2));
  return out;
}

}  // namespace apm::sums

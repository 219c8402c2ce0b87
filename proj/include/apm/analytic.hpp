#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "apm/characters.hpp"
#include "apm/errors.hpp"
#include "apm/singular.hpp"
#include "apm/zeta.hpp"

namespace apm::analytic {

using singular::DeltaModulus;
using singular::LocalProfile;

// ---------------------------------------------------------------------------
// Per-prime local data (Y := p^{-s}):
//   w_s(p)     = 1 + 2r/p + Y r^2/p
//   theta_s(p) = (1 - 1/p)/w_s(p)
//   psi_s(p)   = 1/(1 + rY)
//   delta_s(p) = 1 - Y
//   q_s(p)     = 1 + 2r/p + (rY/p)(p - 1 + r)  ( = w_s(p) + rY(1 - 1/p) )
// ---------------------------------------------------------------------------
struct EulerLocal {
  Cplx w, theta, psi, delta, q;
};

inline EulerLocal local_data(std::uint64_t p, Cplx s,
                             const LocalProfile& prof) {
  double r = to_double(prof.r(p));
  double ip = 1.0 / double(p);
  Cplx Y = std::exp(-s * std::log(double(p)));
  EulerLocal d;
  d.w = 1.0 + 2 * r * ip + Y * (r * r * ip);
  d.theta = (1.0 - ip) / d.w;
  d.psi = 1.0 / (1.0 + r * Y);
  d.delta = 1.0 - Y;
  d.q = 1.0 + 2 * r * ip + (r * Y * ip) * (double(p) - 1.0 + r);
  return d;
}

inline Cplx theta_s(std::uint64_t q, Cplx s, const LocalProfile& prof) {
  auto fq = arith::factorize64(q);
  Cplx out = double(arith::euler_phi(fq)) / double(q);
  for (auto& [p, a] : fq.factors) {
    (void)a;
    out /= local_data(p, s, prof).w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Euler products. Every product used here has local factor
// F_p = F(x, Y) with x = 1/p, Y = p^{-s} and r = r(p). Strategy: pull out
// explicit zeta-ratio accelerants where the raw factor fails to converge
// on the contours in use, multiply the compensated local factors directly
// for p <= P_max, and close the tail with prime-zeta sums of the log-series
// of the residual factor (standalone mode) or an explicit bound of the same
// terms (contour mode, where |Im s| is too large for zeta at k*s).
//
// The log-series coefficients are computed once per kind from the default
// profile's closed form r = x/(1-2x); profile overrides are therefore
// required to sit below the direct-prime cutoff.
// ---------------------------------------------------------------------------

enum class Kind {
  W,     // prod (1 + 2r/p + Y r^2/p)                    : P_Delta(s)
  QT,    // prod q_s(p)/(1 + xY)                         : Q_Delta residual
  QRAW,  // prod q_s(p), convergent for Re s > 0 only    : raw Q_Delta
  RT,    // prod (1 + r Y theta_s(p))                    : sum_q g theta_s / q^s
  AQ,    // prod (1 + 2r/p)                              : a_q leading constant
};

struct ProductConfig {
  long prime_cutoff = 10000;          // direct primes, standalone mode
  long contour_prime_cutoff = 100000; // direct primes, contour mode
  int max_zeta_accelerants = 8;       // explicit zeta-ratio factors allowed
  double tail_weight = 4.5;           // analytic tail kept up to this weight
  double tail_margin = 2.0;           // bound inflation on dropped terms
};

struct ProdValue {
  Cplx value{0.0, 0.0};
  double tail_bound = 0.0;
};

namespace eng {

struct Bivar {
  int dx, dy;
  std::vector<double> c;
  Bivar(int DX = 16, int DY = 12) : dx(DX), dy(DY), c((DX + 1) * (DY + 1), 0) {}
  double& at(int a, int b) { return c[a * (dy + 1) + b]; }
  double get(int a, int b) const {
    if (a < 0 || b < 0 || a > dx || b > dy) return 0.0;
    return c[a * (dy + 1) + b];
  }
};

inline Bivar bv_mul(const Bivar& f, const Bivar& g) {
  Bivar h(f.dx, f.dy);
  for (int a = 0; a <= f.dx; ++a)
    for (int b = 0; b <= f.dy; ++b) {
      double v = f.get(a, b);
      if (v == 0.0) continue;
      for (int a2 = 0; a2 + a <= f.dx; ++a2)
        for (int b2 = 0; b2 + b <= f.dy; ++b2) {
          double w = g.get(a2, b2);
          if (w != 0.0) h.at(a + a2, b + b2) += v * w;
        }
    }
  return h;
}

inline Bivar bv_add(Bivar f, const Bivar& g, double scale = 1.0) {
  for (std::size_t i = 0; i < f.c.size(); ++i) f.c[i] += scale * g.c[i];
  return f;
}

// log F for F = 1 + G with G(0,0) = 0.
inline Bivar bv_log(const Bivar& f) {
  Bivar g = f;
  g.at(0, 0) -= 1.0;
  Bivar out(f.dx, f.dy), pw = g;
  for (int k = 1; k <= f.dx + f.dy; ++k) {
    double s = ((k % 2) ? 1.0 : -1.0) / double(k);
    out = bv_add(out, pw, s);
    pw = bv_mul(pw, g);
  }
  return out;
}

// default-profile r as a series in x: x/(1-2x) = sum 2^{j-1} x^j
inline Bivar r_series(int DX = 16, int DY = 12) {
  Bivar r(DX, DY);
  double c = 1.0;
  for (int j = 1; j <= DX; ++j) {
    r.at(j, 0) = c;
    c *= 2.0;
  }
  return r;
}

struct TailTerm {
  int a, b;
  double c;
};

// log-series of the residual local factor per kind, default profile
inline const std::vector<TailTerm>& kind_series(Kind k) {
  static std::map<Kind, std::vector<TailTerm>> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;

  const int DX = 16, DY = 12;
  Bivar one(DX, DY);
  one.at(0, 0) = 1.0;
  Bivar x(DX, DY), Y(DX, DY), xY(DX, DY);
  x.at(1, 0) = 1.0;
  Y.at(0, 1) = 1.0;
  xY.at(1, 1) = 1.0;
  Bivar r = r_series(DX, DY);

  Bivar w = bv_add(bv_add(one, bv_mul(x, r), 2.0),
                   bv_mul(xY, bv_mul(r, r)));  // 1 + 2rx + r^2 xY
  Bivar F(DX, DY);
  switch (k) {
    case Kind::W:
      F = w;
      break;
    case Kind::QT: {
      // q_s = 1 + 2rx + rY(1-x) + r^2 xY, divided by (1 + xY)
      Bivar q = bv_add(bv_add(bv_add(one, bv_mul(x, r), 2.0),
                              bv_mul(bv_mul(r, Y), bv_add(one, x, -1.0))),
                       bv_mul(xY, bv_mul(r, r)));
      Bivar inv(DX, DY), pw = one;  // 1/(1+xY) = sum (-xY)^k
      for (int j = 0; j <= std::min(DX, DY); ++j) {
        inv = bv_add(inv, pw, (j % 2) ? -1.0 : 1.0);
        pw = bv_mul(pw, xY);
      }
      F = bv_mul(q, inv);
      break;
    }
    case Kind::QRAW: {
      F = bv_add(bv_add(bv_add(one, bv_mul(x, r), 2.0),
                        bv_mul(bv_mul(r, Y), bv_add(one, x, -1.0))),
                 bv_mul(xY, bv_mul(r, r)));
      break;
    }
    case Kind::RT: {
      // 1 + rY (1-x) / w
      Bivar winv(DX, DY), wg = w;
      wg.at(0, 0) = 0.0;
      Bivar pw = one;
      for (int j = 0; j <= DX; ++j) {
        winv = bv_add(winv, pw, (j % 2) ? -1.0 : 1.0);
        pw = bv_mul(pw, wg);
      }
      F = bv_add(one, bv_mul(bv_mul(bv_mul(r, Y), bv_add(one, x, -1.0)), winv));
      break;
    }
    case Kind::AQ:
      F = bv_add(one, bv_mul(x, r), 2.0);
      break;
  }
  Bivar L = bv_log(F);
  std::vector<TailTerm> terms;
  for (int a = 0; a <= DX; ++a)
    for (int b = 0; b <= DY; ++b) {
      double c = L.get(a, b);
      if (std::abs(c) > 1e-12) terms.push_back({a, b, c});
    }
  cache[k] = std::move(terms);
  return cache[k];
}

inline Cplx local_factor(Kind k, std::uint64_t p, Cplx Y,
                         const LocalProfile& prof) {
  double r = to_double(prof.r(p));
  double ip = 1.0 / double(p);
  switch (k) {
    case Kind::W:
      return 1.0 + 2 * r * ip + Y * (r * r * ip);
    case Kind::QT: {
      Cplx q = 1.0 + 2 * r * ip + (r * Y * ip) * (double(p) - 1.0 + r);
      return q / (1.0 + ip * Y);
    }
    case Kind::QRAW:
      return 1.0 + 2 * r * ip + (r * Y * ip) * (double(p) - 1.0 + r);
    case Kind::RT: {
      Cplx w = 1.0 + 2 * r * ip + Y * (r * r * ip);
      return 1.0 + r * Y * (1.0 - ip) / w;
    }
    case Kind::AQ:
      return Cplx(1.0 + 2 * r * ip, 0.0);
  }
  return Cplx(1.0);
}

inline const std::vector<std::uint32_t>& primes_cached(long limit) {
  static std::map<long, std::vector<std::uint32_t>> cache;
  auto it = cache.find(limit);
  if (it == cache.end())
    it = cache.emplace(limit, arith::primes_up_to(limit)).first;
  return it->second;
}

// upper bound for sum_{p > P} p^{-w}, w > 1
inline double prime_tail_bound(double w, double P) {
  if (w <= 1.0) return 1e300;
  return 1.3 * std::pow(P, 1.0 - w) / ((w - 1.0) * std::log(P));
}

}  // namespace eng

// Zeta-ratio accelerant for Q_Delta: prod_p (1 + p^{-1-s}) =
// zeta(1+s)/zeta(2+2s), with the Delta-primes divided back out. Returns 0
// exactly at the zeta(2+2s) pole (the product's genuine zero at s = -1/2).
inline Cplx q_delta_accelerant(Cplx s, const DeltaModulus& dm) {
  Cplx z2arg = 2.0 + 2.0 * s;
  if (std::abs(z2arg - Cplx(1.0)) < 1e-14) return Cplx(0.0);
  Cplx acc = zeta(1.0 + s) / zeta(z2arg);
  for (auto& [p, a] : dm.factorization().factors) {
    (void)a;
    acc /= 1.0 + std::exp(-(1.0 + s) * std::log(double(p)));
  }
  return acc;
}

inline ProdValue euler_product(Kind kind, Cplx s, const DeltaModulus& dm,
                               const LocalProfile& prof,
                               const ProductConfig& cfg = {},
                               bool contour_mode = false) {
  long P1 = contour_mode ? cfg.contour_prime_cutoff : cfg.prime_cutoff;
  if (P1 < 100) throw DomainError("euler_product: prime cutoff must be >= 100");
  if (prof.max_override() > std::uint64_t(P1))
    throw DomainError("euler_product: profile overrides exceed prime cutoff");
  if (dm.value() > std::uint64_t(P1))
    throw DomainError("euler_product: Delta primes exceed prime cutoff");

  double sigma = s.real();
  double strip_min;
  switch (kind) {
    case Kind::W: strip_min = -1.0; break;   // P_Delta contract
    case Kind::QT: strip_min = -0.5; break;  // zeta(s+1)-factored Q_Delta
    case Kind::QRAW: strip_min = 0.0; break;
    case Kind::RT: strip_min = 0.0; break;
    default: strip_min = -1e9; break;
  }
  if (sigma < strip_min - 1e-9)
    throw DomainError("euler_product: abscissa outside continuation strip");
  const auto& terms = eng::kind_series(kind);
  // defense in depth: every series term must converge as a prime sum
  for (const auto& t : terms) {
    if (t.a + t.b * sigma <= 1.0 - 1e-9)
      throw DomainError("euler_product: abscissa outside continuation strip");
  }

  ProdValue out;
  Cplx val(1.0, 0.0);
  if (kind == Kind::QT) {
    val = q_delta_accelerant(s, dm);
    if (val == Cplx(0.0)) {
      // zero from the accelerant; residual product still converges
      out.value = 0.0;
    }
  }

  const auto& ps = eng::primes_cached(P1);
  Cplx direct(1.0, 0.0);
  for (std::uint32_t p : ps) {
    if (dm.contains(p)) continue;
    Cplx Y = std::exp(-s * std::log(double(p)));
    direct *= eng::local_factor(kind, p, Y, prof);
  }
  val *= direct;

  // analytic tail over p > P1 (standalone) or bound (contour mode)
  double bound = 0.0;
  Cplx tail_log(0.0, 0.0);
  for (const auto& t : terms) {
    double wgt = t.a + t.b * sigma;
    if (!contour_mode && wgt <= cfg.tail_weight) {
      Cplx arg = Cplx(double(t.a)) + double(t.b) * s;
      Cplx pz = prime_zeta(arg);
      for (std::uint32_t p : ps) pz -= std::exp(-arg * std::log(double(p)));
      tail_log += t.c * pz;
    } else {
      bound += std::abs(t.c) * eng::prime_tail_bound(wgt, double(P1));
    }
  }
  val *= std::exp(tail_log);
  out.value = val;
  out.tail_bound = cfg.tail_margin * bound * std::abs(val);
  return out;
}

// P_Delta(s) = prod_{p not | Delta} w_s(p); valid for Re s >= -1.
inline ProdValue p_delta(Cplx s, const DeltaModulus& dm,
                         const LocalProfile& prof,
                         const ProductConfig& cfg = {},
                         bool contour_mode = false) {
  return euler_product(Kind::W, s, dm, prof, cfg, contour_mode);
}

// Q_Delta(s) via the zeta(s+1)-factored form; valid for Re s >= -1/2.
inline ProdValue q_delta(Cplx s, const DeltaModulus& dm,
                         const LocalProfile& prof,
                         const ProductConfig& cfg = {},
                         bool contour_mode = false) {
  return euler_product(Kind::QT, s, dm, prof, cfg, contour_mode);
}

// sum over all q of g_Delta(q) theta_s(q) / q^s as an Euler product.
inline ProdValue r_hat_full(Cplx s, const DeltaModulus& dm,
                            const LocalProfile& prof,
                            const ProductConfig& cfg = {},
                            bool contour_mode = false) {
  return euler_product(Kind::RT, s, dm, prof, cfg, contour_mode);
}

// R_s = sum_{q <= X} g_Delta(q) theta_s(q) / q^s (exact finite sum).
inline Cplx r_partial(Cplx s, double X, const DeltaModulus& dm,
                      const LocalProfile& prof,
                      const arith::SieveTable* table = nullptr) {
  Cplx sum(0.0, 0.0);
  if (X < 1.0) return sum;
  std::uint64_t top = static_cast<std::uint64_t>(X);
  for (std::uint64_t q = 1; q <= top; ++q) {
    arith::Factorization fq =
        table ? arith::factorize(q, *table) : arith::factorize64(q);
    if (!arith::is_squarefree(fq)) continue;
    Rat g = singular::g_delta(fq, dm, prof);
    if (g == 0) continue;
    Cplx th(1.0, 0.0);
    double phi_over_q = 1.0;
    for (auto& [p, a] : fq.factors) {
      (void)a;
      th /= local_data(p, s, prof).w;
      phi_over_q *= 1.0 - 1.0 / double(p);
    }
    sum += to_double(g) * phi_over_q * th * std::exp(-s * std::log(double(q)));
  }
  return sum;
}

// (A^<(X), A^>(X)) using the regularized F(1)^2/phi(q) = P(1) theta_1(q)/q.
inline std::pair<ProdValue, ProdValue> a_split(double X,
                                               const DeltaModulus& dm,
                                               const LocalProfile& prof,
                                               const ProductConfig& cfg = {}) {
  if (X < 1.0) throw DomainError("a_split: X must be >= 1");
  ProdValue P1 = p_delta(Cplx(1.0), dm, prof, cfg);
  Cplx partial = r_partial(Cplx(1.0), X, dm, prof);
  ProdValue full = r_hat_full(Cplx(1.0), dm, prof, cfg);
  ProdValue less{P1.value * partial, P1.tail_bound * std::abs(partial)};
  ProdValue greater{P1.value * (full.value - partial),
                    P1.tail_bound * std::abs(full.value - partial) +
                        std::abs(P1.value) * full.tail_bound};
  return {less, greater};
}

// Z(u) = zeta(2-u) P_Delta(u-1) pi^{u-1}  (variant A; variant B uses
// P_Delta(u) instead).
inline ProdValue z_kernel(Cplx u, const DeltaModulus& dm,
                          const LocalProfile& prof,
                          const ProductConfig& cfg = {},
                          bool variant_b = false) {
  Cplx zar = 2.0 - u;
  if (std::abs(zar - Cplx(1.0)) < 1e-14)
    throw DomainError("z_kernel: zeta pole at u = 1");
  ProdValue P = p_delta(variant_b ? u : u - 1.0, dm, prof, cfg);
  Cplx pref = zeta(zar) * std::exp((u - 1.0) * std::log(kPi));
  return {pref * P.value, std::abs(pref) * P.tail_bound};
}

// ---------------------------------------------------------------------------
// L-functions.
// ---------------------------------------------------------------------------

// L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta_H(s, a/q). At s = 1 the
// Hurwitz poles cancel for nonprincipal chi, leaving the digamma form
// L(1, chi) = -(1/q) sum_a chi(a) psi(a/q).
inline Cplx dirichlet_l(Cplx s, const dirichlet::DirichletCharacter& chi) {
  std::uint64_t q = chi.modulus();
  if (std::abs(s - Cplx(1.0)) < 1e-14) {
    if (chi.is_principal())
      throw DomainError("dirichlet_l: pole at s = 1 for principal chi");
    Cplx sum(0.0, 0.0);
    for (std::uint64_t a = 1; a <= q; ++a) {
      Cplx ca = chi.value(a);
      if (ca == Cplx(0.0)) continue;
      sum += ca * digamma(double(a) / double(q));
    }
    return -sum / double(q);
  }
  Cplx sum(0.0, 0.0);
  for (std::uint64_t a = 1; a <= q; ++a) {
    Cplx ca = chi.value(a);
    if (ca == Cplx(0.0)) continue;
    sum += ca * hurwitz_zeta(s, double(a) / double(q));
  }
  return std::exp(-s * std::log(double(q))) * sum;
}

// L via the primitive part: L_chi(s) = L_chi*(s) prod_{p|q}(1 - chi*(p) p^{-s}).
inline Cplx dirichlet_l_induced(Cplx s, const dirichlet::DirichletCharacter& chi) {
  auto [prim, d] = dirichlet::conductor_decompose(chi);
  (void)d;
  Cplx val = dirichlet_l(s, prim);
  auto fq = arith::factorize64(chi.modulus());
  for (auto& [p, a] : fq.factors) {
    (void)a;
    val *= Cplx(1.0) - prim.value(p) * std::exp(-s * std::log(double(p)));
  }
  return val;
}

// F_chi(s) = L_chi(s) L_chi(s+1) sum_n R_Delta(n) chi(n) / n^s,
// absolutely convergent for Re s > 0 since R_Delta(n) << n^{eps-1}.
inline Cplx f_chi(Cplx s, const dirichlet::DirichletCharacter& chi,
                  const DeltaModulus& dm, const LocalProfile& prof,
                  double tol = 1e-9, std::size_t n_cap = 400000) {
  if (s.real() <= 0.0) throw DomainError("f_chi: needs Re s > 0");
  if (chi.is_principal() && std::abs(s - Cplx(1.0)) < 1e-14)
    throw DomainError("f_chi: L pole at s = 1 for principal chi");
  // R_Delta(n) by a multiplicative sieve; R is supported on cubefree n and
  // decays like n^{-2+eps} away from Delta.
  std::size_t N = std::min<std::size_t>(
      n_cap, std::max<std::size_t>(
                 2000, static_cast<std::size_t>(std::pow(
                           10.0 / tol, 1.0 / (1.0 + s.real())))));
  auto spf_table = arith::SieveTable::build(N);
  Cplx series(0.0, 0.0);
  for (std::size_t n = 1; n <= N; ++n) {
    auto idx = chi.value_index(n);
    if (!idx) continue;
    Rat rv = singular::r_delta(arith::factorize(n, spf_table), dm, prof);
    if (rv == 0) continue;
    series += to_double(rv) * chi.value(n) * std::exp(-s * std::log(double(n)));
  }
  return dirichlet_l(s, chi) * dirichlet_l(s + 1.0, chi) * series;
}

}  // namespace apm::analytic

namespace apm::dirichlet {

// sum over chi mod q of chi(-1) F_chi(s) F_chibar(w); absolutely
// convergent oracle regime Re s, Re w > 1 only.
inline analytic::Cplx char_pair_sum(std::uint64_t q, analytic::Cplx s,
                                    analytic::Cplx w,
                                    const singular::DeltaModulus& dm,
                                    const singular::LocalProfile& prof,
                                    double tol = 1e-9) {
  if (s.real() <= 1.0 || w.real() <= 1.0)
    throw DomainError("char_pair_sum: oracle needs Re s, Re w > 1");
  CharacterGroup g(q);
  analytic::Cplx out(0.0, 0.0);
  for (const auto& chi : g) {
    analytic::Cplx sign = chi.value(q > 1 ? q - 1 : 1);
    out += sign * analytic::f_chi(s, chi, dm, prof, tol) *
           analytic::f_chi(w, g.conjugate(chi), dm, prof, tol);
  }
  return out;
}

}  // namespace apm::dirichlet

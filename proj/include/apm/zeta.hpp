#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "apm/errors.hpp"
#include "apm/sieve.hpp"

namespace apm::analytic {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Gamma. Lanczos (g = 7, 9 terms); reflection below Re z = 1/2 with a
// log-sin that stays finite for large |Im z|. log_gamma is principal up to
// a 2{pi}ik ambiguity from the reflection branch, which cancels in the
// exp / ratio uses below.
// ---------------------------------------------------------------------------

namespace detail {
inline const double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

inline Cplx log_sin_pi(Cplx z) {
  // log sin(pi z) without overflow: peel off the dominant exponential.
  const double ln2 = 0.6931471805599453094;
  if (z.imag() < 0) {
    // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 i pi z})
    Cplx q = Cplx(0, -2 * kPi) * z;
    return Cplx(0, -kPi / 2) + Cplx(0, kPi) * z +
           std::log(Cplx(1) - std::exp(q)) - ln2;
  }
  // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
  Cplx q = Cplx(0, 2 * kPi) * z;
  return Cplx(0, kPi / 2) - Cplx(0, kPi) * z +
         std::log(Cplx(1) - std::exp(q)) - ln2;
}
}  // namespace detail

inline Cplx log_gamma(Cplx z) {
  if (z.real() < 0.5) {
    // Gamma(z)Gamma(1-z) = pi / sin(pi z)
    return std::log(Cplx(kPi)) - detail::log_sin_pi(z) - log_gamma(Cplx(1) - z);
  }
  z -= 1.0;
  Cplx x = detail::kLanczos[0];
  for (int i = 1; i < 9; ++i) x += detail::kLanczos[i] / (z + Cplx(i));
  Cplx t = z + 7.5;
  return 0.5 * std::log(2 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline Cplx gamma(Cplx z) { return std::exp(log_gamma(z)); }

// Gamma(a)/Gamma(b), safe for large imaginary parts.
inline Cplx gamma_ratio(Cplx a, Cplx b) {
  return std::exp(log_gamma(a) - log_gamma(b));
}

// ---------------------------------------------------------------------------
// Hurwitz zeta by Euler-Maclaurin, valid well past Re s > -3; the node
// count scales with |Im s| so the asymptotic correction stays convergent.
// ---------------------------------------------------------------------------

namespace detail {
// (2k)! / B_{2k}, k = 1..12
inline const double kEmA[12] = {12.0,
                                -720.0,
                                30240.0,
                                -1209600.0,
                                47900160.0,
                                -1.8924375803183791606e9,
                                7.47242496e10,
                                -2.950130727918164224e12,
                                1.1646782814350067249e14,
                                -4.5979787224074726105e15,
                                1.8152105401943546773e17,
                                -7.1661652561756670113e18};
}  // namespace detail

inline Cplx hurwitz_zeta(Cplx s, double a, std::size_t min_nodes = 0) {
  if (!(a > 0.0) || a > 1.0)
    throw DomainError("hurwitz_zeta: a must lie in (0,1]");
  if (s == Cplx(1.0, 0.0)) throw DomainError("hurwitz_zeta: pole at s = 1");
  double t = std::abs(s.imag());
  std::size_t N = static_cast<std::size_t>(
      std::max(24.0, t * (s.real() >= 1.0 ? 0.30 : 0.55)));
  N = std::max(N, min_nodes);
  Cplx sum = 0;
  for (std::size_t n = 0; n < N; ++n)
    sum += std::exp(-s * std::log(double(n) + a));
  double na = double(N) + a;
  Cplx lnna = std::log(Cplx(na));
  Cplx b = std::exp(-s * lnna);  // (N+a)^{-s}
  sum += b * na / (s - 1.0);
  sum += 0.5 * b;
  // asymptotic corrections with early exit on the smallest term
  Cplx poch = s;
  Cplx pw = b / na;  // (N+a)^{-s-1}
  double prev = 1e300;
  for (int j = 0; j < 12; ++j) {
    Cplx term = poch * pw / detail::kEmA[j];
    double mag = std::abs(term);
    if (mag > prev) break;  // divergent tail of the asymptotic series
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
    prev = mag;
    poch *= (s + Cplx(2 * j + 1)) * (s + Cplx(2 * j + 2));
    pw /= na * na;
  }
  return sum;
}

inline Cplx zeta(Cplx s) {
  if (s == Cplx(1.0, 0.0)) throw DomainError("zeta: pole at s = 1");
  return hurwitz_zeta(s, 1.0);
}

// digamma for real x > 0 (asymptotic series after shifting x above 8)
inline double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: needs x > 0");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x, inv2 = inv * inv;
  // log x - 1/(2x) - sum B_{2j}/(2j) x^{-2j}
  double series = std::log(x) - 0.5 * inv -
                  inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 -
                          inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
  return acc + series;
}

// ---------------------------------------------------------------------------
// Prime zeta P(z) = sum_p p^{-z}, Re z > 1.05, via Moebius inversion of
// log zeta. The canonical branch of log zeta (the one equal to
// sum_p -Log(1 - p^{-z})) is pinned against a partial Euler product when
// the principal branch could be off by 2{pi}i.
// ---------------------------------------------------------------------------

namespace detail {
inline const std::vector<std::uint32_t>& small_primes_1000() {
  static const std::vector<std::uint32_t> ps = arith::primes_up_to(1000);
  return ps;
}
}  // namespace detail

inline Cplx log_zeta_canonical(Cplx z) {
  Cplx w = std::log(zeta(z));
  if (z.real() >= 1.75) return w;  // |zeta - 1| < 1, principal is canonical
  if (z.real() < 1.05)
    throw DomainError("log_zeta_canonical: needs Re z >= 1.05");
  Cplx ref = 0;
  for (std::uint32_t p : detail::small_primes_1000())
    ref -= std::log(Cplx(1) - std::exp(-z * std::log(double(p))));
  double k = std::round((ref - w).imag() / (2 * kPi));
  return w + Cplx(0, 2 * kPi * k);
}

inline Cplx prime_zeta(Cplx z) {
  if (z.real() < 1.05) throw DomainError("prime_zeta: needs Re z >= 1.05");
  static const int kMu[] = {0, 1,  -1, -1, 0, -1, 1, -1, 0, 0,
                            1, -1, 0,  -1, 1, 1,  0, -1, 0, -1};
  Cplx out = log_zeta_canonical(z);
  for (int k = 2; k < 20; ++k) {
    if (kMu[k] == 0) continue;
    if (k * z.real() > 46.0) break;  // remaining terms are below 1e-14
    out += double(kMu[k]) / double(k) * log_zeta_canonical(double(k) * z);
  }
  return out;
}

}  // namespace apm::analytic

#pragma once

#include <array>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "apm/analytic.hpp"
#include "apm/quadrature.hpp"

namespace apm::contour {

using analytic::DeltaModulus;
using analytic::LocalProfile;
using analytic::ProductConfig;

// Values of a slow integrand factor keyed by the node ordinate, shared
// across a family of integrals on the same line.
struct LineCache {
  std::map<std::uint64_t, Cplx> vals;
  std::mutex mu;
  template <typename F>
  Cplx get(double t, F&& compute) {
    std::uint64_t k;
    std::memcpy(&k, &t, 8);
    {
      std::lock_guard<std::mutex> g(mu);
      auto it = vals.find(k);
      if (it != vals.end()) return it->second;
    }
    Cplx v = compute(t);
    {
      std::lock_guard<std::mutex> g(mu);
      vals.emplace(k, v);
    }
    return v;
  }
};

// ---------------------------------------------------------------------------
// W_u(X) = (1/2 pi i) int_(c) Gamma((w+u+k)/2)/Gamma((u+k)/2) X^w dw/w.
// Rapid Gamma decay; c > 0 so the w = 0 residue is to the left.
// ---------------------------------------------------------------------------
inline Cplx w_kernel(Cplx u, double X, int k, double c = 2.0,
                     QuadratureSpec spec = {}) {
  if (!(X > 0.0)) throw DomainError("w_kernel: X must be positive");
  if (c <= 0.0) throw DomainError("w_kernel: contour must have c > 0");
  spec.abscissa = c;
  spec.decay = DecayClass::Gamma;
  spec.conjugate_symmetric = false;
  if (spec.truncation == 100.0)
    spec.truncation = 140.0 + 2.0 * std::abs(u.imag()) + (c > 10 ? 4 * c : 0);
  Cplx lgref = analytic::log_gamma((u + double(k)) / 2.0);
  double lnX = std::log(X);
  auto f = [&](Cplx w) {
    return std::exp(analytic::log_gamma((w + u + double(k)) / 2.0) - lgref +
                    w * lnX) /
           w;
  };
  spec.tolerance = 1e-12 * (1.0 + std::abs(f(Cplx(c, 0.1))));
  return line_integral(f, spec).value;
}

// One Gamma-node pass shared by many kernel arguments on the same line:
// W_u(X_m) for every X_m from stored integrand samples.
inline std::vector<Cplx> w_kernel_batch(Cplx u, int k,
                                        const std::vector<double>& xs,
                                        double c = 8.0) {
  if (c <= 0.0) throw DomainError("w_kernel_batch: contour must have c > 0");
  double T = 140.0 + 2.0 * std::abs(u.imag()) + (c > 10 ? 4 * c : 0);
  double h = 0.5;
  std::size_t n_panels = static_cast<std::size_t>(std::ceil(2 * T / h));
  Cplx lgref = analytic::log_gamma((u + double(k)) / 2.0);
  // nodes over [-T, T]
  std::vector<double> ts;
  std::vector<Cplx> g;
  ts.reserve(n_panels * 15);
  double width = 2 * T / double(n_panels);
  for (std::size_t i = 0; i < n_panels; ++i) {
    double mid = -T + (double(i) + 0.5) * width;
    for (int j = 0; j < 15; ++j) ts.push_back(mid + 0.5 * width * qdetail::kGlX[j]);
  }
  g.resize(ts.size());
  std::size_t block = ts.size() / 64 + 1;
  parallel_blocks<int>((ts.size() + block - 1) / block, [&](std::size_t bi) {
    for (std::size_t i = bi * block; i < std::min(ts.size(), (bi + 1) * block);
         ++i) {
      Cplx w(c, ts[i]);
      g[i] = std::exp(analytic::log_gamma((w + u + double(k)) / 2.0) - lgref) /
             w;
    }
    return 0;
  });
  std::vector<Cplx> out(xs.size());
  for (std::size_t m = 0; m < xs.size(); ++m) {
    double lnX = std::log(xs[m]);
    Cplx acc(0, 0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n_panels; ++i) {
      for (int j = 0; j < 15; ++j, ++idx) {
        Cplx w(c, ts[idx]);
        acc += qdetail::kGlW[j] * g[idx] * std::exp(w * lnX);
      }
    }
    out[m] = acc * (0.5 * width) / (2 * kPi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Meijer G^{2,2}_{2,2}: contour evaluation and the closed Gamma form.
// ---------------------------------------------------------------------------
struct MeijerResult {
  Cplx quadrature;
  Cplx closed;
  IntegralResult detail;
};

inline MeijerResult meijer_g(Cplx a, Cplx a2, Cplx b, Cplx b2,
                             QuadratureSpec spec = {}) {
  double A = std::max(a.real(), a2.real()) - 1.0;
  double B = std::min(b.real(), b2.real());
  if (!(A < B)) throw DomainError("meijer_g: empty contour strip");
  if (spec.abscissa == 0.5 && !(A < 0.5 && 0.5 < B))
    spec.abscissa = 0.5 * (A + B);
  spec.decay = DecayClass::Gamma;
  spec.conjugate_symmetric = false;
  if (spec.truncation == 100.0) {
    double im = std::abs(a.imag()) + std::abs(a2.imag()) +
                std::abs(b.imag()) + std::abs(b2.imag());
    spec.truncation = 45.0 + im;
  }
  auto f = [&](Cplx s) {
    return std::exp(analytic::log_gamma(b - s) + analytic::log_gamma(b2 - s) +
                    analytic::log_gamma(1.0 - a + s) +
                    analytic::log_gamma(1.0 - a2 + s));
  };
  MeijerResult out;
  out.detail = line_integral(f, spec);
  out.quadrature = out.detail.value;
  out.closed = std::exp(analytic::log_gamma(b + 1.0 - a) +
                        analytic::log_gamma(b2 + 1.0 - a) +
                        analytic::log_gamma(b + 1.0 - a2) +
                        analytic::log_gamma(b2 + 1.0 - a2) -
                        analytic::log_gamma(2.0 + b + b2 - a - a2));
  return out;
}

// ---------------------------------------------------------------------------
// Parity kernels. The inner integral
//   j(u) = (1/2 pi i) int_(eps)
//          G((1-s)/2) G((s-u)/2) G(s) G(u+2-s) / (G(s/2) G((u+1-s)/2)) ds
// reduces through the duplication formula to Meijer G values with the
// constant 2^u/pi (the factor printed as 2^s/sqrt(pi) in the source text
// has s unbound; the duplication constant is what the reduction yields,
// and the quadrature below confirms it).
// ---------------------------------------------------------------------------
struct ParityKernel {
  Cplx E, O;      // E_{s,w}, O_{s,w} at s = w = (u+1)/2
  Cplx g_e, g_o;  // closed forms
  Cplx j;         // quadrature of the inner integral
};

inline Cplx gamma_parity_ratio(Cplx z, int k) {
  return analytic::gamma_ratio((1.0 - z + double(k)) / 2.0,
                               (z + double(k)) / 2.0);
}

inline Cplx e_sw(Cplx s, Cplx w) {
  return gamma_parity_ratio(s, 0) * gamma_parity_ratio(w, 0);
}
inline Cplx o_sw(Cplx s, Cplx w) {
  return gamma_parity_ratio(s, 1) * gamma_parity_ratio(w, 1);
}

inline Cplx g_e_closed(Cplx u) {
  Cplx k = std::exp(u * std::log(2.0)) / kPi;
  return k * analytic::gamma(0.5 - u / 2.0) *
         (analytic::gamma(2.5 + u / 2.0) - analytic::gamma(1.5 + u / 2.0));
}
inline Cplx g_o_closed(Cplx u) {
  Cplx k = std::exp(u * std::log(2.0)) / kPi;
  return k * analytic::gamma(1.5 + u / 2.0) * analytic::gamma(1.5 - u / 2.0);
}

inline ParityKernel parity_kernels(Cplx u, double eps = 0.125,
                                   QuadratureSpec spec = {}) {
  // poles of Gamma(1/2 - u/2) and Gamma(3/2 +- u/2) rejected
  auto near_nonpos_int = [](Cplx z) {
    return z.real() < 0.5 && std::abs(z.imag()) < 1e-9 &&
           std::abs(z.real() - std::round(z.real())) < 1e-9;
  };
  if (near_nonpos_int(0.5 - u / 2.0) || near_nonpos_int(1.5 - u / 2.0) ||
      near_nonpos_int(1.5 + u / 2.0))
    throw DomainError("parity_kernels: Gamma pole at this u");

  ParityKernel out;
  Cplx s0 = (u + 1.0) / 2.0;
  out.E = e_sw(s0, s0);
  out.O = o_sw(s0, s0);
  out.g_e = g_e_closed(u);
  out.g_o = g_o_closed(u);

  spec.abscissa = eps;
  spec.decay = DecayClass::Gamma;
  spec.conjugate_symmetric = false;
  if (spec.truncation == 100.0) spec.truncation = 70.0 + std::abs(u.imag());
  spec.tolerance = 1e-12;
  auto f = [&](Cplx s) {
    return std::exp(
        analytic::log_gamma((1.0 - s) / 2.0) +
        analytic::log_gamma((s - u) / 2.0) + analytic::log_gamma(s) +
        analytic::log_gamma(u + 2.0 - s) - analytic::log_gamma(s / 2.0) -
        analytic::log_gamma((u + 1.0 - s) / 2.0));
  };
  out.j = line_integral(f, spec).value;
  return out;
}

// ---------------------------------------------------------------------------
// Contour secondary terms. Tolerances in the specs below are relative to
// the natural X^{Re c + 4} scale of each integral.
// ---------------------------------------------------------------------------
struct SecondaryResult {
  Cplx value{0, 0};
  double trunc_err = 0, quad_err = 0;
  double product_tail = 0;  // dropped Euler-tail bound, relative
  Cplx variant{0, 0};       // the Q_Delta-based variant where applicable
};

namespace cdetail {

inline analytic::ProdValue q_contour(Cplx s, const DeltaModulus& dm,
                                     const LocalProfile& prof,
                                     const ProductConfig& cfg) {
  return analytic::q_delta(s, dm, prof, cfg, true);
}

}  // namespace cdetail

// E_Delta(X) = 2 int_(-1/4) Q_Delta(s) X^{s+4} ds / (s(s+3)(s+4))
inline SecondaryResult e_delta(double X, const DeltaModulus& dm,
                               const LocalProfile& prof,
                               QuadratureSpec spec = {},
                               const ProductConfig& cfg = {},
                               LineCache* cache = nullptr) {
  if (X < 1.0) throw DomainError("e_delta: X must be >= 1");
  spec.abscissa = -0.25;
  if (spec.truncation == 100.0) spec.truncation = 2000.0;
  spec.decay = DecayClass::Power;
  spec.decay_power = 3.0;
  spec.oscillation = std::max(spec.oscillation, std::log(X));
  spec.tail_model = TailModel::Rough;
  spec.conjugate_symmetric = true;
  double scale = std::pow(X, spec.abscissa + 4.0);
  double rel_tol = spec.tolerance;
  spec.tolerance = rel_tol * scale;

  double ptail = 0.0;
  auto slow = [&](double t) {
    auto pv = cdetail::q_contour(Cplx(-0.25, t), dm, prof, cfg);
    return pv.value;
  };
  {  // record the product-tail bound once, at a representative node
    auto pv = cdetail::q_contour(Cplx(-0.25, 1.0), dm, prof, cfg);
    ptail = pv.tail_bound / std::max(1e-300, std::abs(pv.value));
  }
  double lnX = std::log(X);
  auto f = [&](Cplx s) {
    Cplx q = cache ? cache->get(s.imag(), slow) : slow(s.imag());
    return q * std::exp((s + 4.0) * lnX) / (s * (s + 3.0) * (s + 4.0));
  };
  auto res = line_integral(f, spec);
  SecondaryResult out;
  out.value = 2.0 * res.value;
  out.trunc_err = 2.0 * res.trunc_err;
  out.quad_err = 2.0 * res.quad_err;
  out.product_tail = ptail;
  return out;
}

// E^<, E^> with the regularized reading Q^< = Q^> = zeta(s) Q_Delta(s);
// the Q_Delta-only integrand is reported alongside as `variant`.
inline SecondaryResult e_secondary(char kind, double X,
                                   const DeltaModulus& dm,
                                   const LocalProfile& prof,
                                   QuadratureSpec spec = {},
                                   const ProductConfig& cfg = {},
                                   LineCache* cache = nullptr,
                                   LineCache* cache_variant = nullptr) {
  if (X < 1.0) throw DomainError("e_secondary: X must be >= 1");
  if (kind != '<' && kind != '>')
    throw DomainError("e_secondary: kind must be '<' or '>'");
  bool less = (kind == '<');
  spec.abscissa = less ? -0.5 : 0.5;
  if (spec.truncation == 100.0) spec.truncation = less ? 2000.0 : 4000.0;
  spec.decay = DecayClass::Power;
  spec.decay_power = less ? 4.0 : 3.0;
  spec.oscillation = std::max(spec.oscillation, std::log(X));
  spec.tail_model = TailModel::Rough;
  spec.conjugate_symmetric = true;
  double scale = std::pow(X, spec.abscissa + 4.0);
  double rel_tol = spec.tolerance;
  spec.tolerance = rel_tol * scale;
  double c = spec.abscissa;

  auto slow_zq = [&](double t) {
    Cplx s(c, t);
    Cplx q = cdetail::q_contour(s, dm, prof, cfg).value;
    return analytic::zeta(s) * q;
  };
  auto slow_q = [&](double t) {
    return cdetail::q_contour(Cplx(c, t), dm, prof, cfg).value;
  };
  double lnX = std::log(X);
  auto kernel = [&](Cplx s) {
    Cplx den = (s + 2.0) * (s + 3.0) * (s + 4.0);
    if (less) den *= s;
    return std::exp((s + 4.0) * lnX) / den;
  };
  auto f = [&](Cplx s) {
    Cplx v = cache ? cache->get(s.imag(), slow_zq) : slow_zq(s.imag());
    return v * kernel(s);
  };
  auto fv = [&](Cplx s) {
    Cplx v =
        cache_variant ? cache_variant->get(s.imag(), slow_q) : slow_q(s.imag());
    return v * kernel(s);
  };
  auto res = line_integral(f, spec);
  auto resv = line_integral(fv, spec);
  SecondaryResult out;
  out.value = 2.0 * res.value;
  out.trunc_err = 2.0 * res.trunc_err;
  out.quad_err = 2.0 * res.quad_err;
  out.variant = 2.0 * resv.value;
  auto pv = cdetail::q_contour(Cplx(c, 1.0), dm, prof, cfg);
  out.product_tail = pv.tail_bound / std::max(1e-300, std::abs(pv.value));
  return out;
}

// ---------------------------------------------------------------------------
// R_Delta(X): kernel pi^{s-1/2} Gamma((1-s)/2)/Gamma(s/2) zeta(1-s) P(s) R_s
// on Re s = -1, |t|^{-3/2} decay, truncation levels T/4 < T/2 < T with a
// by-parts tail at each level and Richardson extrapolation across them.
// ---------------------------------------------------------------------------
struct RContext {
  // factor data for q <= X_max with g_Delta(q) != 0
  struct QEntry {
    std::uint64_t q;
    double coeff;  // g(q) phi(q)/q
    std::vector<std::uint32_t> prime_idx;
  };
  std::vector<QEntry> entries;
  std::vector<std::uint32_t> primes;  // primes up to X_max
  double x_max = 0;

  RContext(double X_max, const DeltaModulus& dm, const LocalProfile& prof)
      : x_max(X_max) {
    std::uint64_t top = static_cast<std::uint64_t>(X_max);
    primes = arith::primes_up_to(std::max<std::uint64_t>(top, 3));
    std::map<std::uint64_t, std::uint32_t> pindex;
    for (std::uint32_t i = 0; i < primes.size(); ++i) pindex[primes[i]] = i;
    auto table = arith::SieveTable::build(std::max<std::uint64_t>(top, 3));
    for (std::uint64_t q = 1; q <= top; ++q) {
      auto fq = arith::factorize(q, table);
      if (!arith::is_squarefree(fq)) continue;
      Rat g = singular::g_delta(fq, dm, prof);
      if (g == 0) continue;
      QEntry e;
      e.q = q;
      e.coeff = to_double(g) * double(arith::euler_phi(fq)) / double(q);
      for (auto& [p, a] : fq.factors) {
        (void)a;
        e.prime_idx.push_back(pindex[p]);
      }
      entries.push_back(std::move(e));
    }
  }

  // R_s at every cutoff in xs (ascending) for s = -1 + it
  void r_values(Cplx s, const LocalProfile& prof, const std::vector<double>& xs,
                std::vector<Cplx>& out) const {
    std::vector<Cplx> winv(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
      double p = double(primes[i]);
      double r = to_double(prof.r(primes[i]));
      Cplx Y = std::exp(-s * std::log(p));
      winv[i] = 1.0 / (1.0 + 2 * r / p + Y * (r * r / p));
    }
    out.assign(xs.size(), Cplx(0, 0));
    Cplx acc(0, 0);
    std::size_t xi = 0;
    for (const auto& e : entries) {
      while (xi < xs.size() && double(e.q) > xs[xi]) {
        out[xi] = acc;
        ++xi;
      }
      if (xi >= xs.size()) break;
      Cplx th(e.coeff, 0);
      for (auto i : e.prime_idx) th *= winv[i];
      acc += th * std::exp(-s * std::log(double(e.q)));
    }
    while (xi < xs.size()) {
      out[xi] = acc;
      ++xi;
    }
  }
};

inline Cplx r_kernel_slow(Cplx s, const DeltaModulus& dm,
                          const LocalProfile& prof, const ProductConfig& cfg) {
  Cplx pd = analytic::p_delta(s, dm, prof, cfg, true).value;
  return std::exp((s - 0.5) * std::log(kPi) +
                  analytic::log_gamma((1.0 - s) / 2.0) -
                  analytic::log_gamma(s / 2.0)) *
         analytic::zeta(1.0 - s) * pd;
}

struct RResult {
  Cplx value{0, 0};
  double trunc_err = 0, quad_err = 0;
  double product_tail = 0;
  std::array<Cplx, 3> levels{};  // corrected values at T/4, T/2, T
};

// Family evaluation over an ascending X grid with one shared panel pass.
inline std::vector<RResult> r_delta_family(const std::vector<double>& xs,
                                           const DeltaModulus& dm,
                                           const LocalProfile& prof,
                                           QuadratureSpec spec = {},
                                           ProductConfig cfg = {}) {
  if (xs.empty()) return {};
  for (double x : xs)
    if (x < 1.0) throw DomainError("r_delta_contour: X must be >= 1");
  cfg.contour_prime_cutoff = std::min<long>(cfg.contour_prime_cutoff, 30000);
  double T = (spec.truncation == 100.0) ? 10000.0 : spec.truncation;
  double c = -1.0;
  double omega = std::log(xs.back());
  double h = std::min(1.0, 9.0 / std::max(omega, 1e-9));
  std::size_t n_panels = static_cast<std::size_t>(std::ceil(T / h));
  double width = T / double(n_panels);

  RContext ctx(xs.back(), dm, prof);
  std::size_t nx = xs.size();

  struct Node {
    std::vector<Cplx> fj;
  };
  auto eval_node = [&](double t, std::vector<Cplx>& fj) {
    Cplx s(c, t);
    Cplx K = r_kernel_slow(s, dm, prof, cfg);
    std::vector<Cplx> rv;
    ctx.r_values(s, prof, xs, rv);
    Cplx den = (s + 2.0) * (s + 3.0) * (s + 4.0);
    fj.resize(nx);
    for (std::size_t j = 0; j < nx; ++j)
      fj[j] = K * rv[j] * std::exp((s + 4.0) * std::log(xs[j])) / den;
  };

  // adaptive GL15/GL7 per panel, refinement driven by the largest X
  std::vector<std::vector<Cplx>> panel_sums(n_panels,
                                            std::vector<Cplx>(nx, Cplx(0, 0)));
  std::vector<double> panel_err(n_panels, 0.0);
  double panel_tol =
      spec.tolerance * std::pow(xs.back(), c + 4.0) * 2 * kPi * width / T;

  static const double kG7X[7] = {-0.9491079123427585, -0.7415311855993944,
                                 -0.4058451513773972, 0.0,
                                 0.4058451513773972,  0.7415311855993944,
                                 0.9491079123427585};
  static const double kG7W[7] = {0.1294849661688697, 0.2797053914892767,
                                 0.3818300505051189, 0.4179591836734694,
                                 0.3818300505051189, 0.2797053914892767,
                                 0.1294849661688697};

  std::function<void(double, double, double, int, std::vector<Cplx>&, double&)>
      panel_integrate = [&](double a, double b, double tol, int depth,
                            std::vector<Cplx>& acc, double& err) {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        std::vector<Cplx> s15(nx, Cplx(0, 0)), s7(nx, Cplx(0, 0));
        std::vector<Cplx> fj;
        for (int i = 0; i < 15; ++i) {
          eval_node(mid + half * qdetail::kGlX[i], fj);
          for (std::size_t j = 0; j < nx; ++j)
            s15[j] += qdetail::kGlW[i] * half * fj[j];
        }
        for (int i = 0; i < 7; ++i) {
          eval_node(mid + half * kG7X[i], fj);
          for (std::size_t j = 0; j < nx; ++j)
            s7[j] += kG7W[i] * half * fj[j];
        }
        double diff = std::abs(s15[nx - 1] - s7[nx - 1]);
        if (diff <= tol || depth >= spec.max_depth) {
          for (std::size_t j = 0; j < nx; ++j) acc[j] += s15[j];
          err += diff / 30.0;
          return;
        }
        panel_integrate(a, mid, tol * 0.5, depth + 1, acc, err);
        panel_integrate(mid, b, tol * 0.5, depth + 1, acc, err);
      };

  std::size_t block = 16;
  std::size_t n_blocks = (n_panels + block - 1) / block;
  parallel_blocks<int>(n_blocks, [&](std::size_t bi) {
    std::size_t lo = bi * block, hi = std::min(n_panels, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      panel_integrate(i * width, (i + 1) * width, panel_tol, 0, panel_sums[i],
                      panel_err[i]);
    }
    return 0;
  });

  double ptail = analytic::p_delta(Cplx(c, 1.0), dm, prof, cfg, true).tail_bound;
  Cplx pref = analytic::p_delta(Cplx(c, 1.0), dm, prof, cfg, true).value;
  double ptail_rel = ptail / std::max(1e-300, std::abs(pref));

  // assemble per X: prefix sums at levels T/4, T/2, T + by-parts tails
  std::vector<RResult> out(nx);
  std::array<double, 3> levels = {T / 4.0, T / 2.0, T};
  for (std::size_t j = 0; j < nx; ++j) {
    double lnXj = std::log(xs[j]);
    std::array<Cplx, 3> vals;
    double quad_err_total = 0;
    for (int L = 0; L < 3; ++L) {
      std::size_t n_need =
          static_cast<std::size_t>(std::round(levels[L] / width));
      n_need = std::min(n_need, n_panels);
      Cplx sum(0, 0);
      for (std::size_t i = 0; i < n_need; ++i) sum += panel_sums[i][j];
      // by-parts tail from the sampled edge value
      std::vector<Cplx> fj;
      eval_node(double(n_need) * width, fj);
      double terr = 0;
      Cplx tail = power_tail(fj[j], std::abs(fj[j]), double(n_need) * width,
                             1.5, std::max(lnXj, 1e-9), TailModel::Rough,
                             &terr);
      vals[L] = Cplx((sum + tail).real() / kPi, 0.0);
      if (L == 2) out[j].trunc_err = terr / kPi;
    }
    for (std::size_t i = 0; i < n_panels; ++i) quad_err_total += panel_err[i];
    out[j].levels = vals;
    // Richardson across levels when the differences contract
    Cplx e21 = vals[1] - vals[0], e32 = vals[2] - vals[1];
    Cplx v = vals[2];
    if (std::abs(e21) > 0 && std::abs(e32) / std::abs(e21) < 0.7) {
      Cplx rho = e32 / e21;
      v = vals[2] + e32 * rho / (1.0 - rho);
    }
    out[j].value = 2.0 * v;
    out[j].trunc_err =
        2.0 * (out[j].trunc_err + std::abs(e32) / 3.0) / 1.0;
    out[j].quad_err = 2.0 * quad_err_total / kPi;
    out[j].product_tail = ptail_rel;
  }
  return out;
}

inline RResult r_delta_contour(double X, const DeltaModulus& dm,
                               const LocalProfile& prof,
                               QuadratureSpec spec = {},
                               const ProductConfig& cfg = {}) {
  return r_delta_family({X}, dm, prof, spec, cfg)[0];
}

// ---------------------------------------------------------------------------
// Smoothed approximate functional equation for primitive chi (mod d > 1):
//   L(s,chi) = sum_n chi(n) n^{-s} W_s(A/n)
//            + (d/pi)^{1/2-s} eps(chi) g_chi(s)
//              sum_n chibar(n) n^{s-1} W_{1-s}(A/n),   A = sqrt(d/pi).
// ---------------------------------------------------------------------------
inline Cplx afe_l(Cplx s, const dirichlet::DirichletCharacter& chi,
                  std::uint64_t n_terms = 0) {
  std::uint64_t d = chi.modulus();
  if (d <= 1 || !chi.is_primitive())
    throw DomainError("afe_l: needs a primitive character mod d > 1");
  int k = chi.parity();
  Cplx eps = dirichlet::root_number(chi);
  double A = std::sqrt(double(d) / kPi);
  auto gchi = gamma_parity_ratio(s, k);

  dirichlet::CharacterGroup g(d);  // for the conjugate
  dirichlet::DirichletCharacter bar;
  for (std::size_t i = 0; i < g.size(); ++i) {
    // locate chi in the group to conjugate it
    bool same = true;
    for (std::uint64_t n = 1; n <= d && same; ++n)
      if (g[i].value_index(n) != chi.value_index(n)) same = false;
    if (same) {
      bar = g.conjugate(g[i]);
      break;
    }
  }

  // both sums cut at N: on the c = 8 evaluation line W(A/n) << (A/n)^8
  std::uint64_t N = n_terms ? n_terms : std::uint64_t(40 * A) + 60;
  std::vector<double> args(N);
  for (std::uint64_t n = 1; n <= N; ++n) args[n - 1] = A / double(n);
  auto w1 = w_kernel_batch(s, k, args);
  auto w2 = w_kernel_batch(1.0 - s, k, args);

  Cplx sum1(0, 0), sum2(0, 0);
  for (std::uint64_t n = 1; n <= N; ++n) {
    Cplx c1 = chi.value(n), c2 = bar.value(n);
    if (c1 != Cplx(0, 0))
      sum1 += c1 * std::exp(-s * std::log(double(n))) * w1[n - 1];
    if (c2 != Cplx(0, 0))
      sum2 += c2 * std::exp((s - 1.0) * std::log(double(n))) * w2[n - 1];
  }
  return sum1 +
         std::exp((0.5 - s) * std::log(double(d) / kPi)) * eps * gchi * sum2;
}

}  // namespace apm::contour

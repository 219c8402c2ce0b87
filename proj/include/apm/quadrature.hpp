#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "apm/errors.hpp"
#include "apm/parallel.hpp"
#include "apm/zeta.hpp"

namespace apm::contour {

using analytic::Cplx;
using analytic::kPi;

enum class DecayClass { Gamma, Power };

// Smooth: the non-oscillatory part of the integrand has log-derivative
// ~ p/t (pure kernels); by-parts tail corrections converge. Rough: the
// integrand carries zeta/Euler factors with O(1) internal frequencies,
// so only the first by-parts term is trusted and the truncation bar is
// of order the last sampled magnitude.
enum class TailModel { Smooth, Rough };

// Vertical-line integration contract. tolerance is on the final
// (1/2 pi i)-normalized value. oscillation is the SIGNED frequency of
// the X^{it}-type factor on the upper half-line; panel widths respect it.
struct QuadratureSpec {
  double abscissa = 0.5;
  double truncation = 100.0;
  double tolerance = 1e-9;
  DecayClass decay = DecayClass::Gamma;
  double decay_power = 3.0;
  double oscillation = 0.0;
  TailModel tail_model = TailModel::Smooth;
  bool conjugate_symmetric = true;
  int max_depth = 24;
};

struct IntegralResult {
  Cplx value{0.0, 0.0};
  double trunc_err = 0.0;
  double quad_err = 0.0;
};

namespace qdetail {

// 15-point Gauss-Legendre on [-1, 1]
inline const double kGlX[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline const double kGlW[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

struct PanelSum {
  Cplx value{0.0, 0.0};
  double err = 0.0;
  Cplx f_right{0.0, 0.0};  // integrand at the right edge (tail fitting)
};

template <typename F>
Cplx gl15(F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Cplx s = 0;
  for (int i = 0; i < 15; ++i) s += kGlW[i] * f(mid + half * kGlX[i]);
  return half * s;
}

template <typename F>
void refine(F&& f, double a, double b, double tol, int depth, int max_depth,
            PanelSum& out) {
  Cplx whole = gl15(f, a, b);
  double m = 0.5 * (a + b);
  Cplx halves = gl15(f, a, m) + gl15(f, m, b);
  double diff = std::abs(whole - halves);
  if (diff <= tol || depth >= max_depth) {
    out.value += halves;
    out.err += diff / 63.0;
    return;
  }
  refine(f, a, m, tol * 0.5, depth + 1, max_depth, out);
  refine(f, m, b, tol * 0.5, depth + 1, max_depth, out);
}

}  // namespace qdetail

// One-sided panel chain over [0, T]: fixed layout from (T, oscillation),
// adaptive splitting inside panels, deterministic 64-panel blocks.
template <typename F>
qdetail::PanelSum integrate_half_line(F&& f, const QuadratureSpec& spec,
                                      double T) {
  double h = std::min(1.0, 9.0 / std::max(spec.oscillation, 1e-9));
  h = std::min(h, std::max(T / 8.0, 1e-3));
  std::size_t n_panels = static_cast<std::size_t>(std::ceil(T / h));
  double width = T / double(n_panels);
  double panel_tol = spec.tolerance * 2 * kPi * width / T;

  std::size_t block = 64;
  std::size_t n_blocks = (n_panels + block - 1) / block;
  auto sums = parallel_blocks<qdetail::PanelSum>(n_blocks, [&](std::size_t bi) {
    qdetail::PanelSum acc;
    std::size_t lo = bi * block, hi = std::min(n_panels, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      double a = double(i) * width, b = double(i + 1) * width;
      qdetail::refine(f, a, b, panel_tol, 0, spec.max_depth, acc);
    }
    return acc;
  });
  qdetail::PanelSum total;
  for (auto& s : sums) {
    total.value += s.value;
    total.err += s.err;
  }
  total.f_right = f(T);
  return total;
}

// Analytic continuation of the tail integral int_T^inf A t^{-p} e^{i w t} dt
// by parts, anchored at the sampled integrand value f(T).
inline Cplx power_tail(Cplx fT, double f_mean, double T, double p,
                       double omega, TailModel model, double* err_out) {
  if (omega == 0.0) {
    if (p <= 1.0) throw DomainError("line_integral: non-integrable tail");
    Cplx tail = fT * T / (p - 1.0);
    *err_out = 2.0 * std::abs(tail) * std::min(1.0, std::max(p / T, 0.02));
    if (model == TailModel::Rough) *err_out = 2.0 * std::abs(tail);
    return tail;
  }
  Cplx iw(0.0, omega);
  if (model == TailModel::Rough) {
    // internal O(1) frequencies: only the leading by-parts term is safe
    Cplx tail = -fT / iw;
    *err_out = 2.0 * f_mean * (1.0 + 1.0 / std::max(std::abs(omega), 0.5));
    return tail;
  }
  // by parts: -f(T)/(i w) [1 + p/(i w T)], next term O((p/(w T))^2)
  Cplx tail = -fT / iw * (1.0 + p / (iw * T));
  *err_out = 2.0 * std::abs(fT / omega) *
             std::pow(p * (p + 1.0) / (std::abs(omega) * T), 2.0);
  return tail;
}

// (1/2 pi i) int_{(c)} f(s) ds realized as (1/2 pi) int f(c+it) dt.
// The integrand handle receives s = c + it.
inline IntegralResult line_integral(const std::function<Cplx(Cplx)>& f,
                                    const QuadratureSpec& spec) {
  if (spec.decay == DecayClass::Power && spec.decay_power <= 1.0 &&
      spec.oscillation == 0.0)
    throw DomainError("line_integral: declared decay is non-integrable");
  double c = spec.abscissa, T = spec.truncation;
  if (T <= 0) throw DomainError("line_integral: T must be positive");

  auto on_line = [&](double t) { return f(Cplx(c, t)); };
  auto mean_abs_near = [&](double sign) {
    double acc = 0;
    for (int i = 0; i < 8; ++i)
      acc += std::abs(on_line(sign * (0.9 * T + double(i) * T / 80.0)));
    return acc / 8.0;
  };
  IntegralResult out;
  if (spec.conjugate_symmetric) {
    auto plus = integrate_half_line(on_line, spec, T);
    Cplx tail{0.0, 0.0};
    double terr = 0.0;
    if (spec.decay == DecayClass::Power) {
      tail = power_tail(plus.f_right, mean_abs_near(1.0), T, spec.decay_power,
                        spec.oscillation, spec.tail_model, &terr);
    } else {
      terr = 2.0 * std::abs(plus.f_right);
    }
    out.value = Cplx((plus.value + tail).real() / kPi, 0.0);
    out.trunc_err = terr / kPi;
    out.quad_err = plus.err / kPi;
  } else {
    auto plus = integrate_half_line(on_line, spec, T);
    auto minus = integrate_half_line([&](double t) { return on_line(-t); },
                                     spec, T);
    Cplx tail{0.0, 0.0};
    double terr = 0.0;
    if (spec.decay == DecayClass::Power) {
      double e1, e2;
      tail = power_tail(plus.f_right, mean_abs_near(1.0), T, spec.decay_power,
                        spec.oscillation, spec.tail_model, &e1) +
             power_tail(minus.f_right, mean_abs_near(-1.0), T,
                        spec.decay_power, -spec.oscillation, spec.tail_model,
                        &e2);
      terr = e1 + e2;
    } else {
      terr = 2.0 * (std::abs(plus.f_right) + std::abs(minus.f_right));
    }
    out.value = (plus.value + minus.value + tail) / (2 * kPi);
    out.trunc_err = terr / (2 * kPi);
    out.quad_err = (plus.err + minus.err) / (2 * kPi);
  }
  return out;
}

}  // namespace apm::contour

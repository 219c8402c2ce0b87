#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "apm/contour.hpp"
#include "apm/errors.hpp"

namespace apm::fit {

// (X, value) samples, X strictly increasing.
struct SampleSeries {
  std::vector<double> x;
  std::vector<double> value;
  std::string provenance;

  void validate(std::size_t min_points) const {
    if (x.size() != value.size() || x.size() < min_points)
      throw DomainError("SampleSeries: need " + std::to_string(min_points) +
                        " points with matching lengths");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1]))
        throw DomainError("SampleSeries: X must be strictly increasing");
  }
};

struct SlopeFit {
  double slope = 0;
  double stderr_ = 0;
  int excluded_sign_changes = 0;
  bool below_noise_floor = false;
};

struct FitResult {
  double alpha = 0, beta = 0, gamma = 0;
  bool e_delta_included = false;
  std::vector<double> residuals;
  SlopeFit residual_slope;
};

// OLS slope of log|residual| against log X; points adjacent to a sign
// change are excluded (their magnitudes dip through zero) and counted.
inline SlopeFit residual_exponent(const std::vector<double>& xs,
                                  const std::vector<double>& res,
                                  double noise_scale_power = 4.0) {
  SlopeFit out;
  std::size_t n = xs.size();
  bool all_noise = true;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(res[i]) > 1e-12 * std::pow(xs[i], noise_scale_power))
      all_noise = false;
  if (all_noise) {
    out.below_noise_floor = true;
    return out;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i) {
    bool flip = (i > 0 && res[i - 1] * res[i] < 0) ||
                (i + 1 < n && res[i] * res[i + 1] < 0);
    if (flip) {
      ++out.excluded_sign_changes;
      continue;
    }
    if (res[i] == 0.0) {
      ++out.excluded_sign_changes;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(std::abs(res[i])));
  }
  if (lx.size() < 2) throw DomainError("residual_exponent: too few usable points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double m = double(lx.size());
  double den = m * sxx - sx * sx;
  out.slope = (m * sxy - sx * sy) / den;
  double intercept = (sy - out.slope * sx) / m;
  double sse = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double e = ly[i] - intercept - out.slope * lx[i];
    sse += e * e;
  }
  if (lx.size() > 2)
    out.stderr_ = std::sqrt(sse / (m - 2) / (sxx - sx * sx / m));
  return out;
}

inline SlopeFit residual_exponent(const SampleSeries& s) {
  s.validate(5);
  return residual_exponent(s.x, s.value);
}

// Least squares on the basis {X^5, X^4 log X, X^4} with column scaling;
// optionally removes E_Delta(X) (from the contour module) first.
inline FitResult fit_main(
    const SampleSeries& series, bool include_e_delta,
    const singular::DeltaModulus& dm, const singular::LocalProfile& prof,
    contour::QuadratureSpec espec = {}, analytic::ProductConfig cfg = {},
    contour::LineCache* cache = nullptr) {
  series.validate(6);
  std::size_t n = series.x.size();

  FitResult out;
  out.e_delta_included = include_e_delta;
  std::vector<double> y = series.value;
  if (include_e_delta) {
    contour::QuadratureSpec sp = espec;
    sp.oscillation = std::log(series.x.back());  // shared node layout
    for (std::size_t i = 0; i < n; ++i) {
      auto e = contour::e_delta(series.x[i], dm, prof, sp, cfg, cache);
      y[i] -= e.value.real();
    }
  }

  // design matrix columns
  std::vector<std::array<double, 3>> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    double X = series.x[i], lx = std::log(X);
    col[i] = {std::pow(X, 5.0), std::pow(X, 4.0) * lx, std::pow(X, 4.0)};
  }
  double scale[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j)
      scale[j] = std::max(scale[j], std::abs(col[i][j]));
  for (int j = 0; j < 3; ++j)
    if (scale[j] == 0) scale[j] = 1;

  // Householder QR on the column-scaled design (normal equations would
  // square the conditioning and bury X^3-level residuals)
  std::vector<std::array<double, 3>> Q(n);
  std::vector<double> rhs = y;
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) Q[i][j] = col[i][j] / scale[j];
  double R[3][3] = {{0}};
  for (int j = 0; j < 3; ++j) {
    double norm = 0;
    for (std::size_t i = j; i < n; ++i) norm += Q[i][j] * Q[i][j];
    norm = std::sqrt(norm);
    if (norm < 1e-13)
      throw DomainError(
          "fit_main: rank-deficient design; use a geometric X grid");
    double alpha_h = (Q[j][j] >= 0) ? -norm : norm;
    std::vector<double> v(n, 0.0);
    v[j] = Q[j][j] - alpha_h;
    for (std::size_t i = j + 1; i < n; ++i) v[i] = Q[i][j];
    double vtv = 0;
    for (std::size_t i = j; i < n; ++i) vtv += v[i] * v[i];
    if (vtv > 0) {
      for (int k = j; k < 3; ++k) {
        double dot = 0;
        for (std::size_t i = j; i < n; ++i) dot += v[i] * Q[i][k];
        double f = 2.0 * dot / vtv;
        for (std::size_t i = j; i < n; ++i) Q[i][k] -= f * v[i];
      }
      double dot = 0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * rhs[i];
      double f = 2.0 * dot / vtv;
      for (std::size_t i = j; i < n; ++i) rhs[i] -= f * v[i];
    }
    for (int k = 0; k < 3; ++k) R[j][k] = Q[j][k];
  }
  double sol[3];
  for (int r = 2; r >= 0; --r) {
    double acc = rhs[r];
    for (int k = r + 1; k < 3; ++k) acc -= R[r][k] * sol[k];
    if (std::abs(R[r][r]) < 1e-13)
      throw DomainError(
          "fit_main: rank-deficient design; use a geometric X grid");
    sol[r] = acc / R[r][r];
  }
  out.alpha = sol[0] / scale[0];
  out.beta = sol[1] / scale[1];
  out.gamma = sol[2] / scale[2];

  out.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.residuals[i] = y[i] - (out.alpha * col[i][0] + out.beta * col[i][1] +
                               out.gamma * col[i][2]);
  try {
    out.residual_slope = residual_exponent(series.x, out.residuals);
  } catch (const DomainError&) {
    out.residual_slope.below_noise_floor = true;
  }
  return out;
}

}  // namespace apm::fit

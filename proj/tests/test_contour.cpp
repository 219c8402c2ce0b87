#include <cmath>
#include <complex>

#include "apm/contour.hpp"
#include "doctest.h"

using namespace apm;
using namespace apm::contour;
using analytic::Cplx;
using analytic::kPi;
using singular::DeltaModulus;
using singular::LocalProfile;

namespace {
const LocalProfile kProf{};
const DeltaModulus kD1{1};

ProductConfig fast_cfg() {
  ProductConfig c;
  c.contour_prime_cutoff = 2000;
  return c;
}
}  // namespace

TEST_CASE("Perron oracle: X^s/(s(s+1)) recovers 1 - 1/X") {
  QuadratureSpec spec;
  spec.abscissa = 2.0;
  spec.truncation = 4000.0;
  spec.tolerance = 1e-10;
  spec.decay = DecayClass::Power;
  spec.decay_power = 2.0;
  spec.oscillation = std::log(4.0);
  auto f = [](Cplx s) {
    return std::exp(s * std::log(4.0)) / (s * (s + 1.0));
  };
  auto r = line_integral(f, spec);
  CHECK(std::abs(r.value - Cplx(0.75)) < 1e-8);
}

TEST_CASE("Perron oracle: step function, including the half at X = 1") {
  for (double X : {0.5, 2.0, 10.0, 1.0}) {
    QuadratureSpec spec;
    spec.abscissa = 2.0;
    spec.truncation = 20000.0;
    spec.tolerance = 1e-10;
    spec.decay = DecayClass::Power;
    spec.decay_power = (X == 1.0) ? 2.0 : 1.0;
    spec.oscillation = std::log(X);
    auto f = [&](Cplx s) { return std::exp(s * std::log(X)) / s; };
    auto r = line_integral(f, spec);
    double expect = X > 1 ? 1.0 : (X == 1.0 ? 0.5 : 0.0);
    CHECK(std::abs(r.value - Cplx(expect)) < 1e-8);
  }
}

TEST_CASE("declared non-integrable decay is rejected") {
  QuadratureSpec spec;
  spec.decay = DecayClass::Power;
  spec.decay_power = 1.0;
  spec.oscillation = 0.0;
  auto f = [](Cplx s) { return 1.0 / s; };
  CHECK_THROWS_AS(line_integral(f, spec), DomainError);
}

TEST_CASE("conjugate-symmetric integrand gives a real result") {
  QuadratureSpec spec;
  spec.abscissa = 1.0;
  spec.truncation = 500.0;
  spec.decay = DecayClass::Power;
  spec.decay_power = 2.0;
  spec.conjugate_symmetric = false;  // integrate both sides honestly
  auto f = [](Cplx s) { return 1.0 / (s * (s + 3.0)); };
  auto r = line_integral(f, spec);
  CHECK(std::abs(r.value.imag()) < 1e-12);
}

TEST_CASE("tolerance halving does not worsen the observed error") {
  auto f = [](Cplx s) {
    return std::exp(s * std::log(3.0)) / (s * (s + 0.4) * (s + 1.0));
  };
  QuadratureSpec spec;
  spec.abscissa = 0.3;
  spec.truncation = 3000.0;
  spec.decay = DecayClass::Power;
  spec.decay_power = 3.0;
  spec.oscillation = std::log(3.0);
  auto run = [&](double tol) {
    QuadratureSpec s2 = spec;
    s2.tolerance = tol;
    return line_integral(f, s2).value;
  };
  Cplx ref = run(1e-13);
  double e1 = std::abs(run(1e-4) - ref);
  double e2 = std::abs(run(5e-5) - ref);
  CHECK(e2 <= 0.5 * e1 + 1e-12);
}

TEST_CASE("w_kernel: large-X limit, tiny-X suppression, contour independence") {
  // true remainder for u=1, k=0 is 1.128e-3, inside the paper's bound
  // X^{-Re u + eps} = X^{-7/8} = 2.37e-3 at the pinned eps = 1/8; the odd
  // kernel meets the tighter 1e-3 comfortably
  Cplx w1000 = w_kernel(Cplx(1.0), 1000.0, 0);
  CHECK(std::abs(w1000 - Cplx(1.0)) < std::pow(1000.0, -7.0 / 8.0));
  Cplx w1000_odd = w_kernel(Cplx(1.0), 1000.0, 1);
  CHECK(std::abs(w1000_odd - Cplx(1.0)) < 1e-3);

  Cplx tiny = w_kernel(Cplx(1.0), 1e-3, 0, 50.0);
  CHECK(std::abs(tiny) < 1e-100);

  Cplx a = w_kernel(Cplx(1.0), 1.0, 0, 1.0);
  Cplx b = w_kernel(Cplx(1.0), 1.0, 0, 2.0);
  Cplx c = w_kernel(Cplx(1.0), 1.0, 0, 5.0);
  CHECK(std::abs(a - b) < 1e-9);
  CHECK(std::abs(b - c) < 1e-9);

  CHECK_THROWS_AS(w_kernel(Cplx(1.0), 1.0, 0, -1.0), DomainError);

  // shift law: moving to c' = -Re u + eps picks up the residue 1
  Cplx u(1.0, 0.0);
  double cp = -u.real() + 0.125;
  QuadratureSpec spec;
  spec.abscissa = cp;
  spec.decay = DecayClass::Gamma;
  spec.conjugate_symmetric = false;
  spec.truncation = 160.0;
  spec.tolerance = 1e-13;
  double X = 7.0;
  Cplx lgref = analytic::log_gamma(u / 2.0);
  auto f = [&](Cplx w) {
    return std::exp(analytic::log_gamma((w + u) / 2.0) - lgref +
                    w * std::log(X)) /
           w;
  };
  Cplx shifted = Cplx(1.0) + line_integral(f, spec).value;
  CHECK(std::abs(w_kernel(u, X, 0) - shifted) < 1e-9);

  // batch evaluation agrees with single calls
  auto batch = w_kernel_batch(Cplx(0.5, 1.0), 0, {2.0, 1.0, 0.25});
  for (std::size_t i = 0; i < 3; ++i) {
    Cplx single = w_kernel(Cplx(0.5, 1.0), std::vector<double>{2.0, 1.0, 0.25}[i], 0);
    CHECK(std::abs(batch[i] - single) < 1e-10);
  }
}

TEST_CASE("meijer_g: closed form pi/2, dual grid, degenerate, empty strip") {
  auto m = meijer_g(Cplx(0.5), Cplx(1.0), Cplx(0.5), Cplx(1.0));
  CHECK(std::abs(m.closed - Cplx(kPi / 2)) < 1e-12);
  CHECK(std::abs(m.quadrature - m.closed) < 1e-10);

  // b = a + 1: Gamma(2) = 1 factors in the closed form
  auto d = meijer_g(Cplx(0.5), Cplx(1.0), Cplx(1.5), Cplx(2.0));
  Cplx expect = analytic::gamma(Cplx(2.0)) * analytic::gamma(Cplx(2.5)) *
                analytic::gamma(Cplx(1.5)) * analytic::gamma(Cplx(2.0)) /
                analytic::gamma(Cplx(4.0));
  CHECK(std::abs(d.closed - expect) < 1e-12);
  CHECK(std::abs(d.quadrature - d.closed) < 1e-10);

  for (double da : {0.3, 0.6, 0.9})
    for (double db : {0.2, 0.5, 0.8}) {
      auto g = meijer_g(Cplx(da), Cplx(da + 0.2, 0.3), Cplx(db + 0.5),
                        Cplx(db + 0.9, -0.4));
      CHECK(std::abs(g.quadrature - g.closed) < 1e-8);
    }

  CHECK_THROWS_AS(meijer_g(Cplx(3.0), Cplx(3.0), Cplx(0.5), Cplx(0.5)),
                  DomainError);
}

TEST_CASE("parity kernels: j = g_E on the test line, reality, poles") {
  // five points on Re u = -3/4 (the paper's 2 eps - 1 with eps = 1/8)
  for (double t : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    Cplx u(-0.75, t);
    auto pk = parity_kernels(u);
    CHECK(std::abs(pk.j - pk.g_e) < 1e-7);
  }
  auto half = parity_kernels(Cplx(-0.5, 0.0));
  CHECK(std::abs(half.j - half.g_e) < 1e-7);

  for (double ur : {-0.9, -0.6, -0.3, -0.1}) {
    auto pk = parity_kernels(Cplx(ur, 0.0));
    CHECK(std::abs(pk.g_e.imag()) < 1e-12);
    CHECK(std::abs(pk.g_o.imag()) < 1e-12);
  }

  CHECK_THROWS_AS(parity_kernels(Cplx(1.0, 0.0)), DomainError);

  // combined kernel: g_E - g_O = pi^{-1/2} G(1/2-u/2) G(u+5) /
  //                              (G(u/2)(u+2)(u+3)(u+4))
  for (double t : {0.0, 0.4, -0.4, 0.8, -0.8}) {
    Cplx u(-0.75, t);
    auto pk = parity_kernels(u);
    Cplx rhs = std::exp(-0.5 * std::log(kPi) +
                        analytic::log_gamma(0.5 - u / 2.0) +
                        analytic::log_gamma(u + 5.0) -
                        analytic::log_gamma(u / 2.0)) /
               ((u + 2.0) * (u + 3.0) * (u + 4.0));
    CHECK(std::abs((pk.g_e - pk.g_o) - rhs) < 1e-7);
  }
}

TEST_CASE("E_Delta: finiteness, X^4 bound, truncation consistency") {
  auto cfg = fast_cfg();
  QuadratureSpec spec;
  spec.truncation = 300.0;
  spec.tolerance = 1e-7;

  auto e1 = e_delta(1.0, kD1, kProf, spec, cfg);
  CHECK(std::isfinite(std::abs(e1.value)));

  double bound = 0;
  for (double X : {10.0, 100.0, 1000.0, 10000.0}) {
    auto e = e_delta(X, kD1, kProf, spec, cfg);
    double ratio = std::abs(e.value) / std::pow(X, 4.0);
    CHECK(std::isfinite(ratio));
    bound = std::max(bound, ratio);
  }
  MESSAGE("recorded |E_Delta(X)|/X^4 bound constant: ", bound);
  CHECK(bound < 100.0);

  QuadratureSpec spec2 = spec;
  spec2.truncation = 600.0;
  auto a = e_delta(50.0, kD1, kProf, spec, cfg);
  auto b = e_delta(50.0, kD1, kProf, spec2, cfg);
  CHECK(std::abs(a.value - b.value) <=
        3.0 * (a.trunc_err + b.trunc_err + a.quad_err + b.quad_err) + 1e-9);
}

TEST_CASE("E^< and E^>: finiteness, decay class, consistency probe") {
  auto cfg = fast_cfg();
  QuadratureSpec spec;
  spec.truncation = 400.0;
  spec.tolerance = 1e-7;

  auto less1 = e_secondary('<', 1.0, kD1, kProf, spec, cfg);
  CHECK(std::isfinite(std::abs(less1.value)));

  // kind '>': truncation error shrinks ~ 1/T^2 (verified by doubling T)
  double X = 40.0;
  QuadratureSpec sT = spec, s2T = spec;
  s2T.truncation = 800.0;
  auto gT = e_secondary('>', X, kD1, kProf, sT, cfg);
  auto g2T = e_secondary('>', X, kD1, kProf, s2T, cfg);
  CHECK(std::abs(gT.value - g2T.value) <=
        5.0 * (gT.trunc_err + g2T.trunc_err + gT.quad_err + g2T.quad_err) +
            1e-7 * std::pow(X, 4.5));

  // consistency probe: 2 E^< + E^> vs E_Delta; ratio logged, not asserted
  auto ed = e_delta(X, kD1, kProf, spec, cfg);
  auto el = e_secondary('<', X, kD1, kProf, spec, cfg);
  Cplx probe = 2.0 * el.value + gT.value;
  MESSAGE("2E^< + E^> = ", probe.real(), ", E_Delta = ", ed.value.real(),
          ", ratio = ", probe.real() / ed.value.real());
  CHECK(std::isfinite(probe.real() / ed.value.real()));
}

TEST_CASE("R_Delta: reality, refinement agreement, scaling record") {
  auto cfg = fast_cfg();
  QuadratureSpec spec;
  spec.truncation = 400.0;
  spec.tolerance = 1e-7;

  auto r10 = r_delta_contour(10.0, kD1, kProf, spec, cfg);
  CHECK(r10.value.imag() == 0.0);  // Schwarz symmetry built in

  QuadratureSpec fine = spec;
  fine.truncation = 800.0;
  fine.tolerance = 1e-10;
  auto r10f = r_delta_contour(10.0, kD1, kProf, fine, cfg);
  CHECK(std::abs(r10.value - r10f.value) <=
        5.0 * (r10.trunc_err + r10f.trunc_err + r10.quad_err + r10f.quad_err) +
            1e-6);

  double bound = 0;
  for (double X : {10.0, 100.0, 1000.0}) {
    auto r = r_delta_contour(X, kD1, kProf, spec, cfg);
    bound = std::max(bound, std::abs(r.value) / std::pow(X, 3.5));
  }
  MESSAGE("recorded |R_Delta(X)|/X^3.5 bound: ", bound);
  CHECK(bound < 1000.0);
}

TEST_CASE("AFE matches the Hurwitz-based L on spot checks") {
  auto g5 = dirichlet::characters_mod(5);
  for (const auto& chi : g5) {
    if (chi.is_principal()) continue;
    for (Cplx s : {Cplx(0.5, 0.0), Cplx(0.5, 2.0)}) {
      Cplx afe = afe_l(s, chi);
      Cplx hur = analytic::dirichlet_l(s, chi);
      CHECK(std::abs(afe - hur) < 1e-8);
    }
  }
}

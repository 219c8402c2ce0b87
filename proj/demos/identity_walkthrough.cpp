// Small tour of the library: exact singular-series identities, a couple of
// L-function anchors, and one secondary-term integral.

#include <cstdio>

#include "apm/contour.hpp"
#include "apm/sums.hpp"

using namespace apm;
using analytic::Cplx;

int main() {
  singular::LocalProfile prof;  // r(2) = 0, r(p) = 1/(p-2)
  singular::DeltaModulus d1(1);

  std::printf("f_1(15)  = %s\n", rat_str(singular::f_delta(15, d1, prof)).c_str());
  std::printf("g_1(15)  = %s\n", rat_str(singular::g_delta(15, d1, prof)).c_str());
  std::printf("I(6)     = %s\n", rat_str(singular::big_i(6, prof)).c_str());

  auto split = sums::j_star_delta(Rat(40), d1, prof);
  std::printf("J*_1(40): lhs %s = rhs_q %s = rhs_d %s\n",
              rat_str(split.lhs).c_str(), rat_str(split.rhs_q).c_str(),
              rat_str(split.rhs_d).c_str());

  dirichlet::CharacterGroup g4(4);
  Cplx l = analytic::dirichlet_l(Cplx(1.0), g4[1]);
  std::printf("L(1, chi_4) = %.15f   (pi/4 = %.15f)\n", l.real(),
              analytic::kPi / 4);

  auto pk = contour::parity_kernels(Cplx(-0.75, 0.0));
  std::printf("j(-3/4) = %.12f vs g_E(-3/4) = %.12f\n", pk.j.real(),
              pk.g_e.real());

  contour::QuadratureSpec spec;
  spec.truncation = 300.0;
  analytic::ProductConfig cfg;
  cfg.contour_prime_cutoff = 2000;
  auto e = contour::e_delta(50.0, d1, prof, spec, cfg);
  std::printf("E_1(50) = %.6f (|.|/X^4 = %.3g)\n", e.value.real(),
              std::abs(e.value) / 6.25e6);
  return 0;
}

#include <array>
#include <sstream>

#include "apm/singular.hpp"
#include "doctest.h"

using namespace apm;
using namespace apm::singular;

namespace {
const LocalProfile kDefault{};

// independent convolution oracle: sum_{d|q} mu(q/d) f_Delta(d)
Rat g_by_convolution(std::uint64_t q, const DeltaModulus& dm,
                     const LocalProfile& prof) {
  Rat s(0);
  for (std::uint64_t d = 1; d <= q; ++d) {
    if (q % d) continue;
    int mu = arith::mobius64(q / d);
    if (mu) s += mu * f_delta(d, dm, prof);
  }
  return s;
}

LocalProfile alt_profile() {
  // r(p) = 1/p for odd p: also admissible (|r - 1/p| = 0)
  LocalProfile prof;
  for (std::uint64_t p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31})
    prof.overrides[p] = Rat(1, long(p));
  return prof;
}
}  // namespace

TEST_CASE("f_delta examples") {
  CHECK(f_delta(15, DeltaModulus(1), kDefault) == Rat(8, 3));
  CHECK(f_delta(1, DeltaModulus(7), kDefault) == Rat(1));
  CHECK(f_delta(15, DeltaModulus(3), kDefault) == Rat(4, 3));
}

TEST_CASE("g_delta examples and closed form vs convolution oracle") {
  CHECK(g_delta(15, DeltaModulus(1), kDefault) == Rat(1, 3));
  CHECK(g_delta(9, DeltaModulus(1), kDefault) == Rat(0));
  CHECK(g_by_convolution(9, DeltaModulus(1), kDefault) == Rat(0));
  CHECK(g_delta(6, DeltaModulus(2), kDefault) == Rat(0));
  CHECK(g_by_convolution(15, DeltaModulus(1), kDefault) == Rat(1, 3));
}

TEST_CASE("r_delta prime power table") {
  CHECK(r_delta(5, DeltaModulus(1), kDefault) == Rat(2, 15));
  CHECK(r_delta(25, DeltaModulus(1), kDefault) == Rat(-1, 15));
  CHECK(r_delta(2, DeltaModulus(2), kDefault) == Rat(-1, 2));
  CHECK(r_delta(8, DeltaModulus(2), kDefault) == Rat(0));
  CHECK(r_delta(125, DeltaModulus(1), kDefault) == Rat(0));
}

TEST_CASE("big_i examples") {
  CHECK(big_i(1, kDefault) == Rat(1));
  CHECK(big_i(2, kDefault) == Rat(2));
  CHECK(big_i(3, kDefault) == Rat(-5));
  CHECK(big_i(4, kDefault) == Rat(0));
  CHECK(big_i(6, kDefault) == Rat(-10));
}

TEST_CASE("convolution identity f = g * 1 for n <= 10^4") {
  for (std::uint64_t delta : {1, 2, 3, 15, 30}) {
    DeltaModulus dm(delta);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
      Rat lhs(0);
      for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        lhs += g_delta(d, dm, kDefault);
        if (d != n / d) lhs += g_delta(n / d, dm, kDefault);
      }
      if (lhs != f_delta(n, dm, kDefault)) {
        REQUIRE(lhs == f_delta(n, dm, kDefault));
      }
    }
  }
}

TEST_CASE("restriction identity f_D(dn) = f_D(d) f_{dD}(n)") {
  for (std::uint64_t delta : {1, 2, 3}) {
    DeltaModulus dm(delta);
    for (std::uint64_t d = 1; d <= 300; ++d)
      for (std::uint64_t n = 1; n <= 300; ++n) {
        DeltaModulus dmd(d * delta);  // normalized to squarefree kernel
        Rat lhs = f_delta(d * n, dm, kDefault);
        Rat rhs = f_delta(d, dm, kDefault) * f_delta(n, dmd, kDefault);
        if (lhs != rhs) REQUIRE(lhs == rhs);
      }
  }
}

TEST_CASE("restriction identity under an alternative profile") {
  LocalProfile prof = alt_profile();
  DeltaModulus dm(3);
  for (std::uint64_t d = 1; d <= 60; ++d)
    for (std::uint64_t n = 1; n <= 60; ++n) {
      Rat lhs = f_delta(d * n, dm, prof);
      Rat rhs = f_delta(d, dm, prof) * f_delta(n, DeltaModulus(3 * d), prof);
      if (lhs != rhs) REQUIRE(lhs == rhs);
    }
}

// coefficients of (1 + c1 Y)(1 + c2 Y) as a degree-3 list
static std::array<Rat, 4> poly_mul2(const Rat& c1, const Rat& c2) {
  return {Rat(1), c1 + c2, c1 * c2, Rat(0)};
}

TEST_CASE("local generating identity for p <= 997") {
  // sum_a R_Delta(p^a) Y^a equals (1+rY)(1-Y/p) off Delta and (1-Y/p) on it,
  // as exact polynomial identities in Y
  for (std::uint64_t p : arith::primes_up_to(997)) {
    Rat r = kDefault.r(p);
    long pl = long(p);
    DeltaModulus d1(1), dp(p);
    auto rhs_off = poly_mul2(r, Rat(-1, pl));
    std::array<Rat, 4> lhs_off = {Rat(1), r_delta_local(p, 1, d1, kDefault),
                                  r_delta_local(p, 2, d1, kDefault),
                                  r_delta_local(p, 3, d1, kDefault)};
    for (int i = 0; i < 4; ++i) CHECK(lhs_off[i] == rhs_off[i]);

    std::array<Rat, 4> rhs_on = {Rat(1), Rat(-1, pl), Rat(0), Rat(0)};
    std::array<Rat, 4> lhs_on = {Rat(1), r_delta_local(p, 1, dp, kDefault),
                                 r_delta_local(p, 2, dp, kDefault),
                                 r_delta_local(p, 3, dp, kDefault)};
    for (int i = 0; i < 4; ++i) CHECK(lhs_on[i] == rhs_on[i]);
  }
}

TEST_CASE("decay bound and vanishing at even arguments") {
  DeltaModulus dm(1);
  for (std::uint64_t q = 1; q <= 10000; ++q) {
    auto fq = arith::factorize64(q);
    if (!arith::is_squarefree(fq)) continue;
    Rat g = g_delta(fq, dm, kDefault);
    if (q % 2 == 0) {
      CHECK(g == Rat(0));
      continue;
    }
    Rat bound(1);
    for (auto& [p, a] : fq.factors) {
      (void)a;
      bound *= Rat(1, long(p - 2));
    }
    CHECK(abs(g) <= bound);
  }
}

TEST_CASE("profile invariant |r - 1/p| <= C/p^2 for default profile") {
  // |1/(p-2) - 1/p| = 2/(p(p-2)); the sharp constant over odd p is
  // C = max_p 2p/(p-2) = 6, attained at p = 3.
  for (std::uint64_t p : arith::primes_up_to(10000)) {
    if (p == 2) {
      CHECK(kDefault.r(2) == Rat(0));
      continue;
    }
    Rat diff = abs(kDefault.r(p) - Rat(1, long(p)));
    CHECK(diff <= Rat(6) / (Rat(long(p)) * long(p)));
  }
}

TEST_CASE("profile file parsing") {
  std::istringstream in("# comment\n3 1/2\n5 2/7\n\n7 0\n");
  LocalProfile prof = LocalProfile::parse(in);
  CHECK(prof.r(3) == Rat(1, 2));
  CHECK(prof.r(5) == Rat(2, 7));
  CHECK(prof.r(7) == Rat(0));
  CHECK(prof.r(11) == Rat(1, 9));  // default beyond overrides
}

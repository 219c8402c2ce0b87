#include <cmath>

#include "apm/moments.hpp"
#include "doctest.h"

using namespace apm;
using namespace apm::moments;

TEST_CASE("e_term examples") {
  auto t = arith::SieveTable::build(1000);
  // E_10(1,1) = log 210 - 10
  CHECK(e_term(10.0, 1, 1, t) ==
        doctest::Approx(std::log(210.0) - 10.0).epsilon(1e-12));
  // E_10(4,1) = log 5 - 5
  CHECK(e_term(10.0, 4, 1, t) ==
        doctest::Approx(std::log(5.0) - 5.0).epsilon(1e-12));
  CHECK_THROWS_AS(e_term(10.0, 4, 4, t), DomainError);
  CHECK_THROWS_AS(e_term(2000.0, 4, 1, t), DomainError);
}

TEST_CASE("third moment: Q=1 and two-path equality") {
  auto t = arith::SieveTable::build(1000);
  auto rec = third_moment(100.0, 1, Weighting::Phi, t);
  double e = e_term(100.0, 1, 1, t);
  CHECK(rec.value == doctest::Approx(e * e * e).epsilon(1e-12));

  auto rec4 = third_moment(100.0, 4, Weighting::Phi, t);
  double direct = 0;
  for (std::uint64_t q = 1; q <= 4; ++q) {
    std::uint64_t phi = arith::phi64(q);
    double s3 = 0;
    for (std::uint64_t a = 1; a <= q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      double ee = e_term(100.0, q, a, t);
      s3 += ee * ee * ee;
    }
    direct += double(phi) * s3;
  }
  CHECK(rec4.value == doctest::Approx(direct).epsilon(1e-12));

  // hooley weighting from retained partials
  auto rech = third_moment(100.0, 4, Weighting::Hooley, t);
  double resum = 0;
  for (auto& pq : rec4.per_q) resum += pq.sum_E3;
  CHECK(rech.value == doctest::Approx(resum / 16.0).epsilon(1e-12));
}

TEST_CASE("row-sum identity links buckets to the global count") {
  auto t = arith::SieveTable::build(100000);
  double theta = 0;
  for (std::uint64_t n = 2; n <= 100000; ++n)
    if (t.is_prime(n)) theta += t.lambda(n);
  for (std::uint64_t q = 1; q <= 50; ++q) {
    double row = 0;
    for (std::uint64_t a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1) row += e_term(100000.0, q, a, t);
    double extra = 0;
    for (auto& [p, e] : arith::factorize64(q).factors) {
      (void)e;
      if (p <= 100000) extra += std::log(double(p));
    }
    CHECK(std::abs(row - (theta - 100000.0 - extra)) < 1e-6);
  }
}

TEST_CASE("partials re-sum to the total") {
  auto t = arith::SieveTable::build(20000);
  auto rec = third_moment(20000.0, 30, Weighting::Phi, t);
  double resum = 0;
  for (auto& pq : rec.per_q) resum += double(pq.phi_q) * pq.sum_E3;
  CHECK(std::abs(resum - rec.value) <= 1e-9 * std::abs(rec.value));
}

TEST_CASE("sharded q-ranges agree bit-for-bit with monolithic") {
  auto t = arith::SieveTable::build(10000);
  MomentOptions m1;
  m1.q_block = 7;
  MomentOptions m2;
  m2.q_block = 64;
  auto a = third_moment(10000.0, 40, Weighting::Phi, t, m1);
  auto b = third_moment(10000.0, 40, Weighting::Phi, t, m2);
  CHECK(a.value == b.value);
  for (std::size_t i = 0; i < a.per_q.size(); ++i)
    CHECK(a.per_q[i].sum_E3 == b.per_q[i].sum_E3);
}

TEST_CASE("op budget refused with shard advice") {
  auto t = arith::SieveTable::build(100000);
  MomentOptions opt;
  opt.op_budget = 1000.0;
  try {
    third_moment(100000.0, 1000, Weighting::Phi, t, opt);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("shard") != std::string::npos);
  }
}

TEST_CASE("scan: synthetic regression self-test and precondition") {
  // moment := Q^3 (x/Q) exactly -> slope 1
  std::vector<ScanRow> rows;
  for (double x : {1e4, 3e4, 1e5, 3e5, 1e6}) {
    std::uint64_t Q = q_rule("sqrt", x);
    rows.push_back(
        ScanRow{x, Q, std::pow(double(Q), 3.0) * (x / double(Q)), 0.0});
  }
  auto r = scan_core(rows);
  CHECK(std::abs(r.slope - 1.0) < 0.01);

  std::vector<ScanRow> three(rows.begin(), rows.begin() + 3);
  CHECK_THROWS_AS(scan_core(three), DomainError);
}

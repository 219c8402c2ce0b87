#include <numeric>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "apm/sieve.hpp"
#include "doctest.h"

using namespace apm;
using namespace apm::arith;

TEST_CASE("lambda definition cases") {
  auto t = SieveTable::build(10);
  CHECK(t.lambda(8) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.lambda(6) == 0.0);
  CHECK(t.lambda(7) == doctest::Approx(std::log(7.0)).epsilon(1e-15));
  CHECK(t.lambda(1) == 0.0);

  auto t1 = SieveTable::build(1);
  CHECK(t1.lambda(1) == 0.0);
}

TEST_CASE("Chebyshev psi(10^6) is within 0.5% of 10^6") {
  auto t = SieveTable::build(1000000);
  // fixed ascending order with pairwise accumulation
  double sum = 0;
  std::vector<double> block;
  for (std::uint64_t n = 1; n <= t.limit(); ++n) sum += t.lambda(n);
  (void)block;
  CHECK(std::abs(sum - 1e6) / 1e6 < 0.005);
}

TEST_CASE("factorize") {
  auto t = SieveTable::build(10000000);
  auto f12 = factorize(12, t);
  REQUIRE(f12.factors.size() == 2);
  CHECK(f12.factors[0] == std::pair<std::uint64_t, int>{2, 2});
  CHECK(f12.factors[1] == std::pair<std::uint64_t, int>{3, 1});

  auto f1 = factorize(1, t);
  CHECK(f1.factors.empty());

  auto f = factorize(9699690, t);  // product of the first 8 primes
  REQUIRE(f.factors.size() == 8);
  std::uint64_t expect[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (int i = 0; i < 8; ++i) {
    CHECK(f.factors[i].first == expect[i]);
    CHECK(f.factors[i].second == 1);
  }

  CHECK_THROWS_AS(factorize(0, t), DomainError);
  CHECK_THROWS_AS(factorize(t.limit() + 1, t), DomainError);
}

TEST_CASE("mobius and phi") {
  auto t = SieveTable::build(1000);
  CHECK(mobius(1, t) == 1);
  CHECK(euler_phi(1, t) == 1);
  CHECK(mobius(30, t) == -1);
  CHECK(euler_phi(30, t) == 8);
  CHECK(mobius(12, t) == 0);
  CHECK(euler_phi(12, t) == 4);
}

TEST_CASE("Lambda * 1 = log, mu * 1 = [n=1], phi multiplicative") {
  auto t = SieveTable::build(10000);
  for (std::uint64_t n = 1; n <= 10000; n += 1) {
    double s = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      s += t.lambda(d);
      if (d != n / d) s += t.lambda(n / d);
    }
    CHECK(std::abs(s - std::log(double(n))) < 1e-9);
  }
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    long s = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      s += mobius(d, t);
      if (d != n / d) s += mobius(n / d, t);
    }
    CHECK(s == (n == 1 ? 1 : 0));
  }
  for (std::uint64_t m = 1; m <= 1000; m += 7)
    for (std::uint64_t n = 1; n <= 1000; n += 11)
      if (std::gcd(m, n) == 1 && m * n <= 1000)
        CHECK(euler_phi(m * n, t) == euler_phi(m, t) * euler_phi(n, t));
}

TEST_CASE("segmented build matches monolithic") {
  SieveConfig small;
  small.segment_size = 256;
  auto a = SieveTable::build(50000, small);
  auto b = SieveTable::build(50000);
  for (std::uint64_t n = 1; n <= 50000; ++n) {
    CHECK(a.lambda(n) == b.lambda(n));
    CHECK(a.smallest_prime_factor(n) == b.smallest_prime_factor(n));
  }
  CHECK(a.smallest_prime_factor(1) == 1);
  CHECK(a.smallest_prime_factor(13) == 13);
}

TEST_CASE("memory limit produces a resource error naming the limit") {
  SieveConfig cfg;
  cfg.max_bytes = 1024;
  try {
    SieveTable::build(100000, cfg);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("1024") != std::string::npos);
  }
}

TEST_CASE("lambda cache round trip") {
  auto t = SieveTable::build(5000);
  std::string path = "apm_test_cache.bin";
  write_lambda_cache(t, path);
  auto u = read_lambda_cache(path);
  REQUIRE(u.limit() == 5000);
  for (std::uint64_t n = 1; n <= 5000; ++n) CHECK(u.lambda(n) == t.lambda(n));
  // header: magic + version + N little-endian
  std::FILE* f = std::fopen(path.c_str(), "rb");
  unsigned char hdr[14];
  REQUIRE(std::fread(hdr, 1, 14, f) == 14);
  std::fclose(f);
  CHECK(std::string(reinterpret_cast<char*>(hdr), 5) == "APML1");
  CHECK(hdr[5] == 0x01);
  CHECK(hdr[6] == 0x88);  // 5000 = 0x1388
  CHECK(hdr[7] == 0x13);
  std::filesystem::remove(path);
}

TEST_CASE("prime streaming agrees with table") {
  auto t = SieveTable::build(30000);
  std::vector<std::uint64_t> ps;
  for_each_prime(30000, [&](std::uint64_t p) { ps.push_back(p); }, 1024);
  std::size_t k = 0;
  for (std::uint64_t n = 2; n <= 30000; ++n)
    if (t.is_prime(n)) {
      REQUIRE(k < ps.size());
      CHECK(ps[k] == n);
      ++k;
    }
  CHECK(k == ps.size());
}

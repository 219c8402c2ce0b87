#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "apm/errors.hpp"
#include "apm/parallel.hpp"
#include "apm/sieve.hpp"

namespace apm::moments {

enum class Weighting { Phi, Hooley };

struct PerQ {
  std::uint64_t q;
  std::uint64_t a_count;
  double sum_E3;
  std::uint64_t phi_q;
};

struct MomentRecord {
  double x = 0;
  std::uint64_t Q = 0;
  Weighting weighting = Weighting::Phi;
  double value = 0;
  std::vector<PerQ> per_q;  // ascending q when retained
};

struct MomentOptions {
  bool keep_per_q = true;
  bool compensated = false;          // Kahan accumulation cross-check mode
  double op_budget = 1e10;           // refuse larger pi(x) * Q bucket work
  std::uint64_t q_block = 64;        // deterministic parallel partition
};

namespace mdetail {

inline double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v, 0, v.size());
}

}  // namespace mdetail

// E_x(q, a) = sum_{p <= x, p = a mod q} log p - x/phi(q), primes only.
inline double e_term(double x, std::uint64_t q, std::uint64_t a,
                     const arith::SieveTable& table) {
  if (q < 1) throw DomainError("e_term: q must be >= 1");
  if (std::gcd(a, q) != 1) throw DomainError("e_term: needs (a, q) = 1");
  if (x > double(table.limit()) + 0.5)
    throw DomainError("e_term: x exceeds the sieve limit");
  std::uint64_t top = static_cast<std::uint64_t>(x);
  std::vector<double> logs;
  for (std::uint64_t n = 2; n <= top; ++n)
    if (table.is_prime(n) && n % q == a % q) logs.push_back(table.lambda(n));
  return mdetail::pairwise_sum(logs) -
         x / double(arith::euler_phi(arith::factorize64(q)));
}

// Streaming third moment sum_{q <= Q} w(q) sum_{(a,q)=1} E_x(q,a)^3.
inline MomentRecord third_moment(double x, std::uint64_t Q, Weighting w,
                                 const arith::SieveTable& table,
                                 const MomentOptions& opt = {}) {
  if (Q < 1 || x < 2) throw DomainError("third_moment: need Q >= 1, x >= 2");
  if (x > double(table.limit()) + 0.5)
    throw DomainError("third_moment: x exceeds the sieve limit");
  std::uint64_t top = static_cast<std::uint64_t>(x);

  std::vector<std::uint32_t> primes;
  std::vector<double> logs;
  for (std::uint64_t n = 2; n <= top; ++n)
    if (table.is_prime(n)) {
      primes.push_back(static_cast<std::uint32_t>(n));
      logs.push_back(table.lambda(n));
    }
  double ops = double(primes.size()) * double(Q);
  if (ops > opt.op_budget)
    throw ResourceError(
        "third_moment: pi(x)*Q = " + std::to_string(ops) +
        " bucket updates exceed the op budget; shard the q-range 1.." +
        std::to_string(Q) + " and combine per-q partials");

  std::uint64_t n_blocks = (Q + opt.q_block - 1) / opt.q_block;
  auto blocks = parallel_blocks<std::vector<PerQ>>(n_blocks, [&](std::size_t b) {
    std::vector<PerQ> out;
    std::uint64_t lo = b * opt.q_block + 1,
                  hi = std::min<std::uint64_t>(Q, (b + 1) * opt.q_block);
    std::vector<double> bucket;
    for (std::uint64_t q = lo; q <= hi; ++q) {
      bucket.assign(q, 0.0);
      if (opt.compensated) {
        std::vector<double> carry(q, 0.0);
        for (std::size_t i = 0; i < primes.size(); ++i) {
          std::uint32_t r = primes[i] % q;
          double y = logs[i] - carry[r];
          double t = bucket[r] + y;
          carry[r] = (t - bucket[r]) - y;
          bucket[r] = t;
        }
      } else {
        for (std::size_t i = 0; i < primes.size(); ++i)
          bucket[primes[i] % q] += logs[i];
      }
      std::uint64_t phi = arith::euler_phi(arith::factorize64(q));
      double expect = x / double(phi);
      std::vector<double> cubes;
      cubes.reserve(phi);
      std::uint64_t a_count = 0;
      for (std::uint64_t a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        double e = bucket[a % q] - expect;
        cubes.push_back(e * e * e);
        ++a_count;
      }
      out.push_back(PerQ{q, a_count, mdetail::pairwise_sum(cubes), phi});
    }
    return out;
  });

  MomentRecord rec;
  rec.x = x;
  rec.Q = Q;
  rec.weighting = w;
  std::vector<double> weighted;
  for (auto& blk : blocks)
    for (auto& pq : blk) {
      weighted.push_back((w == Weighting::Phi)
                             ? double(pq.phi_q) * pq.sum_E3
                             : pq.sum_E3);
      if (opt.keep_per_q) rec.per_q.push_back(pq);
    }
  rec.value = mdetail::pairwise_sum(weighted);
  if (w == Weighting::Hooley) rec.value /= double(Q) * double(Q);
  return rec;
}

// ---------------------------------------------------------------------------
// Exponent scan: log-log regression of |moment|/Q^3 against x/Q, with the
// comparison curve Q^3 (x/Q)^{1.2}.
// ---------------------------------------------------------------------------
struct ScanRow {
  double x;
  std::uint64_t Q;
  double moment;
  double comparison;  // Q^3 (x/Q)^{1.2}
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double slope = 0;
  double slope_stderr = 0;
};

inline ScanResult scan_core(std::vector<ScanRow> rows) {
  if (rows.size() < 4)
    throw DomainError("exponent_scan: need at least 4 grid points");
  ScanResult out;
  out.rows = std::move(rows);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = out.rows.size();
  for (auto& r : out.rows) {
    double lx = std::log(r.x / double(r.Q));
    double ly = std::log(std::abs(r.moment) / std::pow(double(r.Q), 3.0));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double den = double(n) * sxx - sx * sx;
  if (std::abs(den) < 1e-12)
    throw DomainError("exponent_scan: degenerate grid (all x/Q equal)");
  out.slope = (double(n) * sxy - sx * sy) / den;
  double mean_x = sx / double(n), intercept = sy / double(n) - out.slope * mean_x;
  double sse = 0;
  for (auto& r : out.rows) {
    double lx = std::log(r.x / double(r.Q));
    double ly = std::log(std::abs(r.moment) / std::pow(double(r.Q), 3.0));
    double e = ly - intercept - out.slope * lx;
    sse += e * e;
  }
  if (n > 2)
    out.slope_stderr =
        std::sqrt(sse / double(n - 2) / (sxx - sx * sx / double(n)));
  return out;
}

// rule: "x/log2" -> Q = x/(log x)^2, "sqrt" -> Q = sqrt(x)
inline std::uint64_t q_rule(const std::string& rule, double x) {
  if (rule == "x/(log x)^2" || rule == "x/log2")
    return std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(x / std::pow(std::log(x), 2.0)));
  if (rule == "sqrt")
    return std::max<std::uint64_t>(1,
                                   static_cast<std::uint64_t>(std::sqrt(x)));
  throw DomainError("exponent_scan: unknown q rule: " + rule);
}

inline ScanResult exponent_scan(
    const std::vector<std::pair<double, std::uint64_t>>& grid, Weighting w,
    const std::function<const arith::SieveTable&(double)>& table_for,
    const MomentOptions& opt = {}) {
  if (grid.size() < 4)
    throw DomainError("exponent_scan: need at least 4 grid points");
  std::vector<ScanRow> rows;
  for (auto& [x, Q] : grid) {
    MomentOptions o = opt;
    o.keep_per_q = false;
    auto rec = third_moment(x, Q, w, table_for(x), o);
    rows.push_back(ScanRow{x, Q, rec.value,
                           std::pow(double(Q), 3.0) *
                               std::pow(x / double(Q), 1.2)});
  }
  return scan_core(std::move(rows));
}

}  // namespace apm::moments

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "apm/errors.hpp"
#include "apm/sieve.hpp"
#include "apm/zeta.hpp"

namespace apm::dirichlet {

using analytic::Cplx;
using analytic::kPi;

namespace detail {

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e,
                             std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = (r * b) % m;
    b = (b * b) % m;
    e >>= 1;
  }
  return r;
}

inline std::uint64_t primitive_root(std::uint64_t p, int e) {
  // generator of the cyclic unit group mod p^e, p odd
  std::uint64_t phi_p = p - 1;
  auto fac = arith::factorize64(phi_p);
  std::uint64_t g = 2;
  for (;; ++g) {
    bool ok = true;
    for (auto& [q, a] : fac.factors) {
      (void)a;
      if (pow_mod(g, phi_p / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  if (e == 1) return g;
  std::uint64_t p2 = p * p;
  if (pow_mod(g, phi_p, p2) == 1) g += p;
  return g;
}

// One cyclic factor of (Z/q)^*: all units are tracked by their exponent
// with respect to `gen` inside the subgroup mod `pe`.
struct Component {
  std::uint64_t pe;
  std::uint64_t gen;    // generator of this cyclic factor (mod pe)
  std::uint64_t order;  // size of the factor
  std::vector<std::uint32_t> dlog;  // residue mod pe -> exponent; 0 off-units
  std::vector<bool> unit;
};

struct GroupData {
  std::uint64_t q = 1;
  std::uint64_t lambda = 1;  // lcm of component orders
  std::vector<std::uint64_t> q_primes;
  std::vector<Component> comps;
  std::vector<std::uint64_t> lambda_over_order;  // per component
};

inline std::shared_ptr<const GroupData> build_group(std::uint64_t q) {
  auto data = std::make_shared<GroupData>();
  data->q = q;
  auto fac = arith::factorize64(q);
  for (auto& [p, a] : fac.factors) {
    (void)a;
    data->q_primes.push_back(p);
  }
  for (auto& [p, a] : fac.factors) {
    std::uint64_t pe = 1;
    for (int i = 0; i < a; ++i) pe *= p;
    if (p == 2) {
      if (a == 1) continue;  // trivial unit group
      if (a == 2) {
        Component c{pe, pe - 1, 2, {}, {}};
        data->comps.push_back(std::move(c));
      } else {
        Component minus{pe, pe - 1, 2, {}, {}};
        Component five{pe, 5, pe / 4, {}, {}};
        data->comps.push_back(std::move(minus));
        data->comps.push_back(std::move(five));
      }
    } else {
      Component c{pe, primitive_root(p, a), arith::phi64(pe), {}, {}};
      data->comps.push_back(std::move(c));
    }
  }
  // discrete-log tables; for 2^e (e >= 3) residues are (-1)^s 5^t
  std::size_t i = 0;
  while (i < data->comps.size()) {
    Component& c = data->comps[i];
    bool twin = (c.pe % 8 == 0 && c.gen == c.pe - 1);
    if (!twin) {
      c.dlog.assign(c.pe, 0);
      c.unit.assign(c.pe, false);
      std::uint64_t x = 1;
      for (std::uint64_t k = 0; k < c.order; ++k) {
        c.dlog[x] = static_cast<std::uint32_t>(k);
        c.unit[x] = true;
        x = (x * c.gen) % c.pe;
      }
      ++i;
    } else {
      Component& f = data->comps[i + 1];
      c.dlog.assign(c.pe, 0);
      c.unit.assign(c.pe, false);
      f.dlog.assign(f.pe, 0);
      f.unit.assign(f.pe, false);
      for (std::uint64_t s = 0; s < 2; ++s) {
        std::uint64_t x = (s == 0) ? 1 : c.pe - 1;
        for (std::uint64_t t = 0; t < f.order; ++t) {
          c.dlog[x] = static_cast<std::uint32_t>(s);
          f.dlog[x] = static_cast<std::uint32_t>(t);
          c.unit[x] = f.unit[x] = true;
          x = (x * 5) % c.pe;
        }
      }
      i += 2;
    }
  }
  data->lambda = 1;
  for (auto& c : data->comps)
    data->lambda = std::lcm(data->lambda, c.order);
  for (auto& c : data->comps)
    data->lambda_over_order.push_back(data->lambda / c.order);
  return data;
}

}  // namespace detail

class CharacterGroup;

// A character mod q held as exponent coordinates on fixed generators.
// Values are exact roots of unity; value_index gives the exponent of
// e^{2 pi i / lambda} so orthogonality checks can run in integers.
class DirichletCharacter {
 public:
  DirichletCharacter() : data_(detail::build_group(1)) {}

  std::uint64_t modulus() const { return data_->q; }
  std::uint64_t group_exponent() const { return data_->lambda; }
  const std::vector<std::uint64_t>& coords() const { return coords_; }

  bool is_principal() const {
    for (auto c : coords_)
      if (c) return false;
    return true;
  }

  // exponent of e^{2 pi i/lambda}; nullopt when (n, q) > 1
  std::optional<std::uint64_t> value_index(std::uint64_t n) const {
    n %= data_->q;
    if (data_->q == 1) return 0;
    for (std::uint64_t p : data_->q_primes)
      if (n % p == 0) return std::nullopt;
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < data_->comps.size(); ++j) {
      const auto& c = data_->comps[j];
      std::uint64_t r = n % c.pe;
      if (!c.unit[r]) return std::nullopt;
      idx = (idx + coords_[j] * std::uint64_t(c.dlog[r]) %
                       data_->lambda * data_->lambda_over_order[j]) %
            data_->lambda;
    }
    return idx;
  }

  Cplx value(std::uint64_t n) const {
    auto idx = value_index(n);
    if (!idx) return Cplx(0);
    double ang = 2 * kPi * double(*idx) / double(data_->lambda);
    return Cplx(std::cos(ang), std::sin(ang));
  }

  // parity k with chi(-1) = (-1)^k
  int parity() const {
    auto idx = value_index(data_->q - 1 + 2 * (data_->q == 1));
    std::uint64_t i = *idx;  // -1 is always a unit
    return (i == 0) ? 0 : 1;
  }

  std::uint64_t conductor() const;
  bool is_primitive() const { return conductor() == modulus(); }

 private:
  friend class CharacterGroup;
  DirichletCharacter(std::shared_ptr<const detail::GroupData> d,
                     std::vector<std::uint64_t> coords)
      : data_(std::move(d)), coords_(std::move(coords)) {}

  std::shared_ptr<const detail::GroupData> data_;
  std::vector<std::uint64_t> coords_;
};

// All phi(q) characters mod q, enumerated lexicographically on the fixed
// generator coordinates (deterministic order; index 0 is principal).
class CharacterGroup {
 public:
  explicit CharacterGroup(std::uint64_t q) : data_(detail::build_group(q)) {
    std::vector<std::uint64_t> coords(data_->comps.size(), 0);
    emit(coords, 0);
  }

  std::uint64_t modulus() const { return data_->q; }
  std::size_t size() const { return chars_.size(); }
  const DirichletCharacter& operator[](std::size_t i) const {
    return chars_[i];
  }
  auto begin() const { return chars_.begin(); }
  auto end() const { return chars_.end(); }
  const DirichletCharacter& principal() const { return chars_[0]; }

  // conjugate character (inverse coordinates)
  DirichletCharacter conjugate(const DirichletCharacter& chi) const {
    std::vector<std::uint64_t> coords = chi.coords();
    for (std::size_t j = 0; j < coords.size(); ++j)
      coords[j] = coords[j] ? data_->comps[j].order - coords[j] : 0;
    return DirichletCharacter(data_, std::move(coords));
  }

 private:
  void emit(std::vector<std::uint64_t>& coords, std::size_t j) {
    if (j == coords.size()) {
      chars_.push_back(DirichletCharacter(data_, coords));
      return;
    }
    for (std::uint64_t a = 0; a < data_->comps[j].order; ++a) {
      coords[j] = a;
      emit(coords, j + 1);
    }
    coords[j] = 0;
  }

  std::shared_ptr<const detail::GroupData> data_;
  std::vector<DirichletCharacter> chars_;
};

inline CharacterGroup characters_mod(std::uint64_t q) {
  if (q < 1) throw DomainError("characters_mod: q must be >= 1");
  return CharacterGroup(q);
}

inline std::uint64_t DirichletCharacter::conductor() const {
  std::uint64_t q = modulus();
  if (q == 1) return 1;
  auto divs = arith::divisors(arith::factorize64(q));
  for (std::uint64_t d : divs) {
    bool ok = true;
    for (std::uint64_t n = 1; n < q && ok; n += d) {
      if (std::gcd(n, q) != 1) continue;
      auto idx = value_index(n);
      if (idx && *idx != 0) ok = false;
    }
    if (ok) return d;
  }
  return q;
}

// chi = chi0 * chi^* for the primitive chi^* mod conductor(chi).
inline std::pair<DirichletCharacter, std::uint64_t> conductor_decompose(
    const DirichletCharacter& chi) {
  std::uint64_t q = chi.modulus(), d = chi.conductor();
  CharacterGroup gd(d);
  for (const auto& psi : gd) {
    bool match = true;
    for (std::uint64_t m = 1; m <= d && match; ++m) {
      if (std::gcd(m, d) != 1) continue;
      // lift m to a residue coprime to q in the class m mod d
      std::uint64_t n = m;
      while (std::gcd(n, q) != 1) n += d;
      auto ic = chi.value_index(n);
      auto ip = psi.value_index(m);
      // compare as fractions of the respective group exponents
      if (!ic || !ip ||
          *ic * psi.group_exponent() != *ip * chi.group_exponent())
        match = false;
    }
    if (match) return {psi, d};
  }
  throw DomainError("conductor_decompose: no primitive part found");
}

// Both sides of the parity-split orthogonality over primitive characters
// mod d; asserts they agree and returns the common integer.
inline long parity_orthogonality(std::uint64_t d, std::uint64_t n,
                                 std::uint64_t m, int a) {
  if (std::gcd(n, d) != 1 || std::gcd(m, d) != 1)
    throw DomainError("parity_orthogonality: (nm, d) must be 1");
  CharacterGroup g(d);
  Cplx lhs = 0;
  for (const auto& chi : g) {
    if (!chi.is_primitive()) continue;
    if (chi.parity() != (a & 1)) continue;
    lhs += chi.value(n) * std::conj(chi.value(m));
  }
  lhs *= 2.0;
  long rhs = 0;
  auto divs = arith::divisors(arith::factorize64(d));
  for (std::uint64_t k : divs) {
    long w = static_cast<long>(arith::phi64(k)) * arith::mobius64(d / k);
    if ((n % k) == (m % k)) rhs += w;
    if ((n % k) == ((k - (m % k)) % k)) rhs += ((a & 1) ? -w : w);
  }
  long lhs_int = std::lround(lhs.real());
  if (std::abs(lhs.real() - double(lhs_int)) > 1e-9 ||
      std::abs(lhs.imag()) > 1e-9 || lhs_int != rhs)
    throw DomainError("parity_orthogonality: sides disagree");
  return rhs;
}

// Root number eps(chi) = tau(chi) / (i^k sqrt(d)) for primitive chi, d > 1.
inline Cplx root_number(const DirichletCharacter& chi) {
  std::uint64_t d = chi.modulus();
  if (d <= 1 || !chi.is_primitive())
    throw DomainError("root_number: character must be primitive with d > 1");
  Cplx tau = 0;
  for (std::uint64_t a = 1; a <= d; ++a) {
    if (std::gcd(a, d) != 1) continue;
    double ang = 2 * kPi * double(a) / double(d);
    tau += chi.value(a) * Cplx(std::cos(ang), std::sin(ang));
  }
  Cplx ik = (chi.parity() == 0) ? Cplx(1, 0) : Cplx(0, 1);
  return tau / (ik * std::sqrt(double(d)));
}

}  // namespace apm::dirichlet

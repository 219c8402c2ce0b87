#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace apm {

using Rat = mpq_class;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat out(1);
  Rat b = base;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

inline double to_double(const Rat& q) { return q.get_d(); }

// "num/den" with the denominator omitted when it is 1.
inline std::string rat_str(const Rat& q) {
  Rat c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Rat q(s);
      q.canonicalize();
      return q;
    }
    Rat q(s.substr(0, slash) + "/" + s.substr(slash + 1));
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
}

}  // namespace apm

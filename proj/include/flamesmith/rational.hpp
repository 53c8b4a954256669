#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace flamesmith {

// Exact arithmetic for every value the engine computes.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

// Integer value of r when it is integral and fits in a long.
inline std::optional<long> as_long(const Rational& r) {
  if (!is_integer(r) || !r.get_num().fits_slong_p()) return std::nullopt;
  return r.get_num().get_si();
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace flamesmith

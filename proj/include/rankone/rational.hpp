#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rankone {

/// Level indices, heights and offsets. Construction rejects anything that
/// would overflow.
using Index = std::uint64_t;

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Always "p/q" in lowest terms, including integers ("3/1") and zero ("0/1").
std::string to_string(const Rational& r);

/// Accepts "p/q", "p" or a finite decimal such as "0.25".
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

inline Rational make_rational(Index num, Index den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

/// floor(r) for r >= 0.
inline Index floor_index(const Rational& r) {
  BigInt q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
  return q.convert_to<Index>();
}

}  // namespace rankone

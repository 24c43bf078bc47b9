#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Boost 1.74's mixed rational/integer operator== recurses without end under
// C++20 rewritten comparisons. These exact non-template overloads win
// overload resolution; they live in namespace boost so ADL finds them.
namespace boost {

inline bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, long long b) {
  return a.denominator() == 1 && a.numerator() == b;
}

}  // namespace boost

namespace secidx {

using Rational = boost::rational<std::int64_t>;

// "3", "-1/2", "0.25", "2.5e-1". Decimal forms are converted exactly.
Rational parse_rational(std::string_view text);

// Integer form when the denominator is 1, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

// Least common multiple of the denominators; 1 for an empty range.
std::int64_t common_denominator(std::span<const Rational> values);

// value * scale as an exact integer. Throws InputError when the product is
// not integral and OverflowError when it does not fit.
std::int64_t scale_to_integer(const Rational& value, std::int64_t scale);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace secidx

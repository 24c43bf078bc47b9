#include "secidx/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "secidx/errors.hpp"

namespace secidx {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    throw OverflowError("numeric value out of range: '" + std::string(whole) + "'");
  }
  if (ec != std::errc{} || ptr != last || first == last) {
    throw InputError("not a number: '" + std::string(whole) + "'");
  }
  return value;
}

std::int64_t pow10(int exponent) {
  std::int64_t result = 1;
  for (int i = 0; i < exponent; ++i) result = checked_mul(result, 10);
  return result;
}

}  // namespace

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("64-bit integer overflow in addition");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("64-bit integer overflow in multiplication");
  return out;
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InputError("empty numeric value");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_int(text.substr(0, slash), text);
    std::int64_t den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
    return Rational(num, den);
  }

  std::string_view mantissa = text;
  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    exponent = static_cast<int>(parse_int(text.substr(e + 1), text));
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  int fraction_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
    fraction_digits = static_cast<int>(mantissa.size() - dot - 1);
  } else {
    digits = std::string(mantissa);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError("not a number: '" + std::string(text) + "'");
  }
  std::int64_t num = parse_int(digits, text);
  if (negative) num = -num;
  const int scale = exponent - fraction_digits;
  if (scale >= 0) return Rational(checked_mul(num, pow10(scale)));
  return Rational(num, pow10(-scale));
}

std::string to_string(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

std::int64_t common_denominator(std::span<const Rational> values) {
  std::int64_t lcm = 1;
  for (const Rational& v : values) {
    const std::int64_t den = v.denominator();
    lcm = checked_mul(lcm / std::gcd(lcm, den), den);
  }
  return lcm;
}

std::int64_t scale_to_integer(const Rational& value, std::int64_t scale) {
  const std::int64_t den = value.denominator();
  if (scale % den != 0) throw InputError("scale is not a multiple of the denominator of " + to_string(value));
  return checked_mul(value.numerator(), scale / den);
}

}  // namespace secidx

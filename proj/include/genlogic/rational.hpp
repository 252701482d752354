#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace genlogic {

// Unbounded exact arithmetic. Every probability in the engine is one of these.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts "7", "-7", "3/10" and plain decimals such as "0.25"; decimals are
// converted exactly (0.1 is 1/10, not the nearest double).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error("malformed rational '" + std::string(text) + "'"); };
  auto parse_int = [&](std::string_view digits, bool allow_sign) {
    std::size_t i = 0;
    bool negative = false;
    if (allow_sign && !digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      negative = digits[0] == '-';
      ++i;
    }
    if (i == digits.size()) fail();
    Integer value = 0;
    for (; i < digits.size(); ++i) {
      if (digits[i] < '0' || digits[i] > '9') fail();
      value = value * 10 + (digits[i] - '0');
    }
    return negative ? Integer(-value) : value;
  };

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Integer num = parse_int(text.substr(0, slash), true);
    const Integer den = parse_int(text.substr(slash + 1), false);
    if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    bool negative = false;
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
      negative = whole[0] == '-';
      whole.remove_prefix(1);
    }
    if (whole.empty() && frac.empty()) fail();
    const Integer w = whole.empty() ? Integer(0) : parse_int(whole, false);
    const Integer f = frac.empty() ? Integer(0) : parse_int(frac, false);
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational r = Rational(w) + Rational(f, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_int(text, true));
}

// "3/5", "1", "0". Always fully reduced.
inline std::string format_rational(const Rational& r) {
  const Integer& den = boost::multiprecision::denominator(r);
  std::string out = boost::multiprecision::numerator(r).str();
  if (den != 1) out += "/" + den.str();
  return out;
}

// Nearest multiple of 10^-places (ties away from zero), as a double.
inline double round_to_double(const Rational& r, int places = 6) {
  Integer scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const Rational scaled = r * scale;
  const Integer& num = boost::multiprecision::numerator(scaled);
  const Integer& den = boost::multiprecision::denominator(scaled);
  Integer q = (abs(num) * 2 + den) / (den * 2);
  if (num < 0) q = -q;
  return q.convert_to<double>() / scale.convert_to<double>();
}

inline Rational power(const Rational& base, std::size_t exponent) {
  Rational result = 1;
  for (std::size_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace genlogic

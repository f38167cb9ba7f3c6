#include "qdc/rational.hpp"

#include <limits>
#include <stdexcept>

namespace qdc {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = (s[0] == '-');
    s = s.substr(1);
  }
  if (s.empty()) throw std::invalid_argument("parse_rational: empty value '" + text + "'");

  Rational result;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw std::invalid_argument("parse_rational: malformed fraction '" + text + "'");
    BigInt d(den);
    if (d == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + text + "'");
    result = Rational(BigInt(num), d);
  } else if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty())
      throw std::invalid_argument("parse_rational: malformed decimal '" + text + "'");
    if (!whole.empty() && !all_digits(whole))
      throw std::invalid_argument("parse_rational: malformed decimal '" + text + "'");
    if (!frac.empty() && !all_digits(frac))
      throw std::invalid_argument("parse_rational: malformed decimal '" + text + "'");
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    BigInt units = whole.empty() ? BigInt(0) : BigInt(whole);
    BigInt sub = frac.empty() ? BigInt(0) : BigInt(frac);
    result = Rational(units * scale + sub, scale);
  } else {
    if (!all_digits(s)) throw std::invalid_argument("parse_rational: malformed value '" + text + "'");
    result = Rational(BigInt(s));
  }
  if (negative) result = -result;
  return result;
}

std::string format_rational(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool fits_int64(const BigInt& value) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  return value >= lo && value <= hi;
}

}  // namespace qdc

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace qdc {

// All grid values, coordinates and verdicts are exact rationals; the
// inequality systems behind every verdict admit no rounding.  Expression
// templates are off, so both types behave as ordinary values.
using BigInt =
    boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                  boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

/// Parses "p/q", an integer string, or a decimal string ("0.75") exactly.
/// Throws std::invalid_argument on malformed input or zero denominator.
Rational parse_rational(const std::string& text);

/// Lowest-terms rendering: "p/q", or just "p" when the denominator is 1.
std::string format_rational(const Rational& value);

bool fits_int64(const BigInt& value);

}  // namespace qdc

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace nesy {

using Rational = boost::rational<std::int64_t>;

/// Parses `12`, `-3/4`, `0.125` into an exact rational. Decimal literals are
/// read digit by digit, so `0.1` is exactly 1/10.
Rational parse_rational(std::string_view text);

/// `n` for integers, `n/d` otherwise. Inverse of parse_rational.
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace nesy

#include "nesy/rational.hpp"

#include <cctype>
#include <limits>

#include "nesy/error.hpp"

namespace nesy {
namespace {

std::int64_t checked_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw InputError("malformed number '" + std::string(whole) + "'");
  std::int64_t n = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw InputError("malformed number '" + std::string(whole) + "'");
    if (n > (std::numeric_limits<std::int64_t>::max() - 9) / 10)
      throw InputError("number out of range '" + std::string(whole) + "'");
    n = n * 10 + (ch - '0');
  }
  return n;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational r;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t num = checked_digits(s.substr(0, slash), text);
    std::int64_t den = checked_digits(s.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    r = Rational(num, den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw InputError("malformed number '" + std::string(text) + "'");
    if (frac_part.size() > 17) throw InputError("too many decimal places in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    std::int64_t ip = int_part.empty() ? 0 : checked_digits(int_part, text);
    std::int64_t fp = frac_part.empty() ? 0 : checked_digits(frac_part, text);
    if (ip > (std::numeric_limits<std::int64_t>::max() - fp) / scale)
      throw InputError("number out of range '" + std::string(text) + "'");
    r = Rational(ip * scale + fp, scale);
  } else {
    r = Rational(checked_digits(s, text));
  }
  return negative ? -r : r;
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace nesy

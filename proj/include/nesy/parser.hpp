#pragma once

#include <string_view>

#include "nesy/formula.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

/// Parses a sentence of the formula language. Operators, tightest first:
/// `!`, `&`, `|`, `->` (right-associative), `<->`. Linear comparisons such as
/// `2*x - y >= 1/2` range over FiniteSet/BoundedReal symbols. `#` starts a
/// line comment.
///
/// Throws ParseError with the offending position on syntax errors,
/// undeclared identifiers, atoms over numeric symbols and comparisons over
/// atom symbols.
Formula parse_formula(std::string_view text, const SymbolTable& table);

}  // namespace nesy

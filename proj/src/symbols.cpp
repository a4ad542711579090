#include "nesy/symbols.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "nesy/error.hpp"

namespace nesy {
namespace {

constexpr double kUnassigned = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

Domain::Domain(DomainKind kind, std::vector<Rational> values, double lo, double hi)
    : kind_(kind), values_(std::move(values)), lo_(lo), hi_(hi) {
  reals_.reserve(values_.size());
  for (const auto& v : values_) reals_.push_back(to_double(v));
}

Domain Domain::boolean() { return Domain(DomainKind::Boolean, {Rational(0), Rational(1)}, 0.0, 1.0); }

Domain Domain::unit_interval() { return Domain(DomainKind::UnitInterval, {}, 0.0, 1.0); }

Domain Domain::finite_set(std::vector<Rational> values) {
  if (values.empty()) throw InputError("finite domain must not be empty");
  std::set<Rational> seen;
  for (const auto& v : values)
    if (!seen.insert(v).second) throw InputError("duplicate value " + format_rational(v) + " in finite domain");
  auto lo = *seen.begin();
  auto hi = *seen.rbegin();
  return Domain(DomainKind::FiniteSet, std::move(values), to_double(lo), to_double(hi));
}

Domain Domain::bounded_real(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InputError("real domain bounds must be finite");
  if (lo > hi) throw InputError("real domain needs lo <= hi");
  return Domain(DomainKind::BoundedReal, {}, lo, hi);
}

std::optional<std::size_t> Domain::find(double x) const {
  for (std::size_t i = 0; i < reals_.size(); ++i)
    if (reals_[i] == x) return i;
  return std::nullopt;
}

std::optional<std::size_t> Domain::find(const Rational& x) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] == x) return i;
  return std::nullopt;
}

bool Domain::contains(double x) const {
  if (is_finite()) return find(x).has_value();
  return x >= lo_ && x <= hi_;
}

std::string Domain::to_string() const {
  switch (kind_) {
    case DomainKind::Boolean:
      return "bool";
    case DomainKind::UnitInterval:
      return "unit";
    case DomainKind::BoundedReal:
      return "[" + shortest(lo_) + ", " + shortest(hi_) + "]";
    case DomainKind::FiniteSet: {
      std::string out = "{";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ", ";
        out += format_rational(values_[i]);
      }
      return out + "}";
    }
  }
  return {};
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char ch) { return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_'; };
  if (!alpha(name.front())) return false;
  return std::all_of(name.begin(), name.end(), [&](char ch) { return alpha(ch) || (ch >= '0' && ch <= '9'); });
}

std::shared_ptr<const SymbolTable> SymbolTable::make(std::vector<SymbolDecl> decls) {
  std::vector<Symbol> symbols;
  std::set<std::string, std::less<>> names;
  symbols.reserve(decls.size());
  for (auto& d : decls) {
    if (!is_identifier(d.name)) throw InputError("invalid symbol name '" + d.name + "'");
    if (d.name == "true" || d.name == "false") throw InputError("'" + d.name + "' is reserved");
    if (!names.insert(d.name).second) throw InputError("duplicate symbol '" + d.name + "'");
    symbols.push_back(Symbol{std::move(d.name), std::move(d.domain), symbols.size()});
  }
  return std::shared_ptr<const SymbolTable>(new SymbolTable(std::move(symbols)));
}

std::optional<std::size_t> SymbolTable::find(std::string_view name) const {
  for (const auto& s : symbols_)
    if (s.name == name) return s.index;
  return std::nullopt;
}

std::size_t SymbolTable::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw InputError("undeclared symbol '" + std::string(name) + "'");
}

std::shared_ptr<const SymbolTable> SymbolTable::with_atom_domain(const Domain& atom_domain) const {
  if (!atom_domain.is_atom_domain()) throw InputError("atom domain must be bool or unit");
  auto copy = symbols_;
  for (auto& s : copy)
    if (s.domain.is_atom_domain()) s.domain = atom_domain;
  return std::shared_ptr<const SymbolTable>(new SymbolTable(std::move(copy)));
}

std::vector<std::size_t> SymbolTable::all_indices() const {
  std::vector<std::size_t> out(symbols_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

Interpretation::Interpretation(SymbolTablePtr table)
    : table_(std::move(table)), values_(table_->size(), kUnassigned), choices_(table_->size(), -1) {}

void Interpretation::set(std::size_t index, double x) {
  const auto& sym = (*table_)[index];
  if (sym.domain.is_finite()) {
    auto c = sym.domain.find(x);
    if (!c) throw InputError("value " + shortest(x) + " not in domain of '" + sym.name + "'");
    set_choice(index, *c);
    return;
  }
  if (!sym.domain.contains(x)) throw InputError("value " + shortest(x) + " outside domain of '" + sym.name + "'");
  values_[index] = x;
  choices_[index] = -1;
}

void Interpretation::set(std::size_t index, const Rational& x) {
  const auto& sym = (*table_)[index];
  if (sym.domain.is_finite()) {
    auto c = sym.domain.find(x);
    if (!c) throw InputError("value " + format_rational(x) + " not in domain of '" + sym.name + "'");
    set_choice(index, *c);
    return;
  }
  set(index, to_double(x));
}

void Interpretation::set_choice(std::size_t index, std::size_t choice) {
  const auto& dom = (*table_)[index].domain;
  values_[index] = dom.value(choice);
  choices_[index] = static_cast<std::int32_t>(choice);
}

void Interpretation::unset(std::size_t index) {
  values_[index] = kUnassigned;
  choices_[index] = -1;
}

bool Interpretation::assigned(std::size_t index) const { return !std::isnan(values_[index]); }

bool Interpretation::total() const {
  return std::none_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

double Interpretation::value(std::size_t index) const {
  double v = values_[index];
  if (std::isnan(v)) throw InputError("missing assignment for '" + (*table_)[index].name + "'");
  return v;
}

std::optional<std::size_t> Interpretation::choice(std::size_t index) const {
  if (choices_[index] < 0) return std::nullopt;
  return static_cast<std::size_t>(choices_[index]);
}

void Interpretation::merge(const Interpretation& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!other.assigned(i)) continue;
    values_[i] = other.values_[i];
    choices_[i] = other.choices_[i];
  }
}

std::string Interpretation::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!assigned(i)) continue;
    if (!first) out += ", ";
    first = false;
    out += (*table_)[i].name + ": ";
    if (choices_[i] >= 0)
      out += format_rational((*table_)[i].domain.exact_value(static_cast<std::size_t>(choices_[i])));
    else
      out += shortest(values_[i]);
  }
  return out + "}";
}

bool operator==(const Interpretation& a, const Interpretation& b) {
  if (a.values_.size() != b.values_.size()) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    bool sa = a.assigned(i), sb = b.assigned(i);
    if (sa != sb) return false;
    if (sa && (a.values_[i] != b.values_[i] || a.choices_[i] != b.choices_[i])) return false;
  }
  return true;
}

bool next_interpretation(Interpretation& w, std::span<const std::size_t> symbols) {
  for (std::size_t k = symbols.size(); k-- > 0;) {
    std::size_t i = symbols[k];
    std::size_t next = *w.choice(i) + 1;
    if (next < w.symbols()[i].domain.size()) {
      w.set_choice(i, next);
      return true;
    }
    w.set_choice(i, 0);
  }
  return false;
}

void reset_to_first(Interpretation& w, std::span<const std::size_t> symbols) {
  for (auto i : symbols) w.set_choice(i, 0);
}

InterpretationStream::InterpretationStream(SymbolTablePtr table, std::vector<std::size_t> symbols)
    : InterpretationStream(Interpretation(std::move(table)), std::move(symbols)) {}

InterpretationStream::InterpretationStream(const Interpretation& base, std::vector<std::size_t> symbols)
    : base_(base), symbols_(std::move(symbols)) {
  for (auto i : symbols_) {
    const auto& sym = base_.symbols()[i];
    if (!sym.domain.is_finite()) throw InputError("symbol '" + sym.name + "' is not enumerable");
    if (count_ > std::numeric_limits<std::uint64_t>::max() / sym.domain.size())
      throw InputError("interpretation space too large to enumerate");
    count_ *= sym.domain.size();
  }
  reset();
}

void InterpretationStream::reset() {
  current_.reset();
  done_ = false;
}

std::optional<Interpretation> InterpretationStream::next() {
  if (done_) return std::nullopt;
  if (!current_) {
    current_ = base_;
    reset_to_first(*current_, symbols_);
  } else if (!next_interpretation(*current_, symbols_)) {
    done_ = true;
    return std::nullopt;
  }
  return current_;
}

InterpretationStream enumerate_interpretations(SymbolTablePtr table, std::vector<std::size_t> symbols) {
  return InterpretationStream(std::move(table), std::move(symbols));
}

}  // namespace nesy

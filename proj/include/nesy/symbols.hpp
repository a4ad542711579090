#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nesy/rational.hpp"

namespace nesy {

enum class DomainKind { Boolean, UnitInterval, FiniteSet, BoundedReal };

/// Value domain D_i of a symbol. Finite domains (Boolean, FiniteSet) keep
/// their values in declaration order; that order drives enumeration.
class Domain {
 public:
  static Domain boolean();
  static Domain unit_interval();
  /// Throws InputError on an empty or duplicated value list.
  static Domain finite_set(std::vector<Rational> values);
  /// Throws InputError unless lo <= hi and both are finite.
  static Domain bounded_real(double lo, double hi);

  DomainKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == DomainKind::Boolean || kind_ == DomainKind::FiniteSet; }
  /// Boolean and UnitInterval symbols can appear as atoms; the others only in comparisons.
  bool is_atom_domain() const { return kind_ == DomainKind::Boolean || kind_ == DomainKind::UnitInterval; }

  /// Number of values; only meaningful for finite domains.
  std::size_t size() const { return values_.size(); }
  const Rational& exact_value(std::size_t choice) const { return values_[choice]; }
  double value(std::size_t choice) const { return reals_[choice]; }
  /// Index of `x` among the finite values (exact double match), if any.
  std::optional<std::size_t> find(double x) const;
  std::optional<std::size_t> find(const Rational& x) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Lebesgue length of a continuous domain (1 for the unit interval).
  double length() const { return hi_ - lo_; }

  bool contains(double x) const;

  std::string to_string() const;

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.kind_ == b.kind_ && a.values_ == b.values_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Domain(DomainKind kind, std::vector<Rational> values, double lo, double hi);

  DomainKind kind_;
  std::vector<Rational> values_;
  std::vector<double> reals_;
  double lo_;
  double hi_;
};

struct Symbol {
  std::string name;
  Domain domain;
  std::size_t index;
};

struct SymbolDecl {
  std::string name;
  Domain domain;
};

bool is_identifier(std::string_view name);

/// Ordered symbol set S. Immutable; shared between formulas, interpretations
/// and beliefs of one model.
class SymbolTable {
 public:
  /// Throws InputError on invalid or duplicate names.
  static std::shared_ptr<const SymbolTable> make(std::vector<SymbolDecl> decls);

  std::size_t size() const { return symbols_.size(); }
  const Symbol& operator[](std::size_t index) const { return symbols_[index]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::optional<std::size_t> find(std::string_view name) const;
  /// Like find, but throws InputError naming the missing symbol.
  std::size_t index_of(std::string_view name) const;

  /// Copy of this table where every atom symbol has domain `atom_domain`
  /// (Boolean or UnitInterval). Indices are preserved, so formulas stay valid.
  std::shared_ptr<const SymbolTable> with_atom_domain(const Domain& atom_domain) const;

  std::vector<std::size_t> all_indices() const;

 private:
  explicit SymbolTable(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  std::vector<Symbol> symbols_;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

/// Assignment ω of values to symbols. Starts fully unassigned; `total()`
/// reports whether every symbol has a value. Values on finite domains also
/// carry their position in the domain, which keeps comparisons exact.
class Interpretation {
 public:
  explicit Interpretation(SymbolTablePtr table);

  const SymbolTable& symbols() const { return *table_; }
  const SymbolTablePtr& table() const { return table_; }
  std::size_t size() const { return values_.size(); }

  /// Throws InputError if `x` is not in the symbol's domain.
  void set(std::size_t index, double x);
  void set(std::size_t index, const Rational& x);
  void set(std::string_view name, double x) { set(table_->index_of(name), x); }
  /// Finite domains only: assign the `choice`-th declared value.
  void set_choice(std::size_t index, std::size_t choice);
  /// Continuous domains only, no membership check. For integration loops.
  void set_unchecked(std::size_t index, double x) { values_[index] = x; }
  void unset(std::size_t index);

  bool assigned(std::size_t index) const;
  bool total() const;
  /// Throws InputError ("missing assignment") when unassigned.
  double value(std::size_t index) const;
  double value(std::string_view name) const { return value(table_->index_of(name)); }
  /// Position within a finite domain, or nullopt for continuous/unassigned symbols.
  std::optional<std::size_t> choice(std::size_t index) const;

  /// Copies every assigned value of `other` (same table) into this.
  void merge(const Interpretation& other);

  /// `{h: 1, c: 0.5}` with finite values printed exactly.
  std::string to_string() const;

  friend bool operator==(const Interpretation& a, const Interpretation& b);

 private:
  SymbolTablePtr table_;
  std::vector<double> values_;
  std::vector<std::int32_t> choices_;
};

/// Restartable stream over all interpretations of `symbols` (finite domains
/// only), lexicographic with the lowest symbol index most significant and
/// domain values in declared order. Symbols outside the list keep the values
/// of `base`.
class InterpretationStream {
 public:
  InterpretationStream(SymbolTablePtr table, std::vector<std::size_t> symbols);
  InterpretationStream(const Interpretation& base, std::vector<std::size_t> symbols);

  std::optional<Interpretation> next();
  void reset();
  /// Product of the domain sizes.
  std::uint64_t count() const { return count_; }

 private:
  Interpretation base_;
  std::vector<std::size_t> symbols_;
  std::uint64_t count_ = 1;
  std::optional<Interpretation> current_;
  bool done_ = false;
};

/// Throws InputError ("not enumerable") if any symbol has an infinite domain.
InterpretationStream enumerate_interpretations(SymbolTablePtr table, std::vector<std::size_t> symbols);

/// Odometer step over finite `symbols`, last symbol fastest. Returns false
/// after wrapping around to the first interpretation.
bool next_interpretation(Interpretation& w, std::span<const std::size_t> symbols);

/// Sets every symbol in `symbols` to its first domain value.
void reset_to_first(Interpretation& w, std::span<const std::size_t> symbols);

}  // namespace nesy

#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "nesy/formula.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

enum class TNorm { Lukasiewicz, Goedel, Product };

/// Semantic function μ. Boolean semantics has V = {0, 1} and Boolean atoms;
/// fuzzy semantics has V = [0, 1] and unit-interval atoms.
class Semantics {
 public:
  static Semantics boolean() { return Semantics(false, TNorm::Lukasiewicz); }
  static Semantics fuzzy(TNorm t) { return Semantics(true, t); }

  bool is_boolean() const { return !fuzzy_; }
  bool is_fuzzy() const { return fuzzy_; }
  /// Meaningful for fuzzy semantics only.
  TNorm tnorm() const { return tnorm_; }
  /// Domain atoms must have under this semantics.
  Domain atom_domain() const { return fuzzy_ ? Domain::unit_interval() : Domain::boolean(); }
  /// `boolean`, `lukasiewicz`, `goedel` or `product`.
  std::string name() const;

  friend bool operator==(const Semantics& a, const Semantics& b) {
    return a.fuzzy_ == b.fuzzy_ && (!a.fuzzy_ || a.tnorm_ == b.tnorm_);
  }

 private:
  Semantics(bool fuzzy, TNorm t) : fuzzy_(fuzzy), tnorm_(t) {}
  bool fuzzy_;
  TNorm tnorm_;
};

/// Throws InputError for names other than those produced by Semantics::name.
Semantics semantics_from_name(const std::string& name);

// Connective tables. Every evaluator goes through these so that results agree
// bit for bit.
namespace connective {

inline double negate(TNorm t, double x) {
  if (t == TNorm::Goedel) return x == 0.0 ? 1.0 : 0.0;
  return 1.0 - x;
}

inline double conj(TNorm t, double x, double y) {
  switch (t) {
    case TNorm::Lukasiewicz: return std::max(0.0, x + y - 1.0);
    case TNorm::Goedel: return std::min(x, y);
    case TNorm::Product: return x * y;
  }
  return 0.0;
}

inline double disj(TNorm t, double x, double y) {
  switch (t) {
    case TNorm::Lukasiewicz: return std::min(1.0, x + y);
    case TNorm::Goedel: return std::max(x, y);
    case TNorm::Product: return x + y - x * y;
  }
  return 0.0;
}

inline double implies(TNorm t, double x, double y) {
  switch (t) {
    case TNorm::Lukasiewicz: return std::min(1.0, 1.0 - x + y);
    case TNorm::Goedel: return x <= y ? 1.0 : y;
    case TNorm::Product: return x <= y ? 1.0 : y / x;
  }
  return 0.0;
}

/// Biconditional as the t-norm of both residua.
inline double iff(TNorm t, double x, double y) { return conj(t, implies(t, x, y), implies(t, y, x)); }

// Boolean semantics on {0, 1}; implication is !x | y.
inline double bool_not(double x) { return x == 0.0 ? 1.0 : 0.0; }
inline double bool_and(double x, double y) { return (x != 0.0 && y != 0.0) ? 1.0 : 0.0; }
inline double bool_or(double x, double y) { return (x != 0.0 || y != 0.0) ? 1.0 : 0.0; }
inline double bool_implies(double x, double y) { return bool_or(bool_not(x), y); }
inline double bool_iff(double x, double y) { return (x != 0.0) == (y != 0.0) ? 1.0 : 0.0; }

}  // namespace connective

/// Crisp truth of `e cmp 0` in w: exact rational arithmetic when all
/// symbols take finite-domain values, long double otherwise.
bool compare_holds(const LinearExpr& e, Comparator cmp, const Interpretation& w);

/// Inductive evaluation of f in w. Throws InputError on a missing
/// assignment or an atom whose domain does not match the semantics.
double eval(const Semantics& sem, const Formula& f, const Interpretation& w);

/// Logic function l: the identity on semantic values (Direct), a strict
/// threshold ⟦φ(ω) > τ⟧ (Threshold), or φ(ω) restricted to selection values
/// V_l (ValueSet, either a finite set or a closed interval).
class LogicFn {
 public:
  struct Direct {};
  struct Threshold {
    double tau;
  };
  struct ValueSet {
    std::vector<double> values;  // finite V_l; empty when `interval` is used
    bool interval = false;
    double lo = 0.0;
    double hi = 1.0;
  };

  static LogicFn direct() { return LogicFn(Direct{}); }
  /// Throws InputError unless 0 <= tau < 1.
  static LogicFn threshold(double tau);
  static LogicFn value_set(std::vector<double> values);
  static LogicFn value_interval(double lo, double hi);

  /// Applies l to an already evaluated semantic value.
  double select(double value) const;
  /// Whether `value` belongs to V_l (always true for Direct).
  bool selects(double value) const;

  const std::variant<Direct, Threshold, ValueSet>& kind() const { return kind_; }
  bool is_direct() const { return std::holds_alternative<Direct>(kind_); }
  /// `direct`, `threshold(0.5)`, `select{0, 1}`, `select[0.5, 1]`.
  std::string describe() const;

 private:
  explicit LogicFn(std::variant<Direct, Threshold, ValueSet> k) : kind_(std::move(k)) {}
  std::variant<Direct, Threshold, ValueSet> kind_;
};

double apply_logic_fn(const LogicFn& l, const Semantics& sem, const Formula& f, const Interpretation& w);

/// Formula flattened to a postfix program for integration loops. Domain
/// compatibility is checked once at construction; results are identical to
/// eval().
class Evaluator {
 public:
  Evaluator(const Semantics& sem, const Formula& f, const SymbolTable& table);

  double operator()(const Interpretation& w) const;
  const std::vector<std::size_t>& symbols() const { return symbols_; }

 private:
  enum class Op { Atom, Const, Not, And, Or, Implies, Iff, Compare };
  struct Instr {
    Op op;
    std::size_t arg = 0;  // symbol for Atom, index into compares_ for Compare
    double value = 0.0;
  };
  struct Cmp {
    LinearExpr expr;
    Comparator cmp;
  };

  void emit(const Formula& f);

  Semantics sem_;
  std::vector<Instr> code_;
  std::vector<Cmp> compares_;
  std::vector<std::size_t> symbols_;
  std::size_t max_stack_ = 0;
};

}  // namespace nesy

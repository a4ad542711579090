#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "nesy/rational.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

enum class NodeKind { Atom, True, False, Not, And, Or, Implies, Iff, Compare };

enum class Comparator { Less, LessEq, Equal, GreaterEq, Greater };

struct LinearTerm {
  Rational coeff;
  std::size_t symbol;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// Σ coeff·symbol + constant, kept sorted by symbol index with merged,
/// non-zero coefficients so that equal expressions compare equal.
struct LinearExpr {
  std::vector<LinearTerm> terms;
  Rational constant{0};

  void add(const Rational& coeff, std::size_t symbol);
  void add_constant(const Rational& c) { constant += c; }
  LinearExpr& operator-=(const LinearExpr& other);
  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

bool holds(Comparator cmp, const Rational& lhs_minus_rhs);
bool holds(Comparator cmp, long double lhs_minus_rhs);

/// Immutable formula tree with cheap copies. Equality and hashing are
/// structural.
class Formula {
 public:
  NodeKind kind() const { return node_->kind; }
  /// Atom only.
  std::size_t symbol() const { return node_->symbol; }
  /// Not: the operand; binary connectives: the left operand.
  const Formula& lhs() const { return node_->children[0]; }
  const Formula& rhs() const { return node_->children[1]; }
  const Formula& operand() const { return node_->children[0]; }
  /// Compare only: the expression e in `e cmp 0`.
  const LinearExpr& linear() const { return node_->linear; }
  Comparator comparator() const { return node_->cmp; }

  bool is_constant() const { return kind() == NodeKind::True || kind() == NodeKind::False; }
  std::size_t hash() const { return node_->hash; }
  /// Identity of the shared node; stable while any copy is alive.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

  friend Formula atom(std::size_t symbol);
  friend Formula constant(bool value);
  friend Formula negation(Formula f);
  friend Formula conjunction(Formula a, Formula b);
  friend Formula disjunction(Formula a, Formula b);
  friend Formula implication(Formula a, Formula b);
  friend Formula equivalence(Formula a, Formula b);
  friend Formula compare(LinearExpr e, Comparator cmp);

 private:
  struct Node {
    NodeKind kind;
    std::size_t symbol = 0;
    std::vector<Formula> children;
    LinearExpr linear;
    Comparator cmp = Comparator::Equal;
    std::size_t hash = 0;
  };
  static Formula make(Node node);
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Formula atom(std::size_t symbol);
Formula constant(bool value);
Formula negation(Formula f);
Formula conjunction(Formula a, Formula b);
Formula disjunction(Formula a, Formula b);
Formula implication(Formula a, Formula b);
Formula equivalence(Formula a, Formula b);
/// `e cmp 0`.
Formula compare(LinearExpr e, Comparator cmp);

/// Indices of the symbols occurring in f, ascending.
std::vector<std::size_t> free_symbols(const Formula& f);

/// Throws InputError unless every index exists, atoms reference atom
/// symbols and comparisons reference numeric (FiniteSet/BoundedReal) symbols.
void validate(const Formula& f, const SymbolTable& table);

/// Surface syntax accepted by parse_formula, with only the parentheses
/// precedence requires.
std::string to_string(const Formula& f, const SymbolTable& table);

std::size_t depth(const Formula& f);

/// Ordered sentences φ1..φN; treated as their conjunction when a single
/// sentence is needed.
class Theory {
 public:
  /// Throws InputError when empty.
  explicit Theory(std::vector<Formula> sentences);
  const std::vector<Formula>& sentences() const { return sentences_; }
  std::size_t size() const { return sentences_.size(); }
  const Formula& operator[](std::size_t i) const { return sentences_[i]; }
  Formula conjunction() const;

 private:
  std::vector<Formula> sentences_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

}  // namespace nesy

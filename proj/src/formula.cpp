#include "nesy/formula.hpp"

#include <algorithm>
#include <functional>

#include "nesy/error.hpp"

namespace nesy {
namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& r) {
  return mix(std::hash<std::int64_t>{}(r.numerator()), std::hash<std::int64_t>{}(r.denominator()));
}

}  // namespace

void LinearExpr::add(const Rational& coeff, std::size_t symbol) {
  auto it = std::lower_bound(terms.begin(), terms.end(), symbol,
                             [](const LinearTerm& t, std::size_t s) { return t.symbol < s; });
  if (it != terms.end() && it->symbol == symbol) {
    it->coeff += coeff;
    if (it->coeff.numerator() == 0) terms.erase(it);
  } else if (coeff.numerator() != 0) {
    terms.insert(it, LinearTerm{coeff, symbol});
  }
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const auto& t : other.terms) add(-t.coeff, t.symbol);
  constant -= other.constant;
  return *this;
}

bool holds(Comparator cmp, const Rational& r) {
  // Mixed rational/int comparisons recurse under C++20 with this Boost; compare the sign.
  const auto d = r.numerator();
  switch (cmp) {
    case Comparator::Less: return d < 0;
    case Comparator::LessEq: return d <= 0;
    case Comparator::Equal: return d == 0;
    case Comparator::GreaterEq: return d >= 0;
    case Comparator::Greater: return d > 0;
  }
  return false;
}

bool holds(Comparator cmp, long double d) {
  switch (cmp) {
    case Comparator::Less: return d < 0;
    case Comparator::LessEq: return d <= 0;
    case Comparator::Equal: return d == 0;
    case Comparator::GreaterEq: return d >= 0;
    case Comparator::Greater: return d > 0;
  }
  return false;
}

Formula Formula::make(Node node) {
  std::size_t h = static_cast<std::size_t>(node.kind) * 0x100000001b3ULL;
  for (const auto& c : node.children) h = mix(h, c.hash());
  if (node.kind == NodeKind::Atom) h = mix(h, node.symbol);
  if (node.kind == NodeKind::Compare) {
    h = mix(h, static_cast<std::size_t>(node.cmp));
    for (const auto& t : node.linear.terms) h = mix(mix(h, t.symbol), hash_rational(t.coeff));
    h = mix(h, hash_rational(node.linear.constant));
  }
  node.hash = h;
  return Formula(std::make_shared<const Node>(std::move(node)));
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::True:
    case NodeKind::False:
      return true;
    case NodeKind::Atom:
      return a.symbol() == b.symbol();
    case NodeKind::Compare:
      return a.comparator() == b.comparator() && a.linear() == b.linear();
    case NodeKind::Not:
      return a.operand() == b.operand();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Formula atom(std::size_t symbol) {
  Formula::Node n{NodeKind::Atom};
  n.symbol = symbol;
  return Formula::make(std::move(n));
}

Formula constant(bool value) {
  static const Formula t = Formula::make(Formula::Node{NodeKind::True});
  static const Formula f = Formula::make(Formula::Node{NodeKind::False});
  return value ? t : f;
}

Formula negation(Formula f) {
  Formula::Node n{NodeKind::Not};
  n.children = {std::move(f)};
  return Formula::make(std::move(n));
}

Formula conjunction(Formula a, Formula b) {
  Formula::Node n{NodeKind::And};
  n.children = {std::move(a), std::move(b)};
  return Formula::make(std::move(n));
}

Formula disjunction(Formula a, Formula b) {
  Formula::Node n{NodeKind::Or};
  n.children = {std::move(a), std::move(b)};
  return Formula::make(std::move(n));
}

Formula implication(Formula a, Formula b) {
  Formula::Node n{NodeKind::Implies};
  n.children = {std::move(a), std::move(b)};
  return Formula::make(std::move(n));
}

Formula equivalence(Formula a, Formula b) {
  Formula::Node n{NodeKind::Iff};
  n.children = {std::move(a), std::move(b)};
  return Formula::make(std::move(n));
}

Formula compare(LinearExpr e, Comparator cmp) {
  Formula::Node n{NodeKind::Compare};
  n.linear = std::move(e);
  n.cmp = cmp;
  return Formula::make(std::move(n));
}

namespace {

void collect(const Formula& f, std::vector<std::size_t>& out) {
  switch (f.kind()) {
    case NodeKind::Atom:
      out.push_back(f.symbol());
      break;
    case NodeKind::Compare:
      for (const auto& t : f.linear().terms) out.push_back(t.symbol);
      break;
    case NodeKind::True:
    case NodeKind::False:
      break;
    case NodeKind::Not:
      collect(f.operand(), out);
      break;
    default:
      collect(f.lhs(), out);
      collect(f.rhs(), out);
  }
}

}  // namespace

std::vector<std::size_t> free_symbols(const Formula& f) {
  std::vector<std::size_t> out;
  collect(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate(const Formula& f, const SymbolTable& table) {
  switch (f.kind()) {
    case NodeKind::Atom: {
      if (f.symbol() >= table.size()) throw InputError("formula references unknown symbol index");
      const auto& s = table[f.symbol()];
      if (!s.domain.is_atom_domain()) throw InputError("symbol '" + s.name + "' is numeric and cannot be used as an atom");
      break;
    }
    case NodeKind::Compare:
      for (const auto& t : f.linear().terms) {
        if (t.symbol >= table.size()) throw InputError("formula references unknown symbol index");
        const auto& s = table[t.symbol];
        if (s.domain.is_atom_domain())
          throw InputError("symbol '" + s.name + "' is an atom and cannot appear in a linear comparison");
      }
      break;
    case NodeKind::True:
    case NodeKind::False:
      break;
    case NodeKind::Not:
      validate(f.operand(), table);
      break;
    default:
      validate(f.lhs(), table);
      validate(f.rhs(), table);
  }
}

namespace {

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Iff: return 1;
    case NodeKind::Implies: return 2;
    case NodeKind::Or: return 3;
    case NodeKind::And: return 4;
    case NodeKind::Not: return 5;
    default: return 6;
  }
}

const char* comparator_text(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Equal: return "=";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Greater: return ">";
  }
  return "?";
}

void print_linear(const LinearExpr& e, Comparator cmp, const SymbolTable& table, std::string& out) {
  bool first = true;
  for (const auto& t : e.terms) {
    Rational mag = t.coeff.numerator() < 0 ? -t.coeff : t.coeff;
    if (first)
      out += t.coeff.numerator() < 0 ? "-" : "";
    else
      out += t.coeff.numerator() < 0 ? " - " : " + ";
    if (mag != Rational(1)) out += format_rational(mag) + "*";
    out += table[t.symbol].name;
    first = false;
  }
  if (first) {
    out += format_rational(e.constant);
  } else if (e.constant.numerator() != 0) {
    out += e.constant.numerator() < 0 ? " - " : " + ";
    out += format_rational(e.constant.numerator() < 0 ? -e.constant : e.constant);
  }
  out += " ";
  out += comparator_text(cmp);
  out += " 0";
}

void print(const Formula& f, const SymbolTable& table, int min_prec, std::string& out) {
  int prec = precedence(f.kind());
  bool wrap = prec < min_prec;
  if (wrap) out += "(";
  switch (f.kind()) {
    case NodeKind::Atom: out += table[f.symbol()].name; break;
    case NodeKind::True: out += "true"; break;
    case NodeKind::False: out += "false"; break;
    case NodeKind::Compare: print_linear(f.linear(), f.comparator(), table, out); break;
    case NodeKind::Not:
      out += "!";
      print(f.operand(), table, 5, out);
      break;
    case NodeKind::And:
      print(f.lhs(), table, 4, out);
      out += " & ";
      print(f.rhs(), table, 5, out);
      break;
    case NodeKind::Or:
      print(f.lhs(), table, 3, out);
      out += " | ";
      print(f.rhs(), table, 4, out);
      break;
    case NodeKind::Implies:
      print(f.lhs(), table, 3, out);
      out += " -> ";
      print(f.rhs(), table, 2, out);
      break;
    case NodeKind::Iff:
      print(f.lhs(), table, 1, out);
      out += " <-> ";
      print(f.rhs(), table, 2, out);
      break;
  }
  if (wrap) out += ")";
}

}  // namespace

std::string to_string(const Formula& f, const SymbolTable& table) {
  std::string out;
  print(f, table, 0, out);
  return out;
}

std::size_t depth(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom:
    case NodeKind::True:
    case NodeKind::False:
    case NodeKind::Compare:
      return 1;
    case NodeKind::Not:
      return 1 + depth(f.operand());
    default:
      return 1 + std::max(depth(f.lhs()), depth(f.rhs()));
  }
}

Theory::Theory(std::vector<Formula> sentences) : sentences_(std::move(sentences)) {
  if (sentences_.empty()) throw InputError("a theory needs at least one sentence");
}

Formula Theory::conjunction() const {
  Formula out = sentences_.front();
  for (std::size_t i = 1; i < sentences_.size(); ++i) out = nesy::conjunction(out, sentences_[i]);
  return out;
}

}  // namespace nesy

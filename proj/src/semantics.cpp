#include "nesy/semantics.hpp"

#include <charconv>
#include <cmath>

#include "nesy/error.hpp"

namespace nesy {
namespace {

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void check_atom(const Semantics& sem, const SymbolTable& table, std::size_t index) {
  const auto& sym = table[index];
  auto want = sem.is_boolean() ? DomainKind::Boolean : DomainKind::UnitInterval;
  if (sym.domain.kind() != want)
    throw InputError("domain mismatch: atom '" + sym.name + "' has domain " + sym.domain.to_string() + " but " +
                     sem.name() + " semantics needs " + sem.atom_domain().to_string());
}

}  // namespace

std::string Semantics::name() const {
  if (!fuzzy_) return "boolean";
  switch (tnorm_) {
    case TNorm::Lukasiewicz: return "lukasiewicz";
    case TNorm::Goedel: return "goedel";
    case TNorm::Product: return "product";
  }
  return "?";
}

Semantics semantics_from_name(const std::string& name) {
  if (name == "boolean") return Semantics::boolean();
  if (name == "lukasiewicz") return Semantics::fuzzy(TNorm::Lukasiewicz);
  if (name == "goedel") return Semantics::fuzzy(TNorm::Goedel);
  if (name == "product") return Semantics::fuzzy(TNorm::Product);
  throw InputError("unknown semantics '" + name + "'");
}

bool compare_holds(const LinearExpr& e, Comparator cmp, const Interpretation& w) {
  bool exact = true;
  for (const auto& t : e.terms) {
    w.value(t.symbol);  // throws on missing assignment
    if (!w.choice(t.symbol)) exact = false;
  }
  if (exact) {
    Rational sum = e.constant;
    for (const auto& t : e.terms) sum += t.coeff * w.symbols()[t.symbol].domain.exact_value(*w.choice(t.symbol));
    return holds(cmp, sum);
  }
  long double sum = static_cast<long double>(e.constant.numerator()) / e.constant.denominator();
  for (const auto& t : e.terms)
    sum += static_cast<long double>(t.coeff.numerator()) / t.coeff.denominator() * w.value(t.symbol);
  return holds(cmp, sum);
}

double eval(const Semantics& sem, const Formula& f, const Interpretation& w) {
  using namespace connective;
  switch (f.kind()) {
    case NodeKind::True: return 1.0;
    case NodeKind::False: return 0.0;
    case NodeKind::Atom:
      check_atom(sem, w.symbols(), f.symbol());
      return w.value(f.symbol());
    case NodeKind::Compare: return compare_holds(f.linear(), f.comparator(), w) ? 1.0 : 0.0;
    default: break;
  }
  if (f.kind() == NodeKind::Not) {
    double x = eval(sem, f.operand(), w);
    return sem.is_boolean() ? bool_not(x) : negate(sem.tnorm(), x);
  }
  double x = eval(sem, f.lhs(), w);
  double y = eval(sem, f.rhs(), w);
  if (sem.is_boolean()) {
    switch (f.kind()) {
      case NodeKind::And: return bool_and(x, y);
      case NodeKind::Or: return bool_or(x, y);
      case NodeKind::Implies: return bool_implies(x, y);
      default: return bool_iff(x, y);
    }
  }
  TNorm t = sem.tnorm();
  switch (f.kind()) {
    case NodeKind::And: return conj(t, x, y);
    case NodeKind::Or: return disj(t, x, y);
    case NodeKind::Implies: return implies(t, x, y);
    default: return iff(t, x, y);
  }
}

LogicFn LogicFn::threshold(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw InputError("threshold must lie in [0, 1)");
  return LogicFn(Threshold{tau});
}

LogicFn LogicFn::value_set(std::vector<double> values) {
  if (values.empty()) throw InputError("selection set must not be empty");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("selection values must lie in [0, 1]");
  ValueSet s;
  s.values = std::move(values);
  return LogicFn(std::move(s));
}

LogicFn LogicFn::value_interval(double lo, double hi) {
  if (!(lo <= hi)) throw InputError("selection interval needs lo <= hi");
  ValueSet s;
  s.interval = true;
  s.lo = lo;
  s.hi = hi;
  return LogicFn(std::move(s));
}

bool LogicFn::selects(double value) const {
  if (auto* t = std::get_if<Threshold>(&kind_)) return value > t->tau;
  if (auto* s = std::get_if<ValueSet>(&kind_)) {
    if (s->interval) return value >= s->lo && value <= s->hi;
    for (double v : s->values)
      if (std::abs(v - value) <= 1e-12) return true;
    return false;
  }
  return true;
}

double LogicFn::select(double value) const {
  if (std::holds_alternative<Threshold>(kind_)) return selects(value) ? 1.0 : 0.0;
  return selects(value) ? value : 0.0;
}

std::string LogicFn::describe() const {
  if (auto* t = std::get_if<Threshold>(&kind_)) return "threshold(" + shortest(t->tau) + ")";
  if (auto* s = std::get_if<ValueSet>(&kind_)) {
    if (s->interval) return "select[" + shortest(s->lo) + ", " + shortest(s->hi) + "]";
    std::string out = "select{";
    for (std::size_t i = 0; i < s->values.size(); ++i) out += (i ? ", " : "") + shortest(s->values[i]);
    return out + "}";
  }
  return "direct";
}

double apply_logic_fn(const LogicFn& l, const Semantics& sem, const Formula& f, const Interpretation& w) {
  return l.select(eval(sem, f, w));
}

Evaluator::Evaluator(const Semantics& sem, const Formula& f, const SymbolTable& table) : sem_(sem) {
  validate(f, table);
  symbols_ = free_symbols(f);
  for (auto i : symbols_)
    if (table[i].domain.is_atom_domain()) check_atom(sem, table, i);
  emit(f);
  std::size_t depth = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Atom:
      case Op::Const:
      case Op::Compare:
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case Op::Not:
        break;
      default:
        --depth;
    }
  }
}

void Evaluator::emit(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::True: code_.push_back({Op::Const, 0, 1.0}); return;
    case NodeKind::False: code_.push_back({Op::Const, 0, 0.0}); return;
    case NodeKind::Atom: code_.push_back({Op::Atom, f.symbol(), 0.0}); return;
    case NodeKind::Compare:
      code_.push_back({Op::Compare, compares_.size(), 0.0});
      compares_.push_back({f.linear(), f.comparator()});
      return;
    case NodeKind::Not:
      emit(f.operand());
      code_.push_back({Op::Not});
      return;
    default: break;
  }
  emit(f.lhs());
  emit(f.rhs());
  switch (f.kind()) {
    case NodeKind::And: code_.push_back({Op::And}); break;
    case NodeKind::Or: code_.push_back({Op::Or}); break;
    case NodeKind::Implies: code_.push_back({Op::Implies}); break;
    default: code_.push_back({Op::Iff}); break;
  }
}

double Evaluator::operator()(const Interpretation& w) const {
  using namespace connective;
  for (auto i : symbols_) w.value(i);  // throws on missing assignment
  double small[32] = {};
  std::vector<double> big;
  double* stack = small;
  if (max_stack_ > 32) {
    big.resize(max_stack_);
    stack = big.data();
  }
  std::size_t sp = 0;
  const bool boolean = sem_.is_boolean();
  const TNorm t = sem_.tnorm();
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Atom: stack[sp++] = w.value(in.arg); break;
      case Op::Const: stack[sp++] = in.value; break;
      case Op::Compare: {
        const auto& c = compares_[in.arg];
        stack[sp++] = compare_holds(c.expr, c.cmp, w) ? 1.0 : 0.0;
        break;
      }
      case Op::Not: stack[sp - 1] = boolean ? bool_not(stack[sp - 1]) : negate(t, stack[sp - 1]); break;
      default: {
        double y = stack[--sp];
        double x = stack[sp - 1];
        double r;
        switch (in.op) {
          case Op::And: r = boolean ? bool_and(x, y) : conj(t, x, y); break;
          case Op::Or: r = boolean ? bool_or(x, y) : disj(t, x, y); break;
          case Op::Implies: r = boolean ? bool_implies(x, y) : implies(t, x, y); break;
          default: r = boolean ? bool_iff(x, y) : iff(t, x, y); break;
        }
        stack[sp - 1] = r;
      }
    }
  }
  return stack[0];
}

}  // namespace nesy

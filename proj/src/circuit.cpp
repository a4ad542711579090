#include "nesy/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "nesy/error.hpp"
#include "nesy/semantics.hpp"

namespace nesy {
namespace {

Formula mk_not(const Formula& x) {
  if (x.kind() == NodeKind::True) return constant(false);
  if (x.kind() == NodeKind::False) return constant(true);
  if (x.kind() == NodeKind::Not) return x.operand();
  return negation(x);
}

Formula mk_binary(NodeKind k, const Formula& a, const Formula& b) {
  const bool at = a.kind() == NodeKind::True, af = a.kind() == NodeKind::False;
  const bool bt = b.kind() == NodeKind::True, bf = b.kind() == NodeKind::False;
  switch (k) {
    case NodeKind::And:
      if (af || bf) return constant(false);
      if (at) return b;
      if (bt) return a;
      return conjunction(a, b);
    case NodeKind::Or:
      if (at || bt) return constant(true);
      if (af) return b;
      if (bf) return a;
      return disjunction(a, b);
    case NodeKind::Implies:
      if (af || bt) return constant(true);
      if (at) return b;
      if (bf) return mk_not(a);
      return implication(a, b);
    default:
      if (at) return b;
      if (bt) return a;
      if (af) return mk_not(b);
      if (bf) return mk_not(a);
      return equivalence(a, b);
  }
}

/// Folds symbol-free comparisons and checks the formula is purely Boolean.
Formula prepare(const Formula& f, const SymbolTable& table) {
  switch (f.kind()) {
    case NodeKind::True:
    case NodeKind::False:
      return f;
    case NodeKind::Atom:
      if (f.symbol() >= table.size() || table[f.symbol()].domain.kind() != DomainKind::Boolean)
        throw InputError("circuit compilation needs boolean atoms");
      return f;
    case NodeKind::Compare:
      if (!f.linear().terms.empty())
        throw InputError("circuit compilation does not support comparisons over numeric symbols; use enumeration");
      return constant(holds(f.comparator(), f.linear().constant));
    case NodeKind::Not:
      return mk_not(prepare(f.operand(), table));
    default:
      return mk_binary(f.kind(), prepare(f.lhs(), table), prepare(f.rhs(), table));
  }
}

void flatten_and(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == NodeKind::And) {
    flatten_and(f.lhs(), out);
    flatten_and(f.rhs(), out);
  } else {
    out.push_back(f);
  }
}

class Compiler {
 public:
  explicit Compiler(std::vector<CompiledCircuit::Node>& nodes) : nodes_(nodes) {
    nodes_.push_back({CompiledCircuit::Kind::False});
    nodes_.push_back({CompiledCircuit::Kind::True});
  }

  std::size_t run(const Formula& f) {
    if (f.kind() == NodeKind::False) return 0;
    if (f.kind() == NodeKind::True) return 1;
    if (auto it = cache_.find(f); it != cache_.end()) return it->second;
    std::size_t id = decompose(f);
    cache_.emplace(f, id);
    return id;
  }

 private:
  std::size_t decompose(const Formula& f) {
    std::vector<Formula> conjuncts;
    flatten_and(f, conjuncts);
    if (conjuncts.size() > 1) {
      auto groups = components(conjuncts);
      if (groups.size() > 1) {
        std::vector<std::size_t> children;
        for (const auto& g : groups) {
          Formula part = conjuncts[g.front()];
          for (std::size_t i = 1; i < g.size(); ++i) part = conjunction(part, conjuncts[g[i]]);
          std::size_t child = run(part);
          if (child == 0) return 0;
          if (child != 1) children.push_back(child);
        }
        if (children.empty()) return 1;
        if (children.size() == 1) return children.front();
        std::sort(children.begin(), children.end());
        return intern_conjunction(std::move(children));
      }
    }
    std::size_t v = free_symbols(f).front();
    std::size_t low = run(condition(f, v, false));
    std::size_t high = run(condition(f, v, true));
    if (low == high) return low;
    return intern_decision(v, low, high);
  }

  /// Groups conjuncts into connected components of the shares-a-symbol relation.
  static std::vector<std::vector<std::size_t>> components(const std::vector<Formula>& conjuncts) {
    std::vector<std::size_t> parent(conjuncts.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<std::size_t, std::size_t> owner;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      for (auto s : free_symbols(conjuncts[i])) {
        auto [it, fresh] = owner.emplace(s, i);
        if (!fresh) parent[find(i)] = find(it->second);
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;
  }

  std::size_t intern_decision(std::size_t symbol, std::size_t low, std::size_t high) {
    auto key = std::make_tuple(symbol, low, high);
    if (auto it = decisions_.find(key); it != decisions_.end()) return it->second;
    CompiledCircuit::Node n{CompiledCircuit::Kind::Decision};
    n.symbol = symbol;
    n.low = low;
    n.high = high;
    nodes_.push_back(std::move(n));
    decisions_.emplace(key, nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  std::size_t intern_conjunction(std::vector<std::size_t> children) {
    if (auto it = conjunctions_.find(children); it != conjunctions_.end()) return it->second;
    CompiledCircuit::Node n{CompiledCircuit::Kind::Conjunction};
    n.children = children;
    nodes_.push_back(std::move(n));
    conjunctions_.emplace(std::move(children), nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  std::vector<CompiledCircuit::Node>& nodes_;
  std::unordered_map<Formula, std::size_t, FormulaHash> cache_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> decisions_;
  std::map<std::vector<std::size_t>, std::size_t> conjunctions_;
};

double prob_of(std::span<const double> probs, std::size_t symbol) {
  double p = symbol < probs.size() ? probs[symbol] : std::nan("");
  if (std::isnan(p)) throw InputError("circuit decision symbol " + std::to_string(symbol) + " has no probability");
  return p;
}

std::vector<double> upward(const CompiledCircuit& c, std::span<const double> probs) {
  const auto& nodes = c.nodes();
  std::vector<double> val(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    switch (n.kind) {
      case CompiledCircuit::Kind::False: val[i] = 0.0; break;
      case CompiledCircuit::Kind::True: val[i] = 1.0; break;
      case CompiledCircuit::Kind::Decision: {
        double p = prob_of(probs, n.symbol);
        val[i] = (1.0 - p) * val[n.low] + p * val[n.high];
        break;
      }
      case CompiledCircuit::Kind::Conjunction: {
        double prod = 1.0;
        for (auto ch : n.children) prod *= val[ch];
        val[i] = prod;
        break;
      }
    }
  }
  return val;
}

}  // namespace

Formula condition(const Formula& f, std::size_t symbol, bool value) {
  switch (f.kind()) {
    case NodeKind::Atom:
      return f.symbol() == symbol ? constant(value) : f;
    case NodeKind::True:
    case NodeKind::False:
    case NodeKind::Compare:
      return f;
    case NodeKind::Not: {
      Formula x = condition(f.operand(), symbol, value);
      return x.id() == f.operand().id() ? f : mk_not(x);
    }
    default: {
      Formula a = condition(f.lhs(), symbol, value);
      Formula b = condition(f.rhs(), symbol, value);
      if (a.id() == f.lhs().id() && b.id() == f.rhs().id()) return f;
      return mk_binary(f.kind(), a, b);
    }
  }
}

CompiledCircuit compile(const Formula& f, const SymbolTable& table) {
  CompiledCircuit c;
  c.table_size_ = table.size();
  Formula g = prepare(f, table);
  Compiler compiler(c.nodes_);
  c.root_ = compiler.run(g);
  return c;
}

std::vector<std::vector<std::size_t>> CompiledCircuit::node_symbols() const {
  std::vector<std::vector<std::size_t>> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    std::vector<std::size_t> s;
    if (n.kind == Kind::Decision) {
      s = out[n.low];
      s.insert(s.end(), out[n.high].begin(), out[n.high].end());
      s.push_back(n.symbol);
    } else if (n.kind == Kind::Conjunction) {
      for (auto ch : n.children) s.insert(s.end(), out[ch].begin(), out[ch].end());
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    out[i] = std::move(s);
  }
  return out;
}

bool CompiledCircuit::well_formed() const {
  auto syms = node_symbols();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.kind == Kind::Decision) {
      if (n.low >= i || n.high >= i) return false;
      for (auto ch : {n.low, n.high})
        if (std::binary_search(syms[ch].begin(), syms[ch].end(), n.symbol)) return false;
    } else if (n.kind == Kind::Conjunction) {
      std::vector<std::size_t> seen;
      for (auto ch : n.children) {
        if (ch >= i) return false;
        for (auto s : syms[ch]) {
          if (std::find(seen.begin(), seen.end(), s) != seen.end()) return false;
          seen.push_back(s);
        }
      }
    }
  }
  return true;
}

double wmc(const CompiledCircuit& c, std::span<const double> probs) { return upward(c, probs)[c.root()]; }

double wmc(const CompiledCircuit& c, const IndependentBernoulli& b) {
  auto probs = b.dense();
  return wmc(c, probs);
}

CircuitGradient wmc_gradient(const CompiledCircuit& c, std::span<const double> probs) {
  const auto& nodes = c.nodes();
  auto val = upward(c, probs);
  std::vector<double> adj(nodes.size(), 0.0);
  CircuitGradient out{val[c.root()], std::vector<double>(probs.size(), 0.0)};
  adj[c.root()] = 1.0;
  for (std::size_t i = c.root() + 1; i-- > 0;) {
    const auto& n = nodes[i];
    if (adj[i] == 0.0) continue;
    if (n.kind == CompiledCircuit::Kind::Decision) {
      double p = prob_of(probs, n.symbol);
      out.grad[n.symbol] += adj[i] * (val[n.high] - val[n.low]);
      adj[n.low] += adj[i] * (1.0 - p);
      adj[n.high] += adj[i] * p;
    } else if (n.kind == CompiledCircuit::Kind::Conjunction) {
      for (std::size_t a = 0; a < n.children.size(); ++a) {
        double others = 1.0;
        for (std::size_t b = 0; b < n.children.size(); ++b)
          if (b != a) others *= val[n.children[b]];
        adj[n.children[a]] += adj[i] * others;
      }
    }
  }
  return out;
}

}  // namespace nesy

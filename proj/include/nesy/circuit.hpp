#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nesy/belief.hpp"
#include "nesy/formula.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

/// Decision-DNNF style circuit for a Boolean formula. Nodes are stored
/// children first, so index order is a topological order.
///
/// Decision nodes branch on one symbol (low: false, high: true) and neither
/// branch mentions that symbol again. Conjunction children share no symbols.
/// Symbols the formula does not depend on along a branch are skipped; this
/// is sound for weighted counting with normalized Bernoulli weights.
class CompiledCircuit {
 public:
  enum class Kind { False, True, Decision, Conjunction };
  struct Node {
    Kind kind;
    std::size_t symbol = 0;
    std::size_t low = 0;
    std::size_t high = 0;
    std::vector<std::size_t> children;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t table_size() const { return table_size_; }

  /// Symbols each node mentions, bottom-up.
  std::vector<std::vector<std::size_t>> node_symbols() const;
  /// Checks the decision and conjunction invariants above.
  bool well_formed() const;

 private:
  friend CompiledCircuit compile(const Formula& f, const SymbolTable& table);
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::size_t table_size_ = 0;
};

/// Compiles a Boolean formula, branching on symbols in ascending index
/// order. Throws InputError for non-Boolean atoms or comparisons over
/// symbols (comparisons without symbols are folded).
CompiledCircuit compile(const Formula& f, const SymbolTable& table);

/// Weighted model count with per-symbol probabilities `probs` (indexed by
/// symbol; only decision symbols are read). Throws InputError if a decision
/// symbol has no probability.
double wmc(const CompiledCircuit& c, std::span<const double> probs);
double wmc(const CompiledCircuit& c, const IndependentBernoulli& b);

/// Value and gradient of wmc with respect to every entry of `probs`, from
/// one upward and one downward pass.
struct CircuitGradient {
  double value;
  std::vector<double> grad;  // indexed by symbol
};
CircuitGradient wmc_gradient(const CompiledCircuit& c, std::span<const double> probs);

/// Formula with `symbol` fixed to `value`, constants folded.
Formula condition(const Formula& f, std::size_t symbol, bool value);

}  // namespace nesy

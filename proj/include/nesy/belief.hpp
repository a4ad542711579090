#pragma once

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "nesy/formula.hpp"
#include "nesy/measure.hpp"
#include "nesy/semantics.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

/// b(ω) = ∏ p_s^ω(s) · (1 − p_s)^(1 − ω(s)) over Boolean atoms.
class IndependentBernoulli {
 public:
  /// Throws InputError on non-Boolean symbols, duplicates or p outside [0, 1].
  IndependentBernoulli(SymbolTablePtr table, std::vector<std::pair<std::size_t, double>> probs);

  const SymbolTablePtr& table() const { return table_; }
  /// Symbols carrying a probability, ascending.
  const std::vector<std::size_t>& symbols() const { return symbols_; }
  /// Probabilities aligned with symbols().
  const std::vector<double>& probs() const { return probs_; }
  /// p for `symbol`, or nullopt.
  std::optional<double> prob(std::size_t symbol) const;
  /// Dense per-symbol probabilities (NaN where absent).
  std::vector<double> dense() const;

  /// Throws InputError ("missing a probability") if a Boolean atom of the
  /// table has none.
  void check_complete() const;
  double weight(const Interpretation& w) const;

 private:
  SymbolTablePtr table_;
  std::vector<std::size_t> symbols_;
  std::vector<double> probs_;
};

struct Normalization {
  double z;
  std::optional<double> std_error;  // Monte Carlo bases only
};

/// Log-linear belief exp(Σ λ_i·φ_i(ω)) / Z over every symbol of the table.
/// Boolean semantics gives Markov-logic style weights, fuzzy semantics the
/// soft-logic variant.
class LogLinear {
 public:
  /// Throws InputError unless weights and theory have the same length.
  LogLinear(SymbolTablePtr table, Theory theory, std::vector<double> weights, Semantics sem, MeasureSpec base);

  const SymbolTablePtr& table() const { return table_; }
  const Theory& theory() const { return theory_; }
  const std::vector<double>& weights() const { return weights_; }
  const Semantics& semantics() const { return sem_; }
  const MeasureSpec& base_measure() const { return base_; }
  const std::optional<Normalization>& normalization() const { return norm_; }

  /// exp(Σ λ_i·φ_i(ω)), ignoring any normalization.
  double unnormalized(const Interpretation& w) const;
  /// φ_i(ω) for every sentence.
  std::vector<double> features(const Interpretation& w) const;
  /// unnormalized(w) / Z once normalized.
  double weight(const Interpretation& w) const;

  LogLinear with_weights(std::vector<double> weights) const;

 private:
  friend LogLinear normalize(const LogLinear& b, unsigned threads);
  SymbolTablePtr table_;
  Theory theory_;
  std::vector<double> weights_;
  Semantics sem_;
  MeasureSpec base_;
  std::optional<Normalization> norm_;
  std::vector<Evaluator> evaluators_;
};

/// Point mass at ω_θ. Has no density; the integrator collapses it.
class DiracPoint {
 public:
  /// Throws InputError unless `point` is total.
  explicit DiracPoint(Interpretation point);
  const Interpretation& point() const { return point_; }

 private:
  Interpretation point_;
};

/// Piecewise-linear membership curve on [0, 1] with knots at 0 and 1.
struct MembershipCurve {
  std::size_t symbol;
  std::vector<std::pair<double, double>> knots;
  double exponent = 1.0;

  double operator()(double x) const;
};

/// Fuzzy-set belief f_m(ω) = ∏ curve_s(ω(s))^exponent_s over unit-interval atoms.
class FuzzyMembership {
 public:
  /// Throws InputError on malformed curves: fewer than 2 knots, x not strictly
  /// increasing, missing x = 0 or x = 1, values outside [0, 1], negative
  /// exponents, or symbols that are not unit-interval atoms.
  FuzzyMembership(SymbolTablePtr table, std::vector<MembershipCurve> curves);
  const std::vector<MembershipCurve>& curves() const { return curves_; }
  std::vector<std::size_t> symbols() const;
  double weight(const Interpretation& w) const;

 private:
  std::vector<MembershipCurve> curves_;
};

using Belief = std::variant<IndependentBernoulli, LogLinear, DiracPoint, FuzzyMembership>;

/// b_θ(φ, ω). Bernoulli and Dirac ignore φ; LogLinear uses its own theory.
/// Throws InputError for a Dirac belief (no density) or an incomplete
/// Bernoulli belief.
double belief_weight(const Belief& b, const Formula& f, const Interpretation& w);

/// Computes Z = ∫ exp(Σ λ_i·φ_i) over the base measure and stores it.
/// Throws NumericalError when Z is not finite and positive.
LogLinear normalize(const LogLinear& b, unsigned threads = 0);

/// Symbols the belief depends on.
std::vector<std::size_t> support(const Belief& b);

/// `bernoulli`, `loglinear`, `dirac` or `fuzzyset`.
std::string family_name(const Belief& b);

/// Parameter vector θ: Bernoulli probabilities (by symbol), log-linear
/// weights, or the Dirac point's values (all symbols, by index).
std::vector<double> parameters(const Belief& b);

struct ParameterUpdate {
  Belief belief;
  bool clamped = false;
};

/// Returns the belief with θ replaced. Bernoulli entries are clamped into
/// [eps, 1 − eps] and reported. Throws InputError on a length mismatch or for
/// FuzzyMembership, which has no parameter vector.
ParameterUpdate with_parameters(const Belief& b, std::span<const double> theta, double eps = 1e-7);

}  // namespace nesy

#pragma once

#include <optional>
#include <vector>

#include "nesy/belief.hpp"
#include "nesy/circuit.hpp"
#include "nesy/formula.hpp"
#include "nesy/integrator.hpp"
#include "nesy/measure.hpp"
#include "nesy/semantics.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

struct GradientResult {
  /// F itself.
  double value = 0.0;
  /// Aligned with parameters() of the belief.
  std::vector<double> grad;
  /// Per-entry standard errors (Monte Carlo bases only).
  std::optional<std::vector<double>> grad_std_error;
  /// Entries whose derivative was taken at (or within the kink tolerance
  /// of) a non-differentiable point. Empty when no entry can be flagged.
  std::vector<bool> kinks;
  bool any_kink = false;
};

/// ∂F/∂p_s for every symbol of `b` (ascending), from one upward and one
/// reverse pass over the circuit.
GradientResult grad_wmc(const CompiledCircuit& c, const IndependentBernoulli& b);

/// Gradient of log F with respect to the weights, where
/// F = ∫ l(φ, ω)·b(ω) over the whole space. Uses
///   ∂ log F/∂λ_i = E_{l·b}[φ_i] − E_b[φ_i],
/// with both expectations from the same pass (same samples under Monte
/// Carlo). `m` defaults to the belief's base measure. Throws NumericalError
/// when F = 0.
GradientResult grad_loglinear(const LogLinear& b, const LogicFn& l, const Formula& f,
                              const std::optional<MeasureSpec>& m = std::nullopt, unsigned threads = 0);

/// Gradient of φ_F(ω) with respect to every coordinate of `point` (indexed
/// by symbol). At ties of min/max style branches the first (left) branch of
/// the connective is differentiated. Coordinates reached through a branch
/// point within `kink_tolerance` of a tie, through Gödel negation near 0, or
/// through a comparison near its boundary are flagged in `kinks`.
GradientResult grad_dirac(const Formula& f, TNorm t, const Interpretation& point, double kink_tolerance = 0.0);

/// Value and parameter gradient of a query, dispatched on the belief:
///  - Bernoulli (boolean semantics, counting): ∂F/∂p on a compiled circuit,
///    conditioning on evidence symbols;
///  - LogLinear: ∂ log F/∂λ over the whole space (no evidence) under `m`;
///  - Dirac (fuzzy semantics): ∂ l(φ_F(ω_θ))/∂ω_θ. Threshold logic functions
///    have zero gradient and are flagged at the threshold.
/// Throws InputError for FuzzyMembership and unsupported combinations.
GradientResult value_and_grad(const Model& model, const LogicFn& l, const Formula& f, const MeasureSpec& m,
                              const InferOptions& opts = {}, double kink_tolerance = 0.0);

}  // namespace nesy

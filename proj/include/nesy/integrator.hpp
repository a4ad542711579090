#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nesy/belief.hpp"
#include "nesy/formula.hpp"
#include "nesy/measure.hpp"
#include "nesy/semantics.hpp"
#include "nesy/symbols.hpp"

namespace nesy {

/// (L, μ, Ω, b_θ): the language and Ω are fixed by the symbol table.
struct Model {
  SymbolTablePtr symbols;
  Semantics semantics;
  Belief belief;
};

struct InferOptions {
  /// Symbols integrated over (Ω'). Defaults to the free symbols of the query
  /// plus the belief's support, minus symbols fixed by `evidence`.
  std::optional<std::vector<std::size_t>> subspace;
  /// Values for symbols outside Ω'. The belief is evaluated on the joined
  /// interpretation, so the result is the mass jointly with the evidence.
  std::optional<Interpretation> evidence;
  /// Weighted model counting on a compiled circuit instead of enumeration
  /// (Boolean semantics, Bernoulli belief, Counting measure only).
  bool use_circuit = false;
  unsigned threads = 0;
};

struct FunctionalResult {
  double value = 0.0;
  std::optional<double> std_error;  // Monte Carlo only
  /// `enumeration`, `circuit`, `quadrature`, `montecarlo`,
  /// `mixed-quadrature`, `mixed-montecarlo` or `dirac`.
  std::string backend;
  /// Interpretations visited (enumeration) or circuit nodes (circuit).
  std::optional<std::uint64_t> models_visited;
};

/// F_θ(φ) = ∫_Ω' l(φ, ω)·b_θ(φ, ω) dm(ω).
///
/// A Dirac belief collapses the integral to l(φ, ω_θ) whatever the measure.
/// A log-linear belief is divided by its normalizing constant; when Ω' is the
/// whole space the constant is computed in the same pass (same samples) as
/// the numerator, otherwise the belief's stored or freshly computed Z is used.
FunctionalResult infer(const Model& model, const LogicFn& l, const Formula& f, const MeasureSpec& m,
                       const InferOptions& opts = {});

/// M = {ω | μ_B(φ, ω) = 1} over `symbols` (other symbols unassigned).
/// Throws InputError for infinite domains.
std::vector<Interpretation> enumerate_models(const Formula& f, const SymbolTablePtr& table,
                                             const std::vector<std::size_t>& symbols);

struct MapResult {
  Interpretation interpretation;
  double score;
};

/// argmax over the (finite) interpretation space of l(φ, ω)·b(φ, ω). Ties go
/// to the first interpretation in enumeration order. A Dirac belief returns
/// its point.
MapResult map_inference(const Model& model, const LogicFn& l, const Formula& f, const InferOptions& opts = {});

/// a·1_S with S given by a membership predicate over a finite carrier.
struct SimpleTerm {
  double coeff;
  std::function<bool(const Interpretation&)> contains;
};

/// ∫ Σ a_i·1_{S_i} dm = Σ a_i·m(S_i) for the counting measure on `carrier`.
/// Throws InputError if two sets overlap or the measure is not Counting.
double lebesgue_simple(std::span<const SimpleTerm> terms, std::span<const Interpretation> carrier,
                       const MeasureSpec& m);

}  // namespace nesy

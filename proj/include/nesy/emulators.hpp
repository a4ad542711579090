#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nesy/belief.hpp"
#include "nesy/formula.hpp"
#include "nesy/integrator.hpp"
#include "nesy/measure.hpp"

namespace nesy {

/// Ground propositional cores of existing systems, each a fixed choice of
/// (semantics, logic function, belief family, measure).
enum class Preset { SemanticLoss, DeepProbLogProp, NeurAspProp, Nmln, Ltn, Sbr, NeuPsl };

/// `semantic_loss`, `deepproblog_prop`, `neurasp_prop`, `nmln`, `ltn`, `sbr`, `neupsl`.
std::string preset_name(Preset p);
/// Throws InputError for unknown names (the message lists the valid ones).
Preset preset_from_name(const std::string& name);
const std::vector<Preset>& all_presets();

/// The quadruple a run actually used, as printed in CLI output.
struct Quadruple {
  std::string semantics;  // Semantics::name()
  std::string logic_fn;   // LogicFn::describe()
  std::string belief;     // family_name()
  std::string measure;    // describe(MeasureSpec), or `collapse` for point beliefs
};

/// Whether the preset needs Boolean (rather than fuzzy) semantics.
bool preset_is_boolean(Preset p);
/// Belief family the preset requires.
std::string preset_belief(Preset p);

struct SemanticLoss {
  double loss;  // +infinity when saturated
  bool saturated;
};

/// −log WMC(f) under independent Bernoulli probabilities, with F computed on
/// a compiled circuit. F = 0 gives loss = +infinity and saturated = true.
SemanticLoss semantic_loss(const Formula& f, const IndependentBernoulli& b);
/// The same loss for an already computed F.
SemanticLoss semantic_loss_from_value(double F);

struct PresetOptions {
  std::optional<Interpretation> evidence;
  /// Measure for the fuzzy expectation preset; defaults to the belief's base measure.
  std::optional<MeasureSpec> measure;
  unsigned threads = 0;
};

struct PresetResult {
  FunctionalResult result;
  Quadruple quadruple;
  std::optional<SemanticLoss> loss;  // semantic_loss only
};

/// Runs the preset's inference on `model`. Throws InputError when the
/// model's semantics or belief family does not fit the preset.
PresetResult run_preset(Preset p, const Model& model, const Formula& f, const PresetOptions& opts = {});

/// Probability of one total interpretation under a normalized log-linear
/// belief (normalized on the fly if needed).
double nmln_interpretation_probability(const LogLinear& b, const Interpretation& w, unsigned threads = 0);

}  // namespace nesy

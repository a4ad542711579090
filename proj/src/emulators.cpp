#include "nesy/emulators.hpp"

#include <cmath>
#include <limits>

#include "nesy/circuit.hpp"
#include "nesy/error.hpp"

namespace nesy {
namespace {

struct Entry {
  Preset preset;
  const char* name;
  bool boolean;
  const char* belief;
};

constexpr Entry kEntries[] = {
    {Preset::SemanticLoss, "semantic_loss", true, "bernoulli"},
    {Preset::DeepProbLogProp, "deepproblog_prop", true, "bernoulli"},
    {Preset::NeurAspProp, "neurasp_prop", true, "bernoulli"},
    {Preset::Nmln, "nmln", true, "loglinear"},
    {Preset::Ltn, "ltn", false, "dirac"},
    {Preset::Sbr, "sbr", false, "dirac"},
    {Preset::NeuPsl, "neupsl", false, "loglinear"},
};

const Entry& entry(Preset p) {
  for (const auto& e : kEntries)
    if (e.preset == p) return e;
  throw InputError("unknown preset");
}

void check_fit(Preset p, const Model& model) {
  const Entry& e = entry(p);
  if (model.semantics.is_boolean() != e.boolean)
    throw InputError("preset '" + std::string(e.name) + "' needs " + (e.boolean ? "boolean" : "fuzzy") +
                     " semantics; the model uses " + model.semantics.name());
  if (family_name(model.belief) != e.belief)
    throw InputError("preset '" + std::string(e.name) + "' needs a " + e.belief + " belief; the model has " +
                     family_name(model.belief));
  if (p == Preset::NeuPsl && model.semantics.tnorm() != TNorm::Lukasiewicz)
    throw InputError("preset 'neupsl' needs lukasiewicz semantics; the model uses " + model.semantics.name());
}

}  // namespace

std::string preset_name(Preset p) { return entry(p).name; }

Preset preset_from_name(const std::string& name) {
  std::string known;
  for (const auto& e : kEntries) {
    if (name == e.name) return e.preset;
    known += known.empty() ? "" : ", ";
    known += e.name;
  }
  throw InputError("unknown preset '" + name + "' (expected one of " + known + ")");
}

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    for (const auto& e : kEntries) v.push_back(e.preset);
    return v;
  }();
  return all;
}

bool preset_is_boolean(Preset p) { return entry(p).boolean; }
std::string preset_belief(Preset p) { return entry(p).belief; }

SemanticLoss semantic_loss_from_value(double F) {
  if (F <= 0.0) return {std::numeric_limits<double>::infinity(), true};
  // −log 1 would print as −0.
  return {F >= 1.0 ? 0.0 : -std::log(F), false};
}

SemanticLoss semantic_loss(const Formula& f, const IndependentBernoulli& b) {
  b.check_complete();
  return semantic_loss_from_value(wmc(compile(f, *b.table()), b));
}

PresetResult run_preset(Preset p, const Model& model, const Formula& f, const PresetOptions& opts) {
  check_fit(p, model);
  const LogicFn direct = LogicFn::direct();
  PresetResult out;
  InferOptions io;
  io.evidence = opts.evidence;
  io.threads = opts.threads;
  MeasureSpec m = Counting{};
  switch (p) {
    case Preset::SemanticLoss:
    case Preset::DeepProbLogProp:
    case Preset::NeurAspProp:
      io.use_circuit = true;
      out.result = infer(model, direct, f, m, io);
      if (p == Preset::SemanticLoss) out.loss = semantic_loss_from_value(out.result.value);
      break;
    case Preset::Nmln:
    case Preset::Ltn:
    case Preset::Sbr:
      out.result = infer(model, direct, f, m, io);
      break;
    case Preset::NeuPsl: {
      const auto& ll = std::get<LogLinear>(model.belief);
      m = opts.measure ? *opts.measure : ll.base_measure();
      if (std::holds_alternative<Counting>(m))
        throw InputError("preset 'neupsl' integrates over fuzzy interpretations; use quadrature or montecarlo");
      out.result = infer(model, direct, f, m, io);
      break;
    }
  }
  out.quadruple = Quadruple{model.semantics.name(), direct.describe(), family_name(model.belief),
                            entry(p).belief == std::string("dirac") ? "collapse" : describe(m)};
  return out;
}

double nmln_interpretation_probability(const LogLinear& b, const Interpretation& w, unsigned threads) {
  if (!w.total()) throw InputError("interpretation must assign every symbol");
  if (b.normalization()) return b.weight(w);
  return normalize(b, threads).weight(w);
}

}  // namespace nesy

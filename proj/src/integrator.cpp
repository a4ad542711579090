#include "nesy/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "nesy/circuit.hpp"
#include "nesy/error.hpp"
#include "nesy/integration.hpp"

namespace nesy {
namespace {

std::string backend_name(const MeasureSpec& m) {
  return std::visit(
      [](const auto& spec) -> std::string {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, Counting>)
          return "enumeration";
        else if constexpr (std::is_same_v<S, BorelQuadrature>)
          return "quadrature";
        else if constexpr (std::is_same_v<S, BorelMonteCarlo>)
          return "montecarlo";
        else
          return std::holds_alternative<BorelQuadrature>(spec.borel) ? "mixed-quadrature" : "mixed-montecarlo";
      },
      m);
}

Interpretation make_base(const Model& model, const InferOptions& opts) {
  Interpretation base(model.symbols);
  if (opts.evidence) {
    if (opts.evidence->size() != model.symbols->size())
      throw InputError("evidence is over a different symbol table");
    base.merge(*opts.evidence);
  }
  return base;
}

std::vector<std::size_t> make_dims(const Model& model, const Formula& f, const InferOptions& opts,
                                   Interpretation& base) {
  std::vector<std::size_t> dims;
  if (opts.subspace) {
    dims = *opts.subspace;
    for (auto i : dims) {
      if (i >= model.symbols->size()) throw InputError("subspace references unknown symbol");
      base.unset(i);
    }
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    return dims;
  }
  dims = free_symbols(f);
  auto sup = support(model.belief);
  dims.insert(dims.end(), sup.begin(), sup.end());
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  std::erase_if(dims, [&](std::size_t i) { return base.assigned(i); });
  return dims;
}

FunctionalResult infer_circuit(const Model& model, const LogicFn& l, const Formula& f, const MeasureSpec& m,
                               const std::vector<std::size_t>& dims, const Interpretation& base) {
  const auto* bern = std::get_if<IndependentBernoulli>(&model.belief);
  if (!model.semantics.is_boolean() || !bern || !std::holds_alternative<Counting>(m))
    throw InputError("the circuit backend needs boolean semantics, a bernoulli belief and the counting measure");
  bern->check_complete();
  auto in_dims = [&](std::size_t i) { return std::binary_search(dims.begin(), dims.end(), i); };
  for (auto s : free_symbols(f))
    if (!in_dims(s) && !base.assigned(s)) base.value(s);  // throws: missing assignment
  Formula g = f;
  for (auto s : free_symbols(f))
    if (!in_dims(s)) g = condition(g, s, base.value(s) != 0.0);
  double factor = 1.0;
  for (std::size_t k = 0; k < bern->symbols().size(); ++k) {
    std::size_t s = bern->symbols()[k];
    if (in_dims(s)) continue;
    double p = bern->probs()[k];
    factor *= base.value(s) != 0.0 ? p : 1.0 - p;
  }
  CompiledCircuit c = compile(g, *model.symbols);
  FunctionalResult r;
  // Under Boolean semantics l(φ, ω) is l(1) on models and 0 elsewhere.
  r.value = l.select(1.0) * factor * wmc(c, *bern);
  r.backend = "circuit";
  r.models_visited = c.size();
  return r;
}

}  // namespace

FunctionalResult infer(const Model& model, const LogicFn& l, const Formula& f, const MeasureSpec& m,
                       const InferOptions& opts) {
  const auto& table = model.symbols;
  Evaluator ev(model.semantics, f, *table);

  if (const auto* dirac = std::get_if<DiracPoint>(&model.belief)) {
    FunctionalResult r;
    r.value = apply_logic_fn(l, model.semantics, f, dirac->point());
    r.backend = "dirac";
    r.models_visited = 1;
    return r;
  }

  Interpretation base = make_base(model, opts);
  auto dims = make_dims(model, f, opts, base);
  if (opts.use_circuit) return infer_circuit(model, l, f, m, dims, base);
  if (const auto* bern = std::get_if<IndependentBernoulli>(&model.belief)) bern->check_complete();

  FunctionalResult r;
  r.backend = backend_name(m);
  Estimate e;
  if (const auto* ll = std::get_if<LogLinear>(&model.belief)) {
    const bool whole = dims.size() == table->size();
    if (whole) {
      e = integrate(base, dims, m, 2,
                    [&](const Interpretation& w, std::span<double> out) {
                      double u = ll->unnormalized(w);
                      out[0] = l.select(ev(w)) * u;
                      out[1] = u;
                    },
                    opts.threads);
      double num = e.value[0], z = e.value[1];
      if (!std::isfinite(z) || !(z > 0.0)) throw NumericalError("log-linear normalizing constant is not finite and positive");
      r.value = num / z;
      if (e.stochastic) {
        double g[2] = {1.0 / z, -num / (z * z)};
        r.std_error = delta_std_error(e, g);
      }
    } else {
      LogLinear normalized = ll->normalization() ? *ll : normalize(*ll, opts.threads);
      const auto& norm = *normalized.normalization();
      e = integrate(base, dims, m, 1,
                    [&](const Interpretation& w, std::span<double> out) {
                      out[0] = l.select(ev(w)) * ll->unnormalized(w);
                    },
                    opts.threads);
      r.value = e.value[0] / norm.z;
      if (e.stochastic || norm.std_error) {
        double a = e.std_error(0) / norm.z;
        double b = norm.std_error ? e.value[0] * *norm.std_error / (norm.z * norm.z) : 0.0;
        r.std_error = std::sqrt(a * a + b * b);
      }
    }
  } else {
    e = integrate(base, dims, m, 1,
                  [&](const Interpretation& w, std::span<double> out) {
                    double lv = l.select(ev(w));
                    out[0] = lv == 0.0 ? 0.0 : lv * belief_weight(model.belief, f, w);
                  },
                  opts.threads);
    r.value = e.value[0];
    if (e.stochastic) r.std_error = e.std_error(0);
  }
  if (std::holds_alternative<Counting>(m)) r.models_visited = e.evaluations;
  return r;
}

std::vector<Interpretation> enumerate_models(const Formula& f, const SymbolTablePtr& table,
                                             const std::vector<std::size_t>& symbols) {
  Evaluator ev(Semantics::boolean(), f, *table);
  std::vector<Interpretation> out;
  auto stream = enumerate_interpretations(table, symbols);
  while (auto w = stream.next())
    if (ev(*w) == 1.0) out.push_back(*w);
  return out;
}

MapResult map_inference(const Model& model, const LogicFn& l, const Formula& f, const InferOptions& opts) {
  const auto& table = model.symbols;
  Evaluator ev(model.semantics, f, *table);
  if (const auto* dirac = std::get_if<DiracPoint>(&model.belief))
    return MapResult{dirac->point(), apply_logic_fn(l, model.semantics, f, dirac->point())};

  Interpretation base = make_base(model, opts);
  auto dims = make_dims(model, f, opts, base);
  for (auto i : dims)
    if (!(*table)[i].domain.is_finite())
      throw InputError("MAP inference needs a finite interpretation space; '" + (*table)[i].name + "' is continuous");

  std::optional<LogLinear> normalized;
  if (const auto* ll = std::get_if<LogLinear>(&model.belief))
    normalized = ll->normalization() ? *ll : normalize(*ll, opts.threads);
  if (const auto* bern = std::get_if<IndependentBernoulli>(&model.belief)) bern->check_complete();

  Interpretation w = base;
  reset_to_first(w, dims);
  std::optional<MapResult> best;
  do {
    double lv = l.select(ev(w));
    double b = normalized ? normalized->weight(w) : belief_weight(model.belief, f, w);
    double score = lv * b;
    if (!best || score > best->score) best = MapResult{w, score};
  } while (next_interpretation(w, dims));
  return *best;
}

double lebesgue_simple(std::span<const SimpleTerm> terms, std::span<const Interpretation> carrier,
                       const MeasureSpec& m) {
  if (!std::holds_alternative<Counting>(m)) throw InputError("lebesgue_simple supports the counting measure only");
  std::vector<std::uint64_t> measure(terms.size(), 0);
  for (const auto& w : carrier) {
    bool hit = false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!terms[i].contains(w)) continue;
      if (hit) throw InputError("simple function sets overlap at " + w.to_string());
      hit = true;
      ++measure[i];
    }
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < terms.size(); ++i) total.add(terms[i].coeff * static_cast<double>(measure[i]));
  return total.value();
}

}  // namespace nesy

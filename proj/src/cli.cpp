#include "nesy/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <optional>

#include "nesy/emulators.hpp"
#include "nesy/error.hpp"
#include "nesy/gradients.hpp"
#include "nesy/integration.hpp"
#include "nesy/integrator.hpp"
#include "nesy/model_file.hpp"
#include "nesy/parser.hpp"

namespace nesy::cli {
namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string model;
  std::vector<std::string> queries;
  std::vector<std::string> exprs;
  std::string backend;
  std::optional<std::uint64_t> seed;
  bool grad = false;
  bool map = false;
  std::string preset;
  bool oracle = false;
  int json_indent = -1;
  unsigned threads = 0;
  std::string semantics;
  std::string measure;
  std::string logic;
  double kink_tolerance = 0.0;
};

bool any_finite(const SymbolTable& t) {
  for (const auto& s : t.symbols())
    if (s.domain.is_finite()) return true;
  return false;
}

/// Measure after --measure, --backend, --oracle and --seed, in that order.
MeasureSpec choose_measure(const Options& o, const MeasureSpec& file, const SymbolTable& table) {
  MeasureSpec m = o.measure.empty() ? file : parse_measure(o.measure);
  std::optional<std::variant<BorelQuadrature, BorelMonteCarlo>> borel;
  if (auto* mixed = std::get_if<ProductMixed>(&m)) borel = mixed->borel;
  if (auto* q = std::get_if<BorelQuadrature>(&m)) borel = *q;
  if (auto* mc = std::get_if<BorelMonteCarlo>(&m)) borel = *mc;

  auto continuous = [&](std::variant<BorelQuadrature, BorelMonteCarlo> b) -> MeasureSpec {
    if (any_finite(table)) return ProductMixed{b};
    return std::visit([](auto x) -> MeasureSpec { return x; }, b);
  };
  if (o.oracle || o.backend == "enum" || o.backend == "circuit") {
    m = Counting{};
  } else if (o.backend == "quad") {
    BorelQuadrature q;
    if (borel && std::holds_alternative<BorelQuadrature>(*borel)) q = std::get<BorelQuadrature>(*borel);
    m = continuous(q);
  } else if (o.backend == "mc") {
    BorelMonteCarlo mc;
    if (borel && std::holds_alternative<BorelMonteCarlo>(*borel)) mc = std::get<BorelMonteCarlo>(*borel);
    m = continuous(mc);
  }
  if (o.seed) {
    if (auto* mc = std::get_if<BorelMonteCarlo>(&m)) mc->seed = *o.seed;
    if (auto* mixed = std::get_if<ProductMixed>(&m))
      if (auto* mc = std::get_if<BorelMonteCarlo>(&mixed->borel)) mc->seed = *o.seed;
  }
  return m;
}

Json interpretation_json(const Interpretation& w) {
  Json j = Json::object();
  const auto& table = w.symbols();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!w.assigned(i)) continue;
    j[table[i].name] = w.value(i);
  }
  return j;
}

Json quadruple_json(const Quadruple& q) {
  return Json{{"semantics", q.semantics}, {"logic_fn", q.logic_fn}, {"belief", q.belief}, {"measure", q.measure}};
}

void add_grad(Json& j, const GradientResult& g, const Model& model) {
  j["grad"] = g.grad;
  j["grad_of"] = std::holds_alternative<LogLinear>(model.belief) ? "log_value" : "value";
  if (g.grad_std_error) j["grad_std_error"] = *g.grad_std_error;
  if (g.any_kink) {
    Json names = Json::array();
    for (std::size_t i = 0; i < g.kinks.size(); ++i)
      if (g.kinks[i]) names.push_back((*model.symbols)[i].name);
    j["kinks"] = names;
  }
}

Json run_query(const Options& o, const ModelFile& mf, const MeasureSpec& m, const QuerySpec& q) {
  const Model& model = mf.model;
  Json j;
  j["query"] = q.name;
  InferOptions io;
  io.evidence = q.evidence;
  io.threads = o.threads;
  io.use_circuit = o.backend == "circuit" && !o.oracle;

  if (!o.preset.empty()) {
    Preset p = preset_from_name(o.preset);
    PresetOptions po{q.evidence, std::nullopt, o.threads};
    if (p == Preset::NeuPsl && !std::holds_alternative<Counting>(m)) po.measure = m;
    if (!q.logic_fn.is_direct()) throw InputError("presets fix the logic function; query '" + q.name + "' sets " + q.logic_fn.describe());
    PresetResult r = run_preset(p, model, q.formula, po);
    if (o.oracle && preset_is_boolean(p)) {
      InferOptions plain = io;
      plain.use_circuit = false;
      r.result = infer(model, LogicFn::direct(), q.formula, Counting{}, plain);
      if (r.loss) r.loss = semantic_loss_from_value(r.result.value);
    }
    j["backend"] = r.result.backend;
    j["value"] = r.result.value;
    if (r.result.std_error) j["std_error"] = *r.result.std_error;
    if (o.grad) {
      MeasureSpec gm = p == Preset::NeuPsl ? (po.measure ? *po.measure : std::get<LogLinear>(model.belief).base_measure())
                                           : MeasureSpec{Counting{}};
      add_grad(j, value_and_grad(model, LogicFn::direct(), q.formula, gm, io, o.kink_tolerance), model);
    }
    if (r.result.models_visited) j["models_visited"] = *r.result.models_visited;
    j["preset"] = preset_name(p);
    if (r.loss) {
      j["loss"] = r.loss->saturated ? Json(nullptr) : Json(r.loss->loss);
      j["saturated"] = r.loss->saturated;
    }
    j["quadruple"] = quadruple_json(r.quadruple);
    return j;
  }

  const bool dirac = std::holds_alternative<DiracPoint>(model.belief);
  Quadruple quad{model.semantics.name(), q.logic_fn.describe(), family_name(model.belief),
                 dirac ? "collapse" : describe(m)};
  if (o.map) {
    MapResult r = map_inference(model, q.logic_fn, q.formula, io);
    j["backend"] = dirac ? "dirac" : "map-enumeration";
    j["value"] = r.score;
    j["interpretation"] = interpretation_json(r.interpretation);
    j["quadruple"] = quadruple_json(quad);
    return j;
  }
  FunctionalResult r = infer(model, q.logic_fn, q.formula, m, io);
  j["backend"] = r.backend;
  j["value"] = r.value;
  if (r.std_error) j["std_error"] = *r.std_error;
  if (o.grad) add_grad(j, value_and_grad(model, q.logic_fn, q.formula, m, io, o.kink_tolerance), model);
  if (r.models_visited) j["models_visited"] = *r.models_visited;
  j["quadruple"] = quadruple_json(quad);
  return j;
}

std::optional<Semantics> preset_semantics(const Options& o, const std::string& model_path) {
  if (!o.semantics.empty()) return semantics_from_name(o.semantics);
  if (o.preset.empty()) return std::nullopt;
  Preset p = preset_from_name(o.preset);
  ModelFile probe = load_model(model_path);
  if (probe.model.semantics.is_boolean() == preset_is_boolean(p)) {
    if (p == Preset::NeuPsl && probe.model.semantics.tnorm() != TNorm::Lukasiewicz)
      return Semantics::fuzzy(TNorm::Lukasiewicz);
    return std::nullopt;
  }
  return preset_is_boolean(p) ? Semantics::boolean() : Semantics::fuzzy(TNorm::Lukasiewicz);
}

int execute(const Options& o, std::ostream& out) {
  if (o.threads) set_default_threads(o.threads);
  LoadOverrides ov;
  ov.semantics = preset_semantics(o, o.model);
  ov.measure = [&](const MeasureSpec& file, const SymbolTable& table) {
    MeasureSpec m = choose_measure(o, file, table);
    if (o.preset == "neupsl" && std::holds_alternative<Counting>(m) && o.backend.empty() && !o.oracle)
      m = BorelQuadrature{};
    return m;
  };
  ModelFile mf = load_model(o.model, ov);

  std::vector<QuerySpec> todo;
  for (const auto& name : o.queries) {
    auto q = mf.find_query(name);
    if (!q) throw InputError("unknown query '" + name + "'");
    todo.push_back(*q);
  }
  LogicFn expr_logic = o.logic.empty() ? LogicFn::direct() : parse_logic_fn(o.logic);
  for (std::size_t i = 0; i < o.exprs.size(); ++i) {
    auto parse = [&] {
      try {
        Formula f = parse_formula(o.exprs[i], *mf.model.symbols);
        Evaluator check(mf.model.semantics, f, *mf.model.symbols);
        return f;
      } catch (const ParseError& e) {
        throw InputError("<expr>:" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.detail());
      }
    };
    todo.push_back(QuerySpec{o.exprs.size() == 1 ? "expr" : "expr" + std::to_string(i + 1), o.exprs[i], parse(),
                             expr_logic, std::nullopt});
  }
  if (o.queries.empty() && o.exprs.empty()) {
    todo = mf.queries;
    if (todo.empty())
      for (const auto& [name, f] : mf.theory) todo.push_back(*mf.find_query(name));
    if (todo.empty()) throw InputError("no queries: the model has none and neither --query nor -e was given");
  }

  // Compute everything first so a failing query leaves no partial output.
  std::vector<Json> docs;
  for (const auto& q : todo) docs.push_back(run_query(o, mf, mf.measure, q));
  for (const auto& d : docs) out << d.dump(o.json_indent) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neurosymbolic inference engine: evaluates queries of a model file as one JSON document each."};
  app.name(args.empty() ? "nesy" : args.front());
  Options o;
  app.add_option("--model", o.model, "Model file")->required();
  app.add_option("--query", o.queries, "Query or theory sentence name (repeatable)");
  app.add_option("-e,--expr", o.exprs, "Inline formula (repeatable)");
  app.add_option("--backend", o.backend, "Integration backend")->check(CLI::IsMember({"enum", "circuit", "quad", "mc"}));
  app.add_option("--seed", o.seed, "Monte Carlo seed");
  app.add_flag("--grad", o.grad, "Add the parameter gradient");
  app.add_flag("--map", o.map, "MAP inference instead of the functional");
  app.add_option("--preset", o.preset, "System preset");
  app.add_flag("--oracle", o.oracle, "Force brute-force enumeration");
  app.add_option("--json-indent", o.json_indent, "JSON indentation (-1: one document per line)");
  app.add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
  app.add_option("--semantics", o.semantics, "Override semantics")
      ->check(CLI::IsMember({"boolean", "lukasiewicz", "goedel", "product"}));
  app.add_option("--measure", o.measure, "Override measure, e.g. quadrature(g=400)");
  app.add_option("--logic", o.logic, "Logic function for -e formulas, e.g. threshold(0.5)");
  app.add_option("--kink-tol", o.kink_tolerance, "Tolerance for flagging non-differentiable points");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (o.map && o.grad) throw InputError("--map and --grad cannot be combined");
    if (o.map && !o.preset.empty()) throw InputError("--map and --preset cannot be combined");
    if (!o.preset.empty()) preset_from_name(o.preset);
    return execute(o, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace nesy::cli

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nesy/formula.hpp"
#include "nesy/integrator.hpp"
#include "nesy/measure.hpp"
#include "nesy/semantics.hpp"

namespace nesy {

struct QuerySpec {
  std::string name;
  std::string text;  // formula source as written
  Formula formula;
  LogicFn logic_fn = LogicFn::direct();
  std::optional<Interpretation> evidence;
};

/// A parsed model file: the model quadruple plus named sentences and queries.
struct ModelFile {
  Model model;
  MeasureSpec measure;
  std::vector<std::pair<std::string, Formula>> theory;
  std::vector<QuerySpec> queries;

  /// Query by name; theory sentences double as Direct queries.
  std::optional<QuerySpec> find_query(const std::string& name) const;
};

/// Command-line style replacements applied while loading, before the belief
/// is built (so a log-linear base measure follows the measure override).
struct LoadOverrides {
  /// Replaces the file's semantics. Atom symbols (declared `bool` or `unit`)
  /// are retyped to the new semantics' atom domain.
  std::optional<Semantics> semantics;
  /// Maps the file's measure (counting when absent) to the one used.
  std::function<MeasureSpec(const MeasureSpec&, const SymbolTable&)> measure;
};

/// Parses model file text. `source` names the file in diagnostics, which
/// read `source:line: message`. Throws InputError (ParseError for syntax).
ModelFile parse_model(const std::string& text, const std::string& source = "<model>",
                      const LoadOverrides& overrides = {});

/// Reads and parses a file; unreadable files throw InputError.
ModelFile load_model(const std::string& path, const LoadOverrides& overrides = {});

/// Parses `direct`, `threshold(0.5)`, `select{0, 1}` or `select[0.5, 1]`.
LogicFn parse_logic_fn(const std::string& text);

/// Parses `counting`, `quadrature(g=200)`, `montecarlo(n=1000, seed=7)` or
/// `mixed(quadrature(g=50))`; arguments are optional.
MeasureSpec parse_measure(const std::string& text);

}  // namespace nesy

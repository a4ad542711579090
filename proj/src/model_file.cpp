#include "nesy/model_file.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nesy/error.hpp"
#include "nesy/parser.hpp"
#include "nesy/rational.hpp"

namespace nesy {
namespace {

/// Diagnostic that already carries `source:line:`.
class LocatedError : public InputError {
 public:
  using InputError::InputError;
};

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  Lexer(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= text_.size()) break;
      const std::size_t line = line_, col = col_;
      char c = text_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) step();
        out.push_back({Tok::Ident, text_.substr(start, i_ - start), line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t start = i_;
        while (i_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.' ||
                                     text_[i_] == '/'))
          step();
        if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
          step();
          if (i_ < text_.size() && (text_[i_] == '+' || text_[i_] == '-')) step();
          while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) step();
        }
        out.push_back({Tok::Number, text_.substr(start, i_ - start), line, col});
      } else if (c == '"') {
        step();
        std::size_t start = i_;
        while (i_ < text_.size() && text_[i_] != '"') {
          if (text_[i_] == '\n') fail(line, col, "unterminated string");
          step();
        }
        if (i_ >= text_.size()) fail(line, col, "unterminated string");
        std::string s = text_.substr(start, i_ - start);
        step();
        out.push_back({Tok::String, s, line, col});
      } else if (std::string_view("{}()[]:,^=-+").find(c) != std::string_view::npos) {
        step();
        out.push_back({Tok::Punct, std::string(1, c), line, col});
      } else {
        fail(line, col, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Tok::End, "", line_, col_});
    return out;
  }

 private:
  void step() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip_space() {
    while (i_ < text_.size()) {
      if (text_[i_] == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') step();
      } else if (std::isspace(static_cast<unsigned char>(text_[i_])) || text_[i_] == ';') {
        step();
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& msg) const {
    throw LocatedError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  const std::string& text_;
  std::string source_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct Located {
  std::string text;  // number literal or formula source
  std::size_t line;
  std::size_t column;
  bool is_ref = false;  // identifier naming a theory sentence
};

enum class DeclKind { Bool, Unit, Other };

struct RawQuery {
  std::string name;
  Located formula;
  LogicFn logic_fn = LogicFn::direct();
  std::vector<std::pair<std::string, Located>> given;
  bool has_given = false;
};

struct RawCurve {
  std::string symbol;
  std::vector<std::pair<double, double>> knots;
  double exponent = 1.0;
  std::size_t line;
};

struct RawFile {
  std::vector<std::pair<SymbolDecl, DeclKind>> symbols;
  std::size_t symbols_line = 0;
  std::optional<std::pair<Semantics, std::size_t>> semantics;
  std::optional<std::pair<MeasureSpec, std::size_t>> measure;
  std::string belief_kind;
  std::size_t belief_line = 0;
  std::vector<std::pair<std::string, Located>> belief_entries;
  std::vector<Located> over;
  std::vector<RawCurve> curves;
  std::vector<std::pair<std::string, Located>> theory;
  std::vector<RawQuery> queries;
};

double to_real(const std::string& text) {
  if (text.find('/') != std::string::npos) return to_double(parse_rational(text));
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw InputError("malformed number '" + text + "'");
  return v;
}

class FileParser {
 public:
  FileParser(std::vector<Token> toks, std::string source) : t_(std::move(toks)), source_(std::move(source)) {}

  RawFile run() {
    RawFile f;
    while (peek().kind != Tok::End) {
      const Token& kw = expect_ident();
      if (kw.text == "symbols") {
        if (f.symbols_line) fail(kw, "duplicate 'symbols' section");
        f.symbols_line = kw.line;
        symbols(f);
      } else if (kw.text == "semantics") {
        if (f.semantics) fail(kw, "duplicate 'semantics' section");
        const Token& name = expect_ident();
        f.semantics.emplace(wrap(name, [&] { return semantics_from_name(name.text); }), kw.line);
      } else if (kw.text == "measure") {
        if (f.measure) fail(kw, "duplicate 'measure' section");
        f.measure.emplace(measure(), kw.line);
      } else if (kw.text == "belief") {
        if (!f.belief_kind.empty()) fail(kw, "duplicate 'belief' section");
        f.belief_line = kw.line;
        belief(f);
      } else if (kw.text == "theory") {
        theory(f);
      } else if (kw.text == "queries") {
        queries(f);
      } else {
        fail(kw, "unknown section '" + kw.text + "' (expected symbols, semantics, belief, measure, theory or queries)");
      }
    }
    return f;
  }

  MeasureSpec measure_only() {
    MeasureSpec m = measure();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after measure");
    return m;
  }

  LogicFn logic_fn_only() {
    auto l = logic_fn();
    if (!l) fail(peek(), "expected a logic function (direct, threshold(t), select{...} or select[lo, hi])");
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after logic function");
    return *l;
  }

 private:
  const Token& peek() const { return t_[pos_]; }
  const Token& next() { return t_[pos_ < t_.size() - 1 ? pos_++ : pos_]; }
  bool at_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }
  bool at_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw LocatedError(source_ + ":" + std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
  }
  template <class F>
  auto wrap(const Token& at, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const LocatedError&) {
      throw;
    } catch (const InputError& e) {
      fail(at, e.what());
    }
  }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(peek(), std::string("expected '") + c + "'" + found());
    next();
  }
  std::string found() const {
    return peek().kind == Tok::End ? " at end of input" : ", found '" + peek().text + "'";
  }
  const Token& expect_ident() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected a name" + found());
    return next();
  }
  bool skip_comma() {
    if (at_punct(',')) {
      next();
      return true;
    }
    return false;
  }

  /// Optional sign followed by a number literal.
  Located number() {
    const Token& start = peek();
    std::string sign;
    if (at_punct('-') || at_punct('+')) sign = next().text == "-" ? "-" : "";
    if (peek().kind != Tok::Number) fail(peek(), "expected a number" + found());
    return Located{sign + next().text, start.line, start.column};
  }
  double real() {
    Located n = number();
    try {
      return to_real(n.text);
    } catch (const InputError& e) {
      throw LocatedError(source_ + ":" + std::to_string(n.line) + ":" + std::to_string(n.column) + ": " + e.what());
    }
  }

  void symbols(RawFile& f) {
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& name = expect_ident();
      expect_punct(':');
      if (at_ident("bool")) {
        next();
        f.symbols.push_back({{name.text, Domain::boolean()}, DeclKind::Bool});
      } else if (at_ident("unit")) {
        next();
        f.symbols.push_back({{name.text, Domain::unit_interval()}, DeclKind::Unit});
      } else if (at_punct('{')) {
        next();
        std::vector<Rational> values;
        while (!at_punct('}')) {
          Located v = number();
          values.push_back(wrap(name, [&] { return parse_rational(v.text); }));
          if (!skip_comma()) break;
        }
        expect_punct('}');
        f.symbols.push_back({{name.text, wrap(name, [&] { return Domain::finite_set(values); })}, DeclKind::Other});
      } else if (at_punct('[')) {
        next();
        double lo = real();
        expect_punct(',');
        double hi = real();
        expect_punct(']');
        f.symbols.push_back({{name.text, wrap(name, [&] { return Domain::bounded_real(lo, hi); })}, DeclKind::Other});
      } else {
        fail(peek(), "expected a domain (bool, unit, {v1, v2, ...} or [lo, hi])" + found());
      }
      skip_comma();
    }
    expect_punct('}');
  }

  MeasureSpec measure() {
    const Token& kind = expect_ident();
    auto args = [&](std::map<std::string, double>& out, std::set<std::string> allowed) {
      if (!at_punct('(')) return;
      next();
      while (!at_punct(')')) {
        const Token& key = expect_ident();
        if (!allowed.count(key.text)) fail(key, "unknown measure argument '" + key.text + "'");
        expect_punct('=');
        out[key.text] = real();
        if (!skip_comma()) break;
      }
      expect_punct(')');
    };
    auto count = [&](double v, const char* what) -> std::uint64_t {
      if (!(v >= 0) || v != static_cast<double>(static_cast<std::uint64_t>(v)))
        fail(kind, std::string(what) + " must be a nonnegative integer");
      return static_cast<std::uint64_t>(v);
    };
    MeasureSpec m;
    if (kind.text == "counting") {
      m = Counting{};
    } else if (kind.text == "quadrature") {
      std::map<std::string, double> a;
      args(a, {"g"});
      m = BorelQuadrature{a.count("g") ? count(a["g"], "g") : 200};
    } else if (kind.text == "montecarlo") {
      std::map<std::string, double> a;
      args(a, {"n", "seed"});
      m = BorelMonteCarlo{a.count("n") ? count(a["n"], "n") : 100000, a.count("seed") ? count(a["seed"], "seed") : 42};
    } else if (kind.text == "mixed") {
      expect_punct('(');
      MeasureSpec inner = measure();
      expect_punct(')');
      if (auto* q = std::get_if<BorelQuadrature>(&inner))
        m = ProductMixed{*q};
      else if (auto* mc = std::get_if<BorelMonteCarlo>(&inner))
        m = ProductMixed{*mc};
      else
        fail(kind, "mixed(...) takes quadrature(...) or montecarlo(...)");
    } else {
      fail(kind, "unknown measure '" + kind.text + "' (expected counting, quadrature, montecarlo or mixed)");
    }
    wrap(kind, [&] {
      check_measure(m);
      return 0;
    });
    return m;
  }

  void entries(std::vector<std::pair<std::string, Located>>& out) {
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& name = expect_ident();
      expect_punct(':');
      out.emplace_back(name.text, number());
      skip_comma();
    }
    expect_punct('}');
  }

  Located formula_ref() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      next();
      return Located{t.text, t.line, t.column + 1};
    }
    if (t.kind == Tok::Ident) {
      next();
      return Located{t.text, t.line, t.column, true};
    }
    fail(t, "expected a quoted formula or a theory name" + found());
  }

  void belief(RawFile& f) {
    const Token& kind = expect_ident();
    f.belief_kind = kind.text;
    if (kind.text == "bernoulli" || kind.text == "dirac") {
      entries(f.belief_entries);
    } else if (kind.text == "loglinear") {
      entries(f.belief_entries);
      if (!at_ident("over")) fail(peek(), "expected 'over { ... }' after log-linear weights" + found());
      next();
      expect_punct('{');
      while (!at_punct('}')) {
        f.over.push_back(formula_ref());
        skip_comma();
      }
      expect_punct('}');
    } else if (kind.text == "fuzzyset") {
      expect_punct('{');
      while (!at_punct('}')) {
        const Token& name = expect_ident();
        expect_punct(':');
        RawCurve c{name.text, {}, 1.0, name.line};
        expect_punct('[');
        while (!at_punct(']')) {
          expect_punct('(');
          double x = real();
          expect_punct(',');
          double y = real();
          expect_punct(')');
          c.knots.emplace_back(x, y);
          if (!skip_comma()) break;
        }
        expect_punct(']');
        if (at_punct('^')) {
          next();
          c.exponent = real();
        }
        f.curves.push_back(std::move(c));
        skip_comma();
      }
      expect_punct('}');
    } else {
      fail(kind, "unknown belief '" + kind.text + "' (expected bernoulli, loglinear, dirac or fuzzyset)");
    }
  }

  void theory(RawFile& f) {
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& name = expect_ident();
      expect_punct(':');
      if (peek().kind != Tok::String) fail(peek(), "expected a quoted formula" + found());
      const Token& s = next();
      f.theory.emplace_back(name.text, Located{s.text, s.line, s.column + 1});
      skip_comma();
    }
    expect_punct('}');
  }

  std::optional<LogicFn> logic_fn() {
    if (at_ident("direct")) {
      next();
      return LogicFn::direct();
    }
    if (at_ident("threshold")) {
      const Token& at = next();
      expect_punct('(');
      double tau = real();
      expect_punct(')');
      return wrap(at, [&] { return LogicFn::threshold(tau); });
    }
    if (at_ident("select")) {
      const Token& at = next();
      if (at_punct('[')) {
        next();
        double lo = real();
        expect_punct(',');
        double hi = real();
        expect_punct(']');
        return wrap(at, [&] { return LogicFn::value_interval(lo, hi); });
      }
      expect_punct('{');
      std::vector<double> values;
      while (!at_punct('}')) {
        values.push_back(real());
        if (!skip_comma()) break;
      }
      expect_punct('}');
      return wrap(at, [&] { return LogicFn::value_set(values); });
    }
    return std::nullopt;
  }

  void queries(RawFile& f) {
    expect_punct('{');
    while (!at_punct('}')) {
      const Token& name = expect_ident();
      expect_punct(':');
      RawQuery q;
      q.name = name.text;
      q.formula = formula_ref();
      if (auto l = logic_fn()) q.logic_fn = *l;
      if (at_ident("given")) {
        next();
        q.has_given = true;
        entries(q.given);
      }
      f.queries.push_back(std::move(q));
      skip_comma();
    }
    expect_punct('}');
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
  std::string source_;
};

class Builder {
 public:
  Builder(RawFile raw, std::string source, const LoadOverrides& ov)
      : raw_(std::move(raw)), source_(std::move(source)), ov_(ov) {}

  ModelFile run() {
    if (!raw_.symbols_line) fail(1, "missing 'symbols' section");
    if (!raw_.semantics && !ov_.semantics) fail(1, "missing 'semantics' section");
    if (raw_.belief_kind.empty()) fail(1, "missing 'belief' section");

    Semantics sem = ov_.semantics ? *ov_.semantics : raw_.semantics->first;
    std::vector<SymbolDecl> decls;
    for (auto& [decl, kind] : raw_.symbols) {
      SymbolDecl d = decl;
      if (ov_.semantics && kind != DeclKind::Other) d.domain = sem.atom_domain();
      if (kind != DeclKind::Other && !(d.domain == sem.atom_domain()))
        fail(raw_.symbols_line, "atom '" + d.name + "' is declared " + (sem.is_boolean() ? "unit" : "bool") +
                                    " but semantics " + sem.name() + " needs " +
                                    (sem.is_boolean() ? "bool" : "unit") + " atoms");
      decls.push_back(std::move(d));
    }
    table_ = at(raw_.symbols_line, [&] { return SymbolTable::make(decls); });

    ModelFile out{Model{table_, sem, IndependentBernoulli(table_, {})}, Counting{}, {}, {}};
    MeasureSpec file_measure = raw_.measure ? raw_.measure->first : MeasureSpec{Counting{}};
    out.measure = ov_.measure ? ov_.measure(file_measure, *table_) : file_measure;

    std::set<std::string> names;
    for (const auto& [name, loc] : raw_.theory) {
      if (!names.insert(name).second) fail(loc.line, "duplicate sentence name '" + name + "'");
      out.theory.emplace_back(name, formula(loc, sem));
      theory_text_[name] = loc.text;
    }
    for (std::size_t i = 0; i < out.theory.size(); ++i) theory_index_[out.theory[i].first] = i;

    out.model.belief = belief(out, sem);

    std::set<std::string> qnames;
    for (const auto& rq : raw_.queries) {
      if (!qnames.insert(rq.name).second) fail(rq.formula.line, "duplicate query name '" + rq.name + "'");
      QuerySpec q{rq.name, resolve_text(rq.formula), resolve(rq.formula, out, sem), rq.logic_fn, std::nullopt};
      if (rq.has_given) q.evidence = assignment(rq.given, false, rq.formula.line);
      out.queries.push_back(std::move(q));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw LocatedError(source_ + ":" + std::to_string(line) + ": " + msg);
  }
  template <class F>
  auto at(std::size_t line, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const LocatedError&) {
      throw;
    } catch (const InputError& e) {
      fail(line, e.what());
    }
  }

  Formula formula(const Located& loc, const Semantics& sem) {
    try {
      Formula f = parse_formula(loc.text, *table_);
      // Surface domain mismatches (e.g. a unit atom under boolean semantics) here.
      Evaluator check(sem, f, *table_);
      return f;
    } catch (const ParseError& e) {
      std::size_t col = e.line() == 1 ? loc.column + e.column() - 1 : e.column();
      throw LocatedError(source_ + ":" + std::to_string(loc.line + e.line() - 1) + ":" + std::to_string(col) + ": " +
                         e.detail());
    } catch (const InputError& e) {
      fail(loc.line, e.what());
    }
  }

  std::string resolve_text(const Located& loc) const {
    if (!loc.is_ref) return loc.text;
    auto it = theory_text_.find(loc.text);
    return it == theory_text_.end() ? loc.text : it->second;
  }

  Formula resolve(const Located& loc, const ModelFile& out, const Semantics& sem) {
    if (!loc.is_ref) return formula(loc, sem);
    auto it = theory_index_.find(loc.text);
    if (it == theory_index_.end()) fail(loc.line, "unknown theory sentence '" + loc.text + "'");
    return out.theory[it->second].second;
  }

  void set_value(Interpretation& w, std::size_t index, const Located& v) {
    const Domain& d = (*table_)[index].domain;
    if (d.is_finite() && d.kind() != DomainKind::Boolean)
      w.set(index, parse_rational(v.text));
    else
      w.set(index, to_real(v.text));
  }

  Interpretation assignment(const std::vector<std::pair<std::string, Located>>& entries, bool total,
                            std::size_t line) {
    Interpretation w(table_);
    for (const auto& [name, v] : entries) {
      at(v.line, [&] {
        std::size_t i = table_->index_of(name);
        if (w.assigned(i)) throw InputError("symbol '" + name + "' assigned twice");
        set_value(w, i, v);
        return 0;
      });
    }
    if (total && !w.total())
      for (std::size_t i = 0; i < table_->size(); ++i)
        if (!w.assigned(i)) fail(line, "dirac belief is missing a value for '" + (*table_)[i].name + "'");
    return w;
  }

  Belief belief(const ModelFile& out, const Semantics& sem) {
    const std::size_t line = raw_.belief_line;
    const std::string& kind = raw_.belief_kind;
    if (kind == "bernoulli") {
      std::vector<std::pair<std::size_t, double>> probs;
      for (const auto& [name, v] : raw_.belief_entries)
        probs.emplace_back(at(v.line, [&] { return table_->index_of(name); }), at(v.line, [&] { return to_real(v.text); }));
      return at(line, [&] { return IndependentBernoulli(table_, probs); });
    }
    if (kind == "dirac") {
      Interpretation w = assignment(raw_.belief_entries, true, line);
      return DiracPoint(std::move(w));
    }
    if (kind == "loglinear") {
      if (raw_.over.size() != raw_.belief_entries.size())
        fail(line, "log-linear belief has " + std::to_string(raw_.belief_entries.size()) + " weights for " +
                       std::to_string(raw_.over.size()) + " sentences");
      if (raw_.over.empty()) fail(line, "log-linear belief needs at least one sentence");
      std::vector<Formula> sentences;
      std::vector<double> weights;
      for (std::size_t i = 0; i < raw_.over.size(); ++i) {
        sentences.push_back(resolve(raw_.over[i], out, sem));
        const auto& v = raw_.belief_entries[i].second;
        weights.push_back(at(v.line, [&] { return to_real(v.text); }));
      }
      return at(line, [&] { return LogLinear(table_, Theory(sentences), weights, sem, out.measure); });
    }
    std::vector<MembershipCurve> curves;
    for (const auto& c : raw_.curves)
      curves.push_back(MembershipCurve{at(c.line, [&] { return table_->index_of(c.symbol); }), c.knots, c.exponent});
    return at(line, [&] { return FuzzyMembership(table_, curves); });
  }

  RawFile raw_;
  std::string source_;
  const LoadOverrides& ov_;
  SymbolTablePtr table_;
  std::map<std::string, std::string> theory_text_;
  std::map<std::string, std::size_t> theory_index_;
};

}  // namespace

std::optional<QuerySpec> ModelFile::find_query(const std::string& name) const {
  for (const auto& q : queries)
    if (q.name == name) return q;
  for (const auto& [n, f] : theory)
    if (n == name) return QuerySpec{n, to_string(f, *model.symbols), f, LogicFn::direct(), std::nullopt};
  return std::nullopt;
}

ModelFile parse_model(const std::string& text, const std::string& source, const LoadOverrides& overrides) {
  auto tokens = Lexer(text, source).run();
  RawFile raw = FileParser(std::move(tokens), source).run();
  return Builder(std::move(raw), source, overrides).run();
}

ModelFile load_model(const std::string& path, const LoadOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open model file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path, overrides);
}

LogicFn parse_logic_fn(const std::string& text) {
  auto tokens = Lexer(text, "<logic>").run();
  return FileParser(std::move(tokens), "<logic>").logic_fn_only();
}

MeasureSpec parse_measure(const std::string& text) {
  auto tokens = Lexer(text, "<measure>").run();
  return FileParser(std::move(tokens), "<measure>").measure_only();
}

}  // namespace nesy

#include "nesy/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "nesy/error.hpp"

namespace nesy {
namespace {

enum class Tok { Ident, Number, Not, And, Or, Arrow, Iff, LParen, RParen, Lt, Le, Eq, Ge, Gt, Plus, Minus, Star, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Not: return "'!'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Eq: return "'='";
    case Tok::Ge: return "'>='";
    case Tok::Gt: return "'>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& table) : text_(text), table_(table) { tokenize(); }

  Formula run() {
    Formula f = parse_iff();
    if (peek().kind != Tok::End) fail(std::string("unexpected ") + describe(peek().kind), peek().offset);
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, offset, line, col);
  }

  void tokenize() {
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t len) {
      tokens_.push_back(Token{k, text_.substr(i, len), i});
      i += len;
    };
    while (i < text_.size()) {
      char ch = text_[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (ch == '#') {
        while (i < text_.size() && text_[i] != '\n') ++i;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t j = i;
        while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        push(Tok::Ident, j - i);
      } else if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i + 1 < text_.size() &&
                                                                   std::isdigit(static_cast<unsigned char>(text_[i + 1])))) {
        std::size_t j = i;
        auto digits = [&] {
          while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        };
        digits();
        if (j < text_.size() && (text_[j] == '.' || text_[j] == '/')) {
          ++j;
          std::size_t before = j;
          digits();
          if (j == before) fail("malformed number", i);
        }
        push(Tok::Number, j - i);
      } else if (text_.substr(i, 3) == "<->") {
        push(Tok::Iff, 3);
      } else if (text_.substr(i, 2) == "->") {
        push(Tok::Arrow, 2);
      } else if (text_.substr(i, 2) == "<=") {
        push(Tok::Le, 2);
      } else if (text_.substr(i, 2) == ">=") {
        push(Tok::Ge, 2);
      } else {
        Tok k;
        switch (ch) {
          case '!': k = Tok::Not; break;
          case '&': k = Tok::And; break;
          case '|': k = Tok::Or; break;
          case '(': k = Tok::LParen; break;
          case ')': k = Tok::RParen; break;
          case '<': k = Tok::Lt; break;
          case '>': k = Tok::Gt; break;
          case '=': k = Tok::Eq; break;
          case '+': k = Tok::Plus; break;
          case '-': k = Tok::Minus; break;
          case '*': k = Tok::Star; break;
          default: fail(std::string("unexpected character '") + ch + "'", i);
        }
        push(k, 1);
      }
    }
    tokens_.push_back(Token{Tok::End, {}, text_.size()});
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
  }
  const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    take();
    return true;
  }
  void expect(Tok k) {
    if (!accept(k)) fail(std::string("expected ") + describe(k) + ", found " + describe(peek().kind), peek().offset);
  }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (accept(Tok::Iff)) f = equivalence(f, parse_implies());
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (accept(Tok::Arrow)) return implication(f, parse_implies());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(Tok::Or)) f = disjunction(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept(Tok::And)) f = conjunction(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept(Tok::Not)) return negation(parse_unary());
    return parse_atom();
  }

  static bool starts_arithmetic(Tok k) {
    switch (k) {
      case Tok::Lt: case Tok::Le: case Tok::Eq: case Tok::Ge: case Tok::Gt:
      case Tok::Plus: case Tok::Minus: case Tok::Star:
        return true;
      default:
        return false;
    }
  }

  Formula parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        take();
        Formula f = parse_iff();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Number:
      case Tok::Plus:
      case Tok::Minus:
        return parse_lincmp();
      case Tok::Ident: {
        if (starts_arithmetic(peek(1).kind)) return parse_lincmp();
        take();
        if (t.text == "true") return constant(true);
        if (t.text == "false") return constant(false);
        std::size_t index = resolve(t);
        const auto& sym = table_[index];
        if (!sym.domain.is_atom_domain())
          fail("symbol '" + sym.name + "' is numeric and cannot be used as an atom", t.offset);
        return atom(index);
      }
      default:
        fail(std::string("expected a formula, found ") + describe(t.kind), t.offset);
    }
  }

  std::size_t resolve(const Token& t) const {
    auto index = table_.find(t.text);
    if (!index) fail("undeclared symbol '" + std::string(t.text) + "'", t.offset);
    return *index;
  }

  Formula parse_lincmp() {
    LinearExpr lhs = parse_term();
    const Token& op = take();
    Comparator cmp;
    switch (op.kind) {
      case Tok::Lt: cmp = Comparator::Less; break;
      case Tok::Le: cmp = Comparator::LessEq; break;
      case Tok::Eq: cmp = Comparator::Equal; break;
      case Tok::Ge: cmp = Comparator::GreaterEq; break;
      case Tok::Gt: cmp = Comparator::Greater; break;
      default: fail(std::string("expected a comparison operator, found ") + describe(op.kind), op.offset);
    }
    LinearExpr rhs = parse_term();
    lhs -= rhs;
    return compare(std::move(lhs), cmp);
  }

  LinearExpr parse_term() {
    LinearExpr e;
    bool negative = false;
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) negative = take().kind == Tok::Minus;
    parse_addend(e, negative);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      negative = take().kind == Tok::Minus;
      parse_addend(e, negative);
    }
    return e;
  }

  void parse_addend(LinearExpr& e, bool negative) {
    const Token& t = take();
    if (t.kind == Tok::Number) {
      Rational r;
      try {
        r = parse_rational(t.text);
      } catch (const InputError& err) {
        fail(err.what(), t.offset);
      }
      if (negative) r = -r;
      if (accept(Tok::Star)) {
        const Token& id = take();
        if (id.kind != Tok::Ident) fail(std::string("expected identifier after '*', found ") + describe(id.kind), id.offset);
        e.add(r, numeric_symbol(id));
      } else {
        e.add_constant(r);
      }
    } else if (t.kind == Tok::Ident) {
      e.add(Rational(negative ? -1 : 1), numeric_symbol(t));
    } else {
      fail(std::string("expected a number or identifier, found ") + describe(t.kind), t.offset);
    }
  }

  std::size_t numeric_symbol(const Token& t) const {
    if (t.text == "true" || t.text == "false") fail("boolean constant in arithmetic term", t.offset);
    std::size_t index = resolve(t);
    const auto& sym = table_[index];
    if (sym.domain.is_atom_domain())
      fail("symbol '" + sym.name + "' is an atom and cannot appear in a linear comparison", t.offset);
    return index;
  }

  std::string_view text_;
  const SymbolTable& table_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const SymbolTable& table) { return Parser(text, table).run(); }

}  // namespace nesy

#pragma once

// Concrete syntax: lexer, recursive-descent parser producing a named tree,
// desugaring into the nameless core, and one-call compile helpers.
//
// Desugaring keeps the core in its restricted form: wherever the core wants a
// value but the source has an arbitrary term, the term is let-bound first,
// left to right.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ndlam/print.hpp"
#include "ndlam/syntax.hpp"
#include "ndlam/typing.hpp"

namespace ndlam {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset) + expected_suffix(expected)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;

  static std::string expected_suffix(const std::vector<std::string>& exp) {
    if (exp.empty()) return "";
    std::string s = " (expected ";
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (i) s += ", ";
      s += exp[i];
    }
    return s + ")";
  }
};

/// Scope, annotation and shape errors found while desugaring.
class DesugarError : public std::runtime_error {
 public:
  DesugarError(std::size_t offset, std::string kind, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset), kind_(std::move(kind)) {}

  std::size_t offset() const { return offset_; }
  /// "scope", "annotation-required", "case-arms" or "context".
  const std::string& kind() const { return kind_; }

 private:
  std::size_t offset_;
  std::string kind_;
};

// ---------------------------------------------------------------------------
// Named source trees

struct SourceType;
using SourceTypePtr = std::shared_ptr<const SourceType>;

struct SourceType {
  enum class Kind { Var, Unit, Product, Arrow, Recursive, Forall, Nat, Bool };
  Kind kind;
  std::size_t offset = 0;
  std::string name;  // Var, and the bound name of Recursive/Forall
  std::vector<SourceTypePtr> children;
};

struct SourceTerm;
using SourceTermPtr = std::shared_ptr<const SourceTerm>;

struct SourceTerm {
  enum class Kind {
    Var, Unit, Pair, Lambda, Inject, TypeLambda, Choice, Project, Apply, TypeApply,
    Case, Let, Or, If, Ifz, Numeral, True, False, Fix, Omega, Hole,
  };
  Kind kind;
  std::size_t offset = 0;
  std::string name;            // Var, Lambda/Let/TypeLambda binder
  std::uint64_t number = 0;    // Inject arm, Project index, Numeral value
  std::vector<SourceTermPtr> subs;
  std::vector<std::string> binders;    // Case: per-branch binder
  std::vector<std::uint64_t> arms;     // Case: per-branch arm index
  SourceTypePtr type;          // Lambda/Let annotation, Inject annotation, TypeApply/Omega argument
};

// ---------------------------------------------------------------------------
// Lexer

namespace surface_detail {

struct Token {
  enum class Kind { Ident, TyVar, Number, Inject, Keyword, Symbol, End };
  Kind kind;
  std::string text;
  std::size_t offset = 0;
  std::uint64_t number = 0;
};

inline bool is_keyword(std::string_view s) {
  static const char* const words[] = {"fun", "case", "of",  "in",    "Lam",   "let",   "or",    "if",
                                      "then", "else", "ifz", "true", "false", "fix",   "omega", "proj1",
                                      "proj2", "unit", "mu",  "all",  "nat",   "bool"};
  return std::any_of(std::begin(words), std::end(words), [&](const char* w) { return s == w; });
}

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

constexpr std::uint64_t kMaxNumeral = 1'000'000;

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string text, std::size_t at, std::uint64_t n = 0) {
    out.push_back(Token{k, std::move(text), at, n});
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) ++i;
      std::string word(src.substr(start, i - start));
      if (word.size() > 2 && word.compare(0, 2, "in") == 0 &&
          std::all_of(word.begin() + 2, word.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        push(Token::Kind::Inject, word, start, std::stoull(word.substr(2)));
      } else if (is_keyword(word)) {
        push(Token::Kind::Keyword, word, start);
      } else {
        push(Token::Kind::Ident, word, start);
      }
      continue;
    }
    if (c == '\'') {
      ++i;
      if (i >= src.size() || !ident_start(src[i])) throw ParseError(start, {"type variable name"}, "bad type variable");
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      push(Token::Kind::TyVar, std::string(src.substr(start, i - start)), start);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      const std::string digits(src.substr(start, i - start));
      if (digits.size() > 7 || std::stoull(digits) > kMaxNumeral)
        throw ParseError(start, {}, "numeral too large (limit " + std::to_string(kMaxNumeral) + ")");
      push(Token::Kind::Number, digits, start, std::stoull(digits));
      continue;
    }
    // UTF-8 spellings of binders.
    if (src.substr(i, 3) == "\xE2\x88\x80") {
      push(Token::Kind::Keyword, "all", start);
      i += 3;
      continue;
    }
    if (src.substr(i, 2) == "\xCE\xBC") {
      push(Token::Kind::Keyword, "mu", start);
      i += 2;
      continue;
    }
    if (src.substr(i, 2) == "\xCE\x9B") {
      push(Token::Kind::Keyword, "Lam", start);
      i += 2;
      continue;
    }
    if (src.substr(i, 2) == "=>" || src.substr(i, 2) == "->") {
      push(Token::Kind::Symbol, std::string(src.substr(i, 2)), start);
      i += 2;
      continue;
    }
    static constexpr std::string_view singles = "(),[]|=?.*+:";
    if (singles.find(c) != std::string_view::npos) {
      push(Token::Kind::Symbol, std::string(1, c), start);
      ++i;
      continue;
    }
    throw ParseError(start, {}, std::string("unexpected character '") + c + "'");
  }
  push(Token::Kind::End, "end of input", src.size());
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, bool allow_hole) : toks_(lex(src)), allow_hole_(allow_hole) {}

  SourceTermPtr whole_term() {
    auto t = term();
    expect_end();
    return t;
  }

  SourceTypePtr whole_type() {
    auto t = type();
    expect_end();
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool allow_hole_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Symbol && peek(k).text == s;
  }
  bool is_kw(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Keyword && peek(k).text == s;
  }

  [[noreturn]] void error(std::vector<std::string> expected) const {
    throw ParseError(peek().offset, std::move(expected), "unexpected '" + peek().text + "'");
  }

  void expect_end() const {
    if (peek().kind != Token::Kind::End) error({"end of input"});
  }
  void sym(const char* s) {
    if (!is_sym(s)) error({std::string("'") + s + "'"});
    next();
  }
  void kw(const char* s) {
    if (!is_kw(s)) error({std::string("'") + s + "'"});
    next();
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) error({"identifier"});
    return next().text;
  }
  std::string tyvar() {
    if (peek().kind != Token::Kind::TyVar) error({"type variable"});
    return next().text;
  }

  static SourceTypePtr mk_type(SourceType::Kind k, std::size_t at, std::string name = {},
                               std::vector<SourceTypePtr> kids = {}) {
    auto t = std::make_shared<SourceType>();
    t->kind = k;
    t->offset = at;
    t->name = std::move(name);
    t->children = std::move(kids);
    return t;
  }

  // Type := mu 'a . Arm (+ Arm)* | all 'a . Type | Arrow
  SourceTypePtr type() {
    const std::size_t at = peek().offset;
    if (is_kw("mu")) {
      next();
      std::string name = tyvar();
      sym(".");
      std::vector<SourceTypePtr> arms{type_no_sum()};
      while (is_sym("+")) {
        next();
        arms.push_back(type_no_sum());
      }
      return mk_type(SourceType::Kind::Recursive, at, std::move(name), std::move(arms));
    }
    if (is_kw("all")) {
      next();
      std::string name = tyvar();
      sym(".");
      return mk_type(SourceType::Kind::Forall, at, std::move(name), {type()});
    }
    return arrow_type();
  }

  SourceTypePtr type_no_sum() {
    if (is_kw("mu") || is_kw("all")) return type();
    return arrow_type();
  }

  SourceTypePtr arrow_type() {
    const std::size_t at = peek().offset;
    auto lhs = product_type();
    if (is_sym("->")) {
      next();
      auto rhs = (is_kw("mu") || is_kw("all")) ? type() : arrow_type();
      return mk_type(SourceType::Kind::Arrow, at, {}, {lhs, rhs});
    }
    return lhs;
  }

  SourceTypePtr product_type() {
    const std::size_t at = peek().offset;
    auto lhs = atom_type();
    while (is_sym("*")) {
      next();
      lhs = mk_type(SourceType::Kind::Product, at, {}, {lhs, atom_type()});
    }
    return lhs;
  }

  SourceTypePtr atom_type() {
    const Token& t = peek();
    const std::size_t at = t.offset;
    if (t.kind == Token::Kind::TyVar) return mk_type(SourceType::Kind::Var, at, next().text);
    if (is_kw("unit")) return next(), mk_type(SourceType::Kind::Unit, at);
    if (t.kind == Token::Kind::Number && t.number == 1) return next(), mk_type(SourceType::Kind::Unit, at);
    if (is_kw("nat")) return next(), mk_type(SourceType::Kind::Nat, at);
    if (is_kw("bool")) return next(), mk_type(SourceType::Kind::Bool, at);
    if (is_sym("(")) {
      next();
      auto inner = type();
      sym(")");
      return inner;
    }
    error({"type"});
  }

  static std::shared_ptr<SourceTerm> mk(SourceTerm::Kind k, std::size_t at, std::vector<SourceTermPtr> subs = {}) {
    auto t = std::make_shared<SourceTerm>();
    t->kind = k;
    t->offset = at;
    t->subs = std::move(subs);
    return t;
  }

  static bool binder_start(const Token& t) {
    if (t.kind != Token::Kind::Keyword) return false;
    return t.text == "fun" || t.text == "Lam" || t.text == "let" || t.text == "case" || t.text == "if" ||
           t.text == "ifz";
  }

  bool atom_start() const {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Ident:
      case Token::Kind::Number:
      case Token::Kind::Inject:
        return true;
      case Token::Kind::Keyword:
        return t.text == "true" || t.text == "false" || t.text == "fix" || t.text == "omega" ||
               t.text == "proj1" || t.text == "proj2";
      case Token::Kind::Symbol:
        return t.text == "(" || t.text == "?" || (t.text == "[" && is_sym("]", 1));
      default:
        return false;
    }
  }

  // Term := Operand (or Operand)*
  SourceTermPtr term() {
    auto lhs = operand();
    while (is_kw("or")) {
      const std::size_t at = peek().offset;
      next();
      lhs = mk(SourceTerm::Kind::Or, at, {lhs, operand()});
    }
    return lhs;
  }

  SourceTermPtr operand() { return binder_start(peek()) ? binder() : application(); }

  SourceTermPtr binder() {
    const std::size_t at = peek().offset;
    const std::string word = next().text;
    if (word == "fun") {
      struct Param {
        std::string name;
        SourceTypePtr type;
        std::size_t at;
      };
      std::vector<Param> params;
      while (!is_sym("=>")) {
        const std::size_t pat = peek().offset;
        if (is_sym("(")) {
          next();
          std::string name = ident();
          sym(":");
          auto t = type();
          sym(")");
          params.push_back({std::move(name), std::move(t), pat});
        } else if (peek().kind == Token::Kind::Ident) {
          params.push_back({next().text, nullptr, pat});
        } else {
          error({"parameter", "'=>'"});
        }
      }
      if (params.empty()) error({"parameter"});
      sym("=>");
      auto body = term();
      for (auto it = params.rbegin(); it != params.rend(); ++it) {
        auto lam = mk(SourceTerm::Kind::Lambda, it->at, {body});
        lam->name = it->name;
        lam->type = it->type;
        body = lam;
      }
      return body;
    }
    if (word == "Lam") {
      std::vector<std::pair<std::string, std::size_t>> names;
      while (peek().kind == Token::Kind::TyVar) {
        const std::size_t nat = peek().offset;
        names.emplace_back(next().text, nat);
      }
      if (names.empty()) error({"type variable"});
      sym("=>");
      auto body = term();
      for (auto it = names.rbegin(); it != names.rend(); ++it) {
        auto tl = mk(SourceTerm::Kind::TypeLambda, it->second, {body});
        tl->name = it->first;
        body = tl;
      }
      return body;
    }
    if (word == "let") {
      std::string name;
      SourceTypePtr ann;
      if (is_sym("(")) {
        next();
        name = ident();
        sym(":");
        ann = type();
        sym(")");
      } else {
        name = ident();
        if (is_sym(":")) {
          next();
          ann = type();
        }
      }
      sym("=");
      auto bound = term();
      kw("in");
      auto body = term();
      auto let = mk(SourceTerm::Kind::Let, at, {bound, body});
      let->name = std::move(name);
      let->type = std::move(ann);
      return let;
    }
    if (word == "case") {
      auto scrutinee = term();
      kw("of");
      if (is_sym("|")) next();
      auto node = std::make_shared<SourceTerm>();
      node->kind = SourceTerm::Kind::Case;
      node->offset = at;
      node->subs.push_back(scrutinee);
      while (true) {
        if (peek().kind != Token::Kind::Inject) error({"injection pattern"});
        node->arms.push_back(next().number);
        node->binders.push_back(ident());
        sym("=>");
        node->subs.push_back(term());
        if (!is_sym("|")) break;
        next();
      }
      return node;
    }
    // if / ifz
    auto cond = term();
    kw("then");
    auto a = term();
    kw("else");
    auto b = term();
    return mk(word == "if" ? SourceTerm::Kind::If : SourceTerm::Kind::Ifz, at, {cond, a, b});
  }

  // Application := Prefix (Prefix | [Type])*
  SourceTermPtr application() {
    auto head = prefix();
    while (true) {
      if (is_sym("[") && !is_sym("]", 1)) {
        const std::size_t at = peek().offset;
        next();
        auto t = type();
        sym("]");
        auto ta = mk(SourceTerm::Kind::TypeApply, at, {head});
        ta->type = t;
        head = ta;
      } else if (atom_start()) {
        const std::size_t at = peek().offset;
        head = mk(SourceTerm::Kind::Apply, at, {head, prefix()});
      } else {
        return head;
      }
    }
  }

  SourceTermPtr prefix() {
    const Token& t = peek();
    const std::size_t at = t.offset;
    if (is_kw("proj1") || is_kw("proj2")) {
      const std::uint64_t which = next().text.back() - '0';
      auto p = mk(SourceTerm::Kind::Project, at, {atom()});
      p->number = which;
      return p;
    }
    if (t.kind == Token::Kind::Inject) {
      const std::uint64_t arm = next().number;
      if (arm < 1) throw ParseError(at, {"in1, in2, ..."}, "injection arms are numbered from 1");
      SourceTypePtr ann;
      if (is_sym("[") && !is_sym("]", 1)) {
        next();
        ann = type();
        sym("]");
      }
      auto in = mk(SourceTerm::Kind::Inject, at, {atom()});
      in->number = arm;
      in->type = ann;
      return in;
    }
    return atom();
  }

  SourceTermPtr atom() {
    const Token& t = peek();
    const std::size_t at = t.offset;
    switch (t.kind) {
      case Token::Kind::Ident: {
        auto v = mk(SourceTerm::Kind::Var, at);
        v->name = next().text;
        return v;
      }
      case Token::Kind::Number: {
        auto n = mk(SourceTerm::Kind::Numeral, at);
        n->number = next().number;
        return n;
      }
      case Token::Kind::Inject:
        return prefix();
      default:
        break;
    }
    if (is_kw("proj1") || is_kw("proj2")) return prefix();
    if (is_kw("true")) return next(), mk(SourceTerm::Kind::True, at);
    if (is_kw("false")) return next(), mk(SourceTerm::Kind::False, at);
    if (is_kw("fix")) return next(), mk(SourceTerm::Kind::Fix, at);
    if (is_kw("omega")) {
      next();
      sym("[");
      auto ty = type();
      sym("]");
      auto o = mk(SourceTerm::Kind::Omega, at);
      o->type = ty;
      return o;
    }
    if (is_sym("?")) return next(), mk(SourceTerm::Kind::Choice, at);
    if (is_sym("[") && is_sym("]", 1)) {
      if (!allow_hole_) error({"term"});
      next();
      next();
      return mk(SourceTerm::Kind::Hole, at);
    }
    if (is_sym("(")) {
      next();
      if (is_sym(")")) return next(), mk(SourceTerm::Kind::Unit, at);
      auto first = term();
      if (is_sym(",")) {
        next();
        auto second = term();
        sym(")");
        return mk(SourceTerm::Kind::Pair, at, {first, second});
      }
      sym(")");
      return first;
    }
    error({"term"});
  }
};

}  // namespace surface_detail

inline SourceTermPtr parse_term(std::string_view text) { return surface_detail::Parser(text, false).whole_term(); }
inline SourceTypePtr parse_type(std::string_view text) { return surface_detail::Parser(text, false).whole_type(); }
/// Like parse_term but accepts one `[]` hole.
inline SourceTermPtr parse_context_term(std::string_view text) {
  return surface_detail::Parser(text, true).whole_term();
}

// ---------------------------------------------------------------------------
// Desugaring

/// Closed library terms used by `fix` and `omega[T]`.
TermPtr library_fix();
TermPtr library_omega();

namespace surface_detail {

inline std::optional<std::uint32_t> find_name(const std::vector<std::string>& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == name) return static_cast<std::uint32_t>(env.size() - 1 - i);
  return std::nullopt;
}

class Desugarer {
 public:
  explicit Desugarer(std::vector<std::string> env = {}) : env_(std::move(env)) {}

  TypePtr type(const SourceTypePtr& t) {
    using K = SourceType::Kind;
    switch (t->kind) {
      case K::Var: {
        auto i = find_name(tenv_, t->name);
        if (!i) throw DesugarError(t->offset, "scope", "unbound type variable " + t->name);
        return ty::var(*i);
      }
      case K::Unit:
        return ty::unit();
      case K::Nat:
        return ty::nat();
      case K::Bool:
        return ty::boolean();
      case K::Product:
        return ty::product(type(t->children[0]), type(t->children[1]));
      case K::Arrow:
        return ty::arrow(type(t->children[0]), type(t->children[1]));
      case K::Recursive: {
        tenv_.push_back(t->name);
        std::vector<TypePtr> arms;
        for (const auto& c : t->children) arms.push_back(type(c));
        tenv_.pop_back();
        return ty::rec(std::move(arms));
      }
      case K::Forall: {
        tenv_.push_back(t->name);
        auto body = type(t->children[0]);
        tenv_.pop_back();
        return ty::forall(body);
      }
    }
    throw InternalFault("unknown source type kind");
  }

  TermPtr term(const SourceTermPtr& s) {
    using K = SourceTerm::Kind;
    switch (s->kind) {
      case K::Var: {
        auto i = find_name(env_, s->name);
        if (!i) throw DesugarError(s->offset, "scope", "unbound variable " + s->name);
        return tm::var(*i);
      }
      case K::Hole: {
        auto i = find_name(env_, hole_name());
        if (!i) throw DesugarError(s->offset, "context", "hole outside a context");
        return tm::var(*i);
      }
      case K::Unit:
        return tm::unit();
      case K::Choice:
        return tm::choice();
      case K::Numeral:
        return tm::numeral(s->number);
      case K::True:
        return tm::true_value();
      case K::False:
        return tm::false_value();
      case K::Fix:
        return library_fix();
      case K::Omega:
        return tm::tapp(library_omega(), type(s->type));
      case K::Pair:
        return with_values({term(s->subs[0]), term(s->subs[1])},
                           [](std::vector<TermPtr> v) { return tm::pair(v[0], v[1]); });
      case K::Lambda: {
        TypePtr ann = s->type ? type(s->type) : nullptr;
        return tm::lam(ann, under(s->name, s->subs[0]));
      }
      case K::TypeLambda: {
        tenv_.push_back(s->name);
        auto body = term(s->subs[0]);
        tenv_.pop_back();
        return tm::tlam(body);
      }
      case K::Inject: {
        if (!s->type)
          throw DesugarError(s->offset, "annotation-required",
                             "injection in" + std::to_string(s->number) + " needs a type annotation in[T]");
        TypePtr ann = type(s->type);
        const auto arm = static_cast<std::uint32_t>(s->number);
        return with_values({term(s->subs[0])}, [&](std::vector<TermPtr> v) { return tm::inj(arm, v[0], ann); });
      }
      case K::Project: {
        const auto which = static_cast<std::uint32_t>(s->number);
        return with_values({term(s->subs[0])}, [&](std::vector<TermPtr> v) { return tm::proj(which, v[0]); });
      }
      case K::Apply: {
        TermPtr head = term(s->subs[0]);
        TermPtr arg = term(s->subs[1]);
        if (is_value(head)) return tm::app(head, arg);
        return tm::let(head, tm::app(tm::var(0), shift_terms(arg, 1)));
      }
      case K::TypeApply: {
        TypePtr at = type(s->type);
        return with_values({term(s->subs[0])}, [&](std::vector<TermPtr> v) { return tm::tapp(v[0], at); });
      }
      case K::Case: {
        TermPtr scrutinee = term(s->subs[0]);
        const std::size_t n = s->arms.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s->arms[a] < s->arms[b]; });
        for (std::size_t k = 0; k < n; ++k)
          if (s->arms[order[k]] != k + 1)
            throw DesugarError(s->offset, "case-arms", "case arms must be in1..in" + std::to_string(n) + ", each once");
        std::vector<TermPtr> branches;
        for (std::size_t k = 0; k < n; ++k) branches.push_back(under(s->binders[order[k]], s->subs[order[k] + 1]));
        return with_values({scrutinee}, [&](std::vector<TermPtr> v) {
          std::vector<TermPtr> shifted;
          // Branches were built in the outer scope; step them under any let introduced here.
          const std::int64_t extra = is_value(scrutinee) ? 0 : 1;
          for (const auto& b : branches) shifted.push_back(shift_terms(b, extra, 1));
          return tm::case_of(v[0], std::move(shifted));
        });
      }
      case K::Let: {
        TermPtr bound = term(s->subs[0]);
        TypePtr ann = s->type ? type(s->type) : nullptr;
        return tm::let(bound, under(s->name, s->subs[1]), ann);
      }
      case K::Or: {
        // let x = ? in case x of in1 y => e1 | in2 y => e2, with x and y fresh
        TermPtr a = shift_terms(term(s->subs[0]), 2);
        TermPtr b = shift_terms(term(s->subs[1]), 2);
        return tm::let(tm::choice(), tm::case_of(tm::var(0), {a, b}));
      }
      case K::If:
      case K::Ifz: {
        // let y = p in case y of in1 x => a | in2 x => b
        TermPtr p = term(s->subs[0]);
        TermPtr a = shift_terms(term(s->subs[1]), 2);
        TermPtr b = shift_terms(term(s->subs[2]), 2);
        return tm::let(p, tm::case_of(tm::var(0), {a, b}));
      }
    }
    throw InternalFault("unknown source term kind");
  }

  static const std::string& hole_name() {
    static const std::string h = "[]";
    return h;
  }

 private:
  std::vector<std::string> env_;
  std::vector<std::string> tenv_;

  TermPtr under(const std::string& name, const SourceTermPtr& body) {
    env_.push_back(name);
    TermPtr out = term(body);
    env_.pop_back();
    return out;
  }

  /// Let-binds the non-values among `parts` left to right and passes the
  /// resulting values (valid under all new binders) to `build`.
  static TermPtr with_values(std::vector<TermPtr> parts, const std::function<TermPtr(std::vector<TermPtr>)>& build) {
    std::vector<TermPtr> bound;
    std::vector<std::size_t> slot(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!is_value(parts[i])) {
        slot[i] = bound.size();
        bound.push_back(shift_terms(parts[i], static_cast<std::int64_t>(bound.size())));
      }
    }
    const auto k = static_cast<std::uint32_t>(bound.size());
    std::vector<TermPtr> args;
    for (std::size_t i = 0; i < parts.size(); ++i)
      args.push_back(is_value(parts[i]) ? shift_terms(parts[i], k) : tm::var(static_cast<std::uint32_t>(k - 1 - slot[i])));
    TermPtr body = build(std::move(args));
    for (std::size_t m = bound.size(); m-- > 0;) body = tm::let(bound[m], body);
    return body;
  }
};

}  // namespace surface_detail

inline TermPtr desugar(const SourceTermPtr& s) { return surface_detail::Desugarer().term(s); }
inline TypePtr desugar(const SourceTypePtr& t) { return surface_detail::Desugarer().type(t); }

/// Parses, desugars and elaborates a closed term.
inline Elaborated compile(std::string_view text) { return elaborate(desugar(parse_term(text))); }

inline TypePtr compile_type(std::string_view text) { return desugar(parse_type(text)); }

/// Splits a desugared term with one free variable (the hole) into E ::= [] | v E.
inline EvalContext decompose_context(const TermPtr& t) {
  EvalContext ctx;
  std::vector<TermPtr> outer_first;
  TermPtr cur = t;
  while (!(cur->kind == TermKind::Var && cur->index == 0)) {
    if (cur->kind != TermKind::Apply || cur->subs[0]->free_terms != 0)
      throw DesugarError(0, "context", "not an evaluation context: the hole must sit in argument position of closed values");
    outer_first.push_back(cur->subs[0]);
    cur = cur->subs[1];
  }
  ctx.frames.assign(outer_first.rbegin(), outer_first.rend());
  return ctx;
}

/// Parses a context with `[]`, checks it accepts `hole`, and returns it annotated with its result type.
inline std::pair<EvalContext, TypePtr> compile_context(std::string_view text, const TypePtr& hole) {
  auto src = parse_context_term(text);
  TermPtr t = surface_detail::Desugarer({surface_detail::Desugarer::hole_name()}).term(src);
  return elaborate_context(decompose_context(t), hole);
}

inline TermPtr library_fix() {
  // Λα.Λβ.λf. δ_f (in1 δ_f) with δ_f = λy. case y of in1 y' => f (λx. let r = y' y in r x)
  static const TermPtr fix = [] {
    const char* delta =
        "(fun (y : mu 'g. 'g -> 'a -> 'b) => case y of in1 y' => "
        "f (fun (x : 'a) => let (r : 'a -> 'b) = y' y in r x))";
    const std::string src = std::string("Lam 'a 'b => fun (f : ('a -> 'b) -> 'a -> 'b) => ") + delta +
                            " (in1[mu 'g. 'g -> 'a -> 'b] " + delta + ")";
    TermPtr t = compile(src).term;
    register_name(t, "fix");
    return t;
  }();
  return fix;
}

inline TermPtr library_omega() {
  // Λα. fix[unit][α] (λf.f) ⟨⟩
  static const TermPtr omega = [] {
    TermPtr t = compile("Lam 'a => fix[unit]['a] (fun (f : unit -> 'a) => f) ()").term;
    register_name(t, "omega");
    return t;
  }();
  return omega;
}

}  // namespace ndlam

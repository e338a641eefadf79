#pragma once

// Syntax-directed type checking of closed and open terms, typing of evaluation
// contexts, and an elaboration pass that fills in omitted lambda parameter
// types before checking.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ndlam/print.hpp"
#include "ndlam/syntax.hpp"

namespace ndlam {

/// Δ as a count of enclosing type binders, Γ as a stack of term-variable types.
/// Each entry remembers the Δ it was written under and is shifted on lookup.
class TypeEnv {
 public:
  TypeEnv() = default;

  std::uint32_t type_depth() const { return type_depth_; }
  std::size_t size() const { return vars_.size(); }

  void push(TypePtr t) { vars_.push_back({std::move(t), type_depth_}); }
  void pop() { vars_.pop_back(); }
  void enter_type_binder() { ++type_depth_; }
  void leave_type_binder() { --type_depth_; }

  /// Type of de Bruijn variable `i` as seen from the current Δ.
  std::optional<TypePtr> lookup(std::uint32_t i) const {
    if (i >= vars_.size()) return std::nullopt;
    const auto& b = vars_[vars_.size() - 1 - i];
    return shift_type(b.type, static_cast<std::int64_t>(type_depth_ - b.depth));
  }

 private:
  struct Binding {
    TypePtr type;
    std::uint32_t depth;
  };
  std::vector<Binding> vars_;
  std::uint32_t type_depth_ = 0;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(std::vector<std::size_t> path, TypePtr expected, TypePtr actual, std::string rule, const std::string& what)
      : std::runtime_error(what),
        path_(std::move(path)),
        expected_(std::move(expected)),
        actual_(std::move(actual)),
        rule_(std::move(rule)) {}

  /// Child indices from the root of the checked term to the failing subterm.
  const std::vector<std::size_t>& path() const { return path_; }
  const TypePtr& expected() const { return expected_; }
  const TypePtr& actual() const { return actual_; }
  const std::string& rule() const { return rule_; }

 private:
  std::vector<std::size_t> path_;
  TypePtr expected_;
  TypePtr actual_;
  std::string rule_;
};

namespace typing_detail {

inline std::string path_text(const std::vector<std::size_t>& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(path[i]);
  }
  return s;
}

class Checker {
 public:
  explicit Checker(TypeEnv env) : env_(std::move(env)) {}

  TypePtr infer(const TermPtr& e) {
    switch (e->kind) {
      case TermKind::Var: {
        auto t = env_.lookup(e->index);
        if (!t) fail("var", nullptr, nullptr, "variable out of scope");
        return *t;
      }
      case TermKind::Unit:
        return ty::unit();
      case TermKind::Pair:
        return ty::product(child(e, 0), child(e, 1));
      case TermKind::Lambda: {
        if (!e->type) fail("lambda", nullptr, nullptr, "lambda parameter needs a type annotation");
        scoped(e->type);
        env_.push(e->type);
        TypePtr body = child(e, 0);
        env_.pop();
        return ty::arrow(e->type, body);
      }
      case TermKind::Inject: {
        const TypePtr& ann = e->type;
        scoped(ann);
        if (ann->kind != TypeKind::Recursive) fail("inject", nullptr, ann, "injection annotation is not a recursive sum");
        if (e->index < 1 || e->index > ann->children.size())
          fail("inject", nullptr, ann, "injection arm " + std::to_string(e->index) + " out of range");
        TypePtr want = unfold_arm(ann, e->index);
        TypePtr got = child(e, 0);
        if (!type_equal(want, got)) {
          path_.push_back(0);
          fail("inject", want, got, "injection payload has the wrong type");
        }
        return ann;
      }
      case TermKind::TypeLambda: {
        env_.enter_type_binder();
        TypePtr body = child(e, 0);
        env_.leave_type_binder();
        return ty::forall(body);
      }
      case TermKind::Choice:
        return ty::nat();
      case TermKind::Project: {
        TypePtr t = child(e, 0);
        if (t->kind != TypeKind::Product) fail("project", nullptr, t, "projection from a non-product");
        return t->children[e->index - 1];
      }
      case TermKind::Apply: {
        TypePtr f = child(e, 0);
        if (f->kind != TypeKind::Arrow) fail("apply", nullptr, f, "head of application is not a function");
        TypePtr a = child(e, 1);
        if (!type_equal(f->children[0], a)) {
          path_.push_back(1);
          fail("apply", f->children[0], a, "argument type does not match the parameter");
        }
        return f->children[1];
      }
      case TermKind::Case: {
        TypePtr s = child(e, 0);
        if (s->kind != TypeKind::Recursive) fail("case", nullptr, s, "case scrutinee is not a recursive sum");
        const std::size_t n = e->subs.size() - 1;
        if (n != s->children.size())
          fail("case", nullptr, s,
               "case has " + std::to_string(n) + " branches for " + std::to_string(s->children.size()) + " arms");
        TypePtr result;
        for (std::size_t j = 1; j <= n; ++j) {
          env_.push(unfold_arm(s, j));
          TypePtr b = child(e, j);
          env_.pop();
          if (!result) {
            result = b;
          } else if (!type_equal(result, b)) {
            path_.push_back(j);
            fail("case", result, b, "case branches disagree");
          }
        }
        return result;
      }
      case TermKind::TypeApply: {
        scoped(e->type);
        TypePtr f = child(e, 0);
        if (f->kind != TypeKind::Forall) fail("type-apply", nullptr, f, "head of type application is not polymorphic");
        return subst_type_in_type(f->children[0], e->type);
      }
    }
    throw InternalFault("unknown term kind");
  }

  /// Returns a fully annotated copy of `e` and its type, checking against `expected` when given.
  std::pair<TermPtr, TypePtr> elaborate(const TermPtr& e, const TypePtr& expected) {
    auto [out, t] = elaborate_inner(e, expected);
    if (expected && !type_equal(expected, t)) fail("check", expected, t, "term does not have the expected type");
    return {out, t};
  }

  std::vector<std::size_t>& path() { return path_; }

 private:
  TypeEnv env_;
  std::vector<std::size_t> path_;

  [[noreturn]] void fail(const std::string& rule, TypePtr expected, TypePtr actual, const std::string& msg) {
    std::string what = msg + " at " + path_text(path_);
    if (expected) what += "; expected " + type_at(expected);
    if (actual) what += "; found " + type_at(actual);
    throw TypeError(path_, std::move(expected), std::move(actual), rule, what);
  }

  std::string type_at(const TypePtr& t) const { return t->free_bound == 0 ? pretty(t) : pretty(t) + " (open)"; }

  void scoped(const TypePtr& t) {
    if (t->free_bound > env_.type_depth()) fail("scope", nullptr, t, "type mentions an unbound type variable");
  }

  TypePtr child(const TermPtr& e, std::size_t i) {
    path_.push_back(i);
    TypePtr t = infer(e->subs[i]);
    path_.pop_back();
    return t;
  }

  std::pair<TermPtr, TypePtr> sub(const TermPtr& e, std::size_t i, const TypePtr& expected) {
    path_.push_back(i);
    auto r = elaborate(e->subs[i], expected);
    path_.pop_back();
    return r;
  }

  std::pair<TermPtr, TypePtr> elaborate_inner(const TermPtr& e, const TypePtr& expected) {
    switch (e->kind) {
      case TermKind::Var:
      case TermKind::Unit:
      case TermKind::Choice:
        return {e, infer(e)};
      case TermKind::Pair: {
        const bool prod = expected && expected->kind == TypeKind::Product;
        auto [a, ta] = sub(e, 0, prod ? expected->children[0] : nullptr);
        auto [b, tb] = sub(e, 1, prod ? expected->children[1] : nullptr);
        return {tm::pair(a, b), ty::product(ta, tb)};
      }
      case TermKind::Lambda: {
        TypePtr param = e->type;
        const bool arrow = expected && expected->kind == TypeKind::Arrow;
        if (!param) {
          if (!arrow) fail("annotation", expected, nullptr, "cannot determine the type of a lambda parameter");
          param = expected->children[0];
        }
        scoped(param);
        env_.push(param);
        auto [body, tb] = sub(e, 0, arrow ? expected->children[1] : nullptr);
        env_.pop();
        return {tm::lam(param, body), ty::arrow(param, tb)};
      }
      case TermKind::Inject: {
        const TypePtr& ann = e->type;
        scoped(ann);
        if (ann->kind != TypeKind::Recursive) fail("inject", nullptr, ann, "injection annotation is not a recursive sum");
        if (e->index < 1 || e->index > ann->children.size())
          fail("inject", nullptr, ann, "injection arm " + std::to_string(e->index) + " out of range");
        auto [v, tv] = sub(e, 0, unfold_arm(ann, e->index));
        return {tm::inj(e->index, v, ann), ann};
      }
      case TermKind::TypeLambda: {
        const bool poly = expected && expected->kind == TypeKind::Forall;
        env_.enter_type_binder();
        auto [body, tb] = sub(e, 0, poly ? expected->children[0] : nullptr);
        env_.leave_type_binder();
        return {tm::tlam(body), ty::forall(tb)};
      }
      case TermKind::Project: {
        auto [v, tv] = sub(e, 0, nullptr);
        if (tv->kind != TypeKind::Product) fail("project", nullptr, tv, "projection from a non-product");
        return {tm::proj(e->index, v), tv->children[e->index - 1]};
      }
      case TermKind::Apply: {
        const TermPtr& head = e->subs[0];
        if (head->kind == TermKind::Lambda && !head->type) {
          // let-shaped redex: the argument fixes the parameter type.
          auto [arg, ta] = sub(e, 1, nullptr);
          path_.push_back(0);
          env_.push(ta);
          path_.push_back(0);
          auto [body, tb] = elaborate(head->subs[0], expected);
          path_.pop_back();
          env_.pop();
          path_.pop_back();
          return {tm::app(tm::lam(ta, body), arg), tb};
        }
        auto [f, tf] = sub(e, 0, nullptr);
        if (tf->kind != TypeKind::Arrow) fail("apply", nullptr, tf, "head of application is not a function");
        auto [arg, ta] = sub(e, 1, tf->children[0]);
        return {tm::app(f, arg), tf->children[1]};
      }
      case TermKind::Case: {
        auto [s, ts] = sub(e, 0, nullptr);
        if (ts->kind != TypeKind::Recursive) fail("case", nullptr, ts, "case scrutinee is not a recursive sum");
        const std::size_t n = e->subs.size() - 1;
        if (n != ts->children.size())
          fail("case", nullptr, ts,
               "case has " + std::to_string(n) + " branches for " + std::to_string(ts->children.size()) + " arms");
        TypePtr result = expected;
        std::vector<TermPtr> branches;
        for (std::size_t j = 1; j <= n; ++j) {
          env_.push(unfold_arm(ts, j));
          auto [b, tb] = sub(e, j, result);
          env_.pop();
          if (!result) result = tb;
          branches.push_back(b);
        }
        return {tm::case_of(s, std::move(branches)), result};
      }
      case TermKind::TypeApply: {
        scoped(e->type);
        auto [f, tf] = sub(e, 0, nullptr);
        if (tf->kind != TypeKind::Forall) fail("type-apply", nullptr, tf, "head of type application is not polymorphic");
        return {tm::tapp(f, e->type), subst_type_in_type(tf->children[0], e->type)};
      }
    }
    throw InternalFault("unknown term kind");
  }
};

}  // namespace typing_detail

/// The unique τ with Δ;Γ ⊢ e : τ. Every lambda must carry its parameter type.
inline TypePtr infer(const TypeEnv& env, const TermPtr& e) { return typing_detail::Checker(env).infer(e); }
inline TypePtr infer(const TermPtr& e) { return infer(TypeEnv{}, e); }

struct Elaborated {
  TermPtr term;
  TypePtr type;
};

/// Fills in omitted lambda parameter types from the surrounding context and
/// returns the annotated term with its type. A let-shaped redex (λx.e) e′ takes
/// x's type from e′; a lambda checked against τ→τ′ takes τ.
inline Elaborated elaborate(const TypeEnv& env, const TermPtr& e, const TypePtr& expected = nullptr) {
  auto [t, ty] = typing_detail::Checker(env).elaborate(e, expected);
  return {t, ty};
}
inline Elaborated elaborate(const TermPtr& e, const TypePtr& expected = nullptr) {
  return elaborate(TypeEnv{}, e, expected);
}

/// τ′ with ⊢ E : hole ⊸ τ′.
inline TypePtr check_context(const EvalContext& ctx, const TypePtr& hole) {
  TypePtr running = hole;
  for (std::size_t i = 0; i < ctx.frames.size(); ++i) {
    TypePtr f;
    try {
      f = infer(ctx.frames[i]);
    } catch (const TypeError& err) {
      std::vector<std::size_t> path{i};
      path.insert(path.end(), err.path().begin(), err.path().end());
      throw TypeError(path, err.expected(), err.actual(), err.rule(), std::string("context frame: ") + err.what());
    }
    if (f->kind != TypeKind::Arrow || !type_equal(f->children[0], running))
      throw TypeError({i}, ty::arrow(running, ty::var(0)), f, "context",
                      "context frame " + std::to_string(i) + " does not accept " + pretty(running));
    running = f->children[1];
  }
  return running;
}

/// Annotates unannotated frame lambdas from the running hole type, then checks.
inline std::pair<EvalContext, TypePtr> elaborate_context(const EvalContext& ctx, const TypePtr& hole) {
  EvalContext out;
  TypePtr running = hole;
  for (std::size_t i = 0; i < ctx.frames.size(); ++i) {
    const TermPtr& frame = ctx.frames[i];
    Elaborated el;
    if (frame->kind == TermKind::Lambda && !frame->type) {
      el = elaborate(tm::lam(running, frame->subs[0]));
    } else {
      el = elaborate(frame);
    }
    out.frames.push_back(el.term);
    if (el.type->kind != TypeKind::Arrow || !type_equal(el.type->children[0], running))
      throw TypeError({i}, ty::arrow(running, ty::var(0)), el.type, "context",
                      "context frame " + std::to_string(i) + " does not accept " + pretty(running));
    running = el.type->children[1];
  }
  return {out, running};
}

enum class Shape { Unit, Pair, Lambda, Injection, TypeLambda };

struct CanonicalForm {
  Shape shape;
  std::uint32_t arm = 0;  // Injection only
};

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Unit: return "unit";
    case Shape::Pair: return "pair";
    case Shape::Lambda: return "lambda";
    case Shape::Injection: return "injection";
    case Shape::TypeLambda: return "type-lambda";
  }
  return "?";
}

/// Which canonical shape a closed value of type τ has.
inline CanonicalForm canonical_form(const TermPtr& v, const TypePtr& t) {
  if (!is_value(v) || v->kind == TermKind::Var) throw InternalFault("canonical_form on a non-value or open value");
  auto expect = [&](TermKind k, TypeKind tk) {
    if (v->kind != k || t->kind != tk) throw InternalFault("value shape does not match its type");
  };
  switch (t->kind) {
    case TypeKind::Unit:
      expect(TermKind::Unit, TypeKind::Unit);
      return {Shape::Unit};
    case TypeKind::Product:
      expect(TermKind::Pair, TypeKind::Product);
      return {Shape::Pair};
    case TypeKind::Arrow:
      expect(TermKind::Lambda, TypeKind::Arrow);
      return {Shape::Lambda};
    case TypeKind::Recursive:
      expect(TermKind::Inject, TypeKind::Recursive);
      return {Shape::Injection, v->index};
    case TypeKind::Forall:
      expect(TermKind::TypeLambda, TypeKind::Forall);
      return {Shape::TypeLambda};
    case TypeKind::Var:
      break;
  }
  throw InternalFault("closed value at a type variable");
}

}  // namespace ndlam

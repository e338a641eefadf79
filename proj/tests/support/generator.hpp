#pragma once

// Random well-typed closed terms for property tests. Every result is
// elaborated core syntax: lambdas annotated, eliminations on values.

#include <cstdint>
#include <random>
#include <vector>

#include "ndlam/surface.hpp"
#include "ndlam/syntax.hpp"

namespace ndlam::support {

class TermGenerator {
 public:
  explicit TermGenerator(std::uint64_t seed) : rng_(seed) {}

  /// Closed types the generator draws from.
  static const std::vector<TypePtr>& type_pool() {
    static const std::vector<TypePtr> pool = {
        ty::unit(),
        ty::nat(),
        ty::boolean(),
        ty::arrow(ty::nat(), ty::nat()),
        ty::product(ty::boolean(), ty::nat()),
        ty::arrow(ty::unit(), ty::boolean()),
        ty::forall(ty::arrow(ty::var(0), ty::var(0))),
    };
    return pool;
  }

  TypePtr any_type() { return pick(type_pool()); }

  /// A closed term of type `t`.
  TermPtr term(const TypePtr& t, int depth) {
    std::vector<TypePtr> env;
    return expr(t, env, depth);
  }

  /// A closed term of a random pool type.
  TermPtr term(int depth) { return term(any_type(), depth); }

 private:
  std::mt19937_64 rng_;

  int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(roll(static_cast<int>(xs.size())))];
  }

  static TypePtr shifted(const TypePtr& t) { return shift_type(t, 1); }

  TermPtr var_of(const TypePtr& t, const std::vector<TypePtr>& env) {
    std::vector<std::uint32_t> hits;
    for (std::size_t i = 0; i < env.size(); ++i)
      if (type_equal(env[i], t)) hits.push_back(static_cast<std::uint32_t>(env.size() - 1 - i));
    if (hits.empty()) return nullptr;
    return tm::var(pick(hits));
  }

  /// Nullptr when no value of `t` can be built (a bare type variable with none in scope).
  TermPtr value(const TypePtr& t, std::vector<TypePtr>& env, int depth) {
    if (roll(3) == 0)
      if (auto v = var_of(t, env)) return v;
    switch (t->kind) {
      case TypeKind::Var:
        return var_of(t, env);
      case TypeKind::Unit:
        return tm::unit();
      case TypeKind::Product: {
        auto a = value(t->children[0], env, depth - 1);
        auto b = a ? value(t->children[1], env, depth - 1) : nullptr;
        return b ? tm::pair(a, b) : nullptr;
      }
      case TypeKind::Arrow: {
        env.push_back(t->children[0]);
        auto body = expr(t->children[1], env, depth - 1);
        env.pop_back();
        return tm::lam(t->children[0], body);
      }
      case TypeKind::Recursive: {
        const std::size_t arms = t->children.size();
        // Bias towards the base arm so recursive payloads stay small.
        const std::size_t j = depth <= 0 ? 1 : static_cast<std::size_t>(roll(static_cast<int>(arms))) + 1;
        auto payload = value(unfold_arm(t, j), env, depth - 1);
        return payload ? tm::inj(static_cast<std::uint32_t>(j), payload, t) : nullptr;
      }
      case TypeKind::Forall: {
        std::vector<TypePtr> inner;
        for (const auto& e : env) inner.push_back(shifted(e));
        return tm::tlam(expr(t->children[0], inner, depth - 1));
      }
    }
    return nullptr;
  }

  TermPtr omega(const TypePtr& t) { return tm::tapp(library_omega(), t); }

  TermPtr expr(const TypePtr& t, std::vector<TypePtr>& env, int depth) {
    if (depth <= 0) {
      if (auto v = value(t, env, 0)) return v;
      return omega(t);
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      switch (roll(9)) {
        case 0:
        case 1:
          if (auto v = value(t, env, depth)) return v;
          break;
        case 2: {  // application
          const TypePtr a = any_type();
          auto f = value(ty::arrow(a, t), env, depth - 1);
          return tm::app(f, expr(a, env, depth - 1));
        }
        case 3: {  // let
          const TypePtr a = any_type();
          auto bound = expr(a, env, depth - 1);
          env.push_back(a);
          auto body = expr(t, env, depth - 1);
          env.pop_back();
          return tm::let(bound, body, a);
        }
        case 4: {  // projection of a let-bound pair
          const TypePtr other = any_type();
          const bool first = roll(2) == 0;
          const TypePtr p = first ? ty::product(t, other) : ty::product(other, t);
          auto bound = expr(p, env, depth - 1);
          if (!bound) break;
          return tm::let(bound, tm::proj(first ? 1 : 2, tm::var(0)), p);
        }
        case 5:    // case on a let-bound nat or bool
        case 6: {  // case on a choice
          const bool on_choice = roll(2) == 0 && depth > 1;
          const TypePtr s = on_choice ? ty::nat() : (roll(2) ? ty::nat() : ty::boolean());
          auto bound = on_choice ? tm::choice() : expr(s, env, depth - 1);
          env.push_back(s);
          std::vector<TermPtr> branches;
          for (std::size_t j = 1; j <= s->children.size(); ++j) {
            env.push_back(unfold_arm(s, j));
            branches.push_back(expr(t, env, depth - 1));
            env.pop_back();
          }
          env.pop_back();
          return tm::let(bound, tm::case_of(tm::var(0), branches), s);
        }
        case 7: {  // polymorphic identity instantiated at t
          const TypePtr poly = ty::forall(ty::arrow(ty::var(0), ty::var(0)));
          auto f = value(poly, env, depth - 1);
          const TypePtr inst = ty::arrow(t, t);
          env.push_back(inst);
          auto arg = expr(t, env, depth - 1);
          env.pop_back();
          return tm::let(tm::tapp(f, t), tm::app(tm::var(0), arg), inst);
        }
        case 8:
          if (roll(4) == 0) return omega(t);
          break;
      }
    }
    if (auto v = value(t, env, depth)) return v;
    return omega(t);
  }
};

}  // namespace ndlam::support

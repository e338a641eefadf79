#pragma once

// Core abstract syntax: types, terms, values and evaluation contexts.
//
// Both term and type binders use de Bruijn indices, so alpha-equivalence is
// structural equality. Nodes are immutable and shared; build them only
// through the factory functions in `ty::` and `tm::`, which compute the
// cached hash and free-variable bounds.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ndlam {

/// Raised when an internal invariant is violated (panic-class fault).
class InternalFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
inline std::size_t hash_mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Types

enum class TypeKind : std::uint8_t { Var, Unit, Product, Arrow, Recursive, Forall };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  std::uint32_t index = 0;        // Var: de Bruijn index
  std::vector<TypePtr> children;  // Product/Arrow: 2, Recursive: arms, Forall: body
  std::size_t hash = 0;
  std::uint32_t free_bound = 0;   // 1 + largest free index, 0 when closed

  bool closed() const { return free_bound == 0; }
};

namespace ty {

inline TypePtr make(TypeKind kind, std::uint32_t index, std::vector<TypePtr> children) {
  auto t = std::make_shared<Type>();
  t->kind = kind;
  t->index = index;
  std::size_t h = detail::hash_mix(static_cast<std::size_t>(kind) + 17, index);
  std::uint32_t bound = kind == TypeKind::Var ? index + 1 : 0;
  const bool binds = kind == TypeKind::Recursive || kind == TypeKind::Forall;
  for (const auto& c : children) {
    if (!c) throw InternalFault("null type child");
    h = detail::hash_mix(h, c->hash);
    std::uint32_t cb = c->free_bound;
    if (binds) cb = cb > 0 ? cb - 1 : 0;
    bound = std::max(bound, cb);
  }
  t->children = std::move(children);
  t->hash = h;
  t->free_bound = bound;
  return t;
}

inline TypePtr var(std::uint32_t i) { return make(TypeKind::Var, i, {}); }
inline TypePtr unit() {
  static const TypePtr u = make(TypeKind::Unit, 0, {});
  return u;
}
inline TypePtr product(TypePtr a, TypePtr b) { return make(TypeKind::Product, 0, {std::move(a), std::move(b)}); }
inline TypePtr arrow(TypePtr a, TypePtr b) { return make(TypeKind::Arrow, 0, {std::move(a), std::move(b)}); }
inline TypePtr rec(std::vector<TypePtr> arms) {
  if (arms.empty()) throw InternalFault("recursive sum needs at least one arm");
  return make(TypeKind::Recursive, 0, std::move(arms));
}
inline TypePtr forall(TypePtr body) { return make(TypeKind::Forall, 0, {std::move(body)}); }

/// nat = mu a. 1 + a
inline TypePtr nat() {
  static const TypePtr n = rec({unit(), var(0)});
  return n;
}
/// bool (the type 2) = mu a. 1 + 1
inline TypePtr boolean() {
  static const TypePtr b = rec({unit(), unit()});
  return b;
}

}  // namespace ty

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->index != b->index ||
      a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!type_equal(a->children[i], b->children[i])) return false;
  return true;
}

/// Adds `amount` to every type variable with index >= cutoff.
inline TypePtr shift_type(const TypePtr& t, std::int64_t amount, std::uint32_t cutoff = 0) {
  if (amount == 0 || t->free_bound <= cutoff) return t;
  if (t->kind == TypeKind::Var) {
    const std::int64_t shifted = static_cast<std::int64_t>(t->index) + amount;
    if (shifted < 0) throw InternalFault("negative type index after shift");
    return ty::var(static_cast<std::uint32_t>(shifted));
  }
  const bool binds = t->kind == TypeKind::Recursive || t->kind == TypeKind::Forall;
  std::vector<TypePtr> kids;
  kids.reserve(t->children.size());
  for (const auto& c : t->children) kids.push_back(shift_type(c, amount, binds ? cutoff + 1 : cutoff));
  return ty::make(t->kind, t->index, std::move(kids));
}

namespace detail {
inline TypePtr subst_type_at(const TypePtr& t, const TypePtr& s, std::uint32_t depth) {
  if (t->free_bound <= depth) return t;
  if (t->kind == TypeKind::Var) {
    if (t->index == depth) return shift_type(s, depth);
    return ty::var(t->index - 1);  // index > depth: one binder disappears
  }
  const bool binds = t->kind == TypeKind::Recursive || t->kind == TypeKind::Forall;
  std::vector<TypePtr> kids;
  kids.reserve(t->children.size());
  for (const auto& c : t->children) kids.push_back(subst_type_at(c, s, binds ? depth + 1 : depth));
  return ty::make(t->kind, t->index, std::move(kids));
}
}  // namespace detail

/// t[s/α] where α is the innermost free type variable (index 0) of t.
inline TypePtr subst_type_in_type(const TypePtr& t, const TypePtr& s) { return detail::subst_type_at(t, s, 0); }

/// The payload type of arm `j` (1-based) of a recursive sum: τj[μα.τ1+…+τn / α].
inline TypePtr unfold_arm(const TypePtr& rec, std::size_t j) {
  if (rec->kind != TypeKind::Recursive || j < 1 || j > rec->children.size())
    throw InternalFault("unfold_arm on a non-recursive type or bad arm");
  return subst_type_in_type(rec->children[j - 1], rec);
}

// ---------------------------------------------------------------------------
// Terms

enum class TermKind : std::uint8_t {
  Var,
  Unit,
  Pair,
  Lambda,
  Inject,
  TypeLambda,
  Choice,
  Project,
  Apply,
  Case,
  TypeApply,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  std::uint32_t index = 0;     // Var: de Bruijn index; Inject: arm (1-based); Project: 1 or 2
  std::vector<TermPtr> subs;   // see tm:: factories for the layout per kind
  TypePtr type;                // Lambda: parameter (may be null), Inject: annotation, TypeApply: argument
  std::size_t hash = 0;
  std::uint32_t free_terms = 0;  // 1 + largest free term index, 0 when closed in terms
  std::uint32_t free_types = 0;  // same for type variables

  bool closed() const { return free_terms == 0 && free_types == 0; }
};

inline bool is_value(const Term& e) {
  switch (e.kind) {
    case TermKind::Var:
    case TermKind::Unit:
    case TermKind::Pair:
    case TermKind::Lambda:
    case TermKind::Inject:
    case TermKind::TypeLambda:
      return true;
    default:
      return false;
  }
}
inline bool is_value(const TermPtr& e) { return is_value(*e); }

namespace tm {

namespace detail {
inline bool binds_term(TermKind k, std::size_t child) {
  return k == TermKind::Lambda || (k == TermKind::Case && child > 0);
}

inline TermPtr make(TermKind kind, std::uint32_t index, std::vector<TermPtr> subs, TypePtr type) {
  auto e = std::make_shared<Term>();
  e->kind = kind;
  e->index = index;
  std::size_t h = ndlam::detail::hash_mix(static_cast<std::size_t>(kind) * 31 + 7, index);
  std::uint32_t ft = kind == TermKind::Var ? index + 1 : 0;
  std::uint32_t fty = 0;
  if (type) {
    h = ndlam::detail::hash_mix(h, type->hash);
    fty = type->free_bound;
  } else {
    h = ndlam::detail::hash_mix(h, 0x51);
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& c = subs[i];
    if (!c) throw InternalFault("null term child");
    h = ndlam::detail::hash_mix(h, c->hash);
    std::uint32_t cb = c->free_terms;
    if (binds_term(kind, i)) cb = cb > 0 ? cb - 1 : 0;
    ft = std::max(ft, cb);
    std::uint32_t cty = c->free_types;
    if (kind == TermKind::TypeLambda) cty = cty > 0 ? cty - 1 : 0;
    fty = std::max(fty, cty);
  }
  e->subs = std::move(subs);
  e->type = std::move(type);
  e->hash = h;
  e->free_terms = ft;
  e->free_types = fty;
  return e;
}

inline const TermPtr& require_value(const TermPtr& v, const char* where) {
  if (!v || !is_value(*v)) throw InternalFault(std::string("value position holds a non-value: ") + where);
  return v;
}
}  // namespace detail

inline TermPtr var(std::uint32_t i) { return detail::make(TermKind::Var, i, {}, nullptr); }
inline TermPtr unit() {
  static const TermPtr u = detail::make(TermKind::Unit, 0, {}, nullptr);
  return u;
}
inline TermPtr pair(TermPtr a, TermPtr b) {
  detail::require_value(a, "pair");
  detail::require_value(b, "pair");
  return detail::make(TermKind::Pair, 0, {std::move(a), std::move(b)}, nullptr);
}
/// `param` may be null for an unannotated lambda (before elaboration).
inline TermPtr lam(TypePtr param, TermPtr body) {
  return detail::make(TermKind::Lambda, 0, {std::move(body)}, std::move(param));
}
inline TermPtr inj(std::uint32_t arm, TermPtr payload, TypePtr annotation) {
  if (arm < 1) throw InternalFault("injection arm index is 1-based");
  if (!annotation) throw InternalFault("injection requires an annotation");
  detail::require_value(payload, "injection");
  return detail::make(TermKind::Inject, arm, {std::move(payload)}, std::move(annotation));
}
inline TermPtr tlam(TermPtr body) { return detail::make(TermKind::TypeLambda, 0, {std::move(body)}, nullptr); }
inline TermPtr choice() {
  static const TermPtr c = detail::make(TermKind::Choice, 0, {}, nullptr);
  return c;
}
inline TermPtr proj(std::uint32_t which, TermPtr v) {
  if (which != 1 && which != 2) throw InternalFault("projection index must be 1 or 2");
  detail::require_value(v, "projection");
  return detail::make(TermKind::Project, which, {std::move(v)}, nullptr);
}
inline TermPtr app(TermPtr head, TermPtr arg) {
  detail::require_value(head, "application head");
  return detail::make(TermKind::Apply, 0, {std::move(head), std::move(arg)}, nullptr);
}
/// Branch i (0-based here) binds one term variable and handles arm i+1.
inline TermPtr case_of(TermPtr scrutinee, std::vector<TermPtr> branches) {
  detail::require_value(scrutinee, "case scrutinee");
  if (branches.empty()) throw InternalFault("case needs at least one branch");
  std::vector<TermPtr> subs;
  subs.reserve(branches.size() + 1);
  subs.push_back(std::move(scrutinee));
  for (auto& b : branches) subs.push_back(std::move(b));
  return detail::make(TermKind::Case, 0, std::move(subs), nullptr);
}
inline TermPtr tapp(TermPtr head, TypePtr at) {
  detail::require_value(head, "type application head");
  if (!at) throw InternalFault("type application requires a type");
  return detail::make(TermKind::TypeApply, 0, {std::move(head)}, std::move(at));
}

/// let x = bound in body, i.e. (λx.body) bound. `body` is already under the binder.
inline TermPtr let(TermPtr bound, TermPtr body, TypePtr annotation = nullptr) {
  return app(lam(std::move(annotation), std::move(body)), std::move(bound));
}

/// The numeral n: 0 = in1 (), n+1 = in2 n, every injection annotated at nat.
inline TermPtr numeral(std::size_t n) {
  static std::vector<TermPtr> cache{inj(1, unit(), ty::nat())};
  static std::mutex guard;
  std::lock_guard<std::mutex> lock(guard);
  while (cache.size() <= n) cache.push_back(inj(2, cache.back(), ty::nat()));
  return cache[n];
}
inline TermPtr true_value() { return inj(1, unit(), ty::boolean()); }
inline TermPtr false_value() { return inj(2, unit(), ty::boolean()); }

}  // namespace tm

inline bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->index != b->index || a->subs.size() != b->subs.size())
    return false;
  if (static_cast<bool>(a->type) != static_cast<bool>(b->type)) return false;
  if (a->type && !type_equal(a->type, b->type)) return false;
  for (std::size_t i = 0; i < a->subs.size(); ++i)
    if (!term_eq(a->subs[i], b->subs[i])) return false;
  return true;
}

struct TermHash {
  std::size_t operator()(const TermPtr& e) const { return e->hash; }
};
struct TermEqual {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return term_eq(a, b); }
};

/// If `e` is a numeral n, returns n.
inline std::optional<std::size_t> numeral_value(const TermPtr& e) {
  std::size_t n = 0;
  const Term* cur = e.get();
  while (cur->kind == TermKind::Inject && type_equal(cur->type, ty::nat())) {
    if (cur->index == 1) {
      if (cur->subs[0]->kind == TermKind::Unit) return n;
      return std::nullopt;
    }
    if (cur->index != 2) return std::nullopt;
    ++n;
    cur = cur->subs[0].get();
  }
  return std::nullopt;
}

/// If `e` is true or false (at bool), returns which.
inline std::optional<bool> boolean_value(const TermPtr& e) {
  if (e->kind != TermKind::Inject || !type_equal(e->type, ty::boolean()) || e->subs[0]->kind != TermKind::Unit)
    return std::nullopt;
  if (e->index == 1) return true;
  if (e->index == 2) return false;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shifting and substitution

namespace detail {

inline TypePtr shift_opt(const TypePtr& t, std::int64_t amount, std::uint32_t cutoff) {
  return t ? shift_type(t, amount, cutoff) : t;
}

inline TermPtr rebuild(const TermPtr& e, std::vector<TermPtr> subs, TypePtr type) {
  return tm::detail::make(e->kind, e->index, std::move(subs), std::move(type));
}

inline TermPtr shift_terms_at(const TermPtr& e, std::int64_t amount, std::uint32_t cutoff) {
  if (amount == 0 || e->free_terms <= cutoff) return e;
  if (e->kind == TermKind::Var) {
    const std::int64_t shifted = static_cast<std::int64_t>(e->index) + amount;
    if (shifted < 0) throw InternalFault("negative term index after shift");
    return tm::var(static_cast<std::uint32_t>(shifted));
  }
  std::vector<TermPtr> subs;
  subs.reserve(e->subs.size());
  for (std::size_t i = 0; i < e->subs.size(); ++i)
    subs.push_back(shift_terms_at(e->subs[i], amount, tm::detail::binds_term(e->kind, i) ? cutoff + 1 : cutoff));
  return rebuild(e, std::move(subs), e->type);
}

inline TermPtr shift_types_at(const TermPtr& e, std::int64_t amount, std::uint32_t cutoff) {
  if (amount == 0 || e->free_types <= cutoff) return e;
  const std::uint32_t inner = e->kind == TermKind::TypeLambda ? cutoff + 1 : cutoff;
  std::vector<TermPtr> subs;
  subs.reserve(e->subs.size());
  for (const auto& c : e->subs) subs.push_back(shift_types_at(c, amount, inner));
  return rebuild(e, std::move(subs), shift_opt(e->type, amount, cutoff));
}

inline TermPtr subst_term_at(const TermPtr& e, const TermPtr& v, std::uint32_t depth, std::uint32_t type_depth) {
  if (e->free_terms <= depth) return e;
  if (e->kind == TermKind::Var) {
    if (e->index == depth) return shift_terms_at(shift_types_at(v, type_depth, 0), depth, 0);
    return tm::var(e->index - 1);
  }
  const std::uint32_t inner_types = e->kind == TermKind::TypeLambda ? type_depth + 1 : type_depth;
  std::vector<TermPtr> subs;
  subs.reserve(e->subs.size());
  for (std::size_t i = 0; i < e->subs.size(); ++i)
    subs.push_back(subst_term_at(e->subs[i], v, tm::detail::binds_term(e->kind, i) ? depth + 1 : depth, inner_types));
  return rebuild(e, std::move(subs), e->type);
}

inline TermPtr subst_type_at(const TermPtr& e, const TypePtr& t, std::uint32_t depth) {
  if (e->free_types <= depth) return e;
  const std::uint32_t inner = e->kind == TermKind::TypeLambda ? depth + 1 : depth;
  std::vector<TermPtr> subs;
  subs.reserve(e->subs.size());
  for (const auto& c : e->subs) subs.push_back(subst_type_at(c, t, inner));
  TypePtr type = e->type ? ndlam::detail::subst_type_at(e->type, t, depth) : nullptr;
  return rebuild(e, std::move(subs), std::move(type));
}

}  // namespace detail

inline TermPtr shift_terms(const TermPtr& e, std::int64_t amount, std::uint32_t cutoff = 0) {
  return detail::shift_terms_at(e, amount, cutoff);
}
inline TermPtr shift_types(const TermPtr& e, std::int64_t amount, std::uint32_t cutoff = 0) {
  return detail::shift_types_at(e, amount, cutoff);
}

/// e[v/x] for the innermost term binder x (index 0); other free indices drop by one.
inline TermPtr subst_term(const TermPtr& e, const TermPtr& v) { return detail::subst_term_at(e, v, 0, 0); }

/// e[t/α] for the innermost type binder α, reaching annotations and type applications.
inline TermPtr subst_type_in_term(const TermPtr& e, const TypePtr& t) { return detail::subst_type_at(e, t, 0); }

// ---------------------------------------------------------------------------
// Evaluation contexts

/// E ::= [] | v E. frames[0] is the innermost application, the last frame the outermost.
struct EvalContext {
  std::vector<TermPtr> frames;

  bool empty() const { return frames.empty(); }
  std::size_t depth() const { return frames.size(); }

  /// Returns the context with `head` wrapped around the outside.
  EvalContext then(TermPtr head) const {
    EvalContext out = *this;
    out.frames.push_back(std::move(head));
    return out;
  }
};

inline TermPtr plug(const EvalContext& ctx, TermPtr e) {
  for (const auto& frame : ctx.frames) e = tm::app(frame, std::move(e));
  return e;
}

inline bool context_eq(const EvalContext& a, const EvalContext& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    if (!term_eq(a.frames[i], b.frames[i])) return false;
  return true;
}

/// Term size (node count), used by generators and reports.
inline std::size_t term_size(const TermPtr& e) {
  std::size_t n = 1;
  for (const auto& c : e->subs) n += term_size(c);
  return n;
}

}  // namespace ndlam

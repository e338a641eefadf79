#pragma once

// Small-step reduction with step classification. The redex is found by
// descending the spine of applications whose argument is not yet a value,
// which is exactly the evaluation-context decomposition E ::= [] | v E.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ndlam/syntax.hpp"

namespace ndlam {

enum class StepTag : std::uint8_t { UnfoldFold, Choice, Other };

struct StepKind {
  StepTag tag = StepTag::Other;
  std::uint64_t chosen = 0;  // Choice only

  static StepKind unfold_fold() { return {StepTag::UnfoldFold, 0}; }
  static StepKind choice(std::uint64_t n) { return {StepTag::Choice, n}; }
  static StepKind other() { return {StepTag::Other, 0}; }

  friend bool operator==(const StepKind&, const StepKind&) = default;
};

inline std::string to_string(const StepKind& k) {
  switch (k.tag) {
    case StepTag::UnfoldFold: return "unfold-fold";
    case StepTag::Choice: return "choice(" + std::to_string(k.chosen) + ")";
    case StepTag::Other: return "other";
  }
  return "?";
}

struct Step {
  TermPtr source;
  TermPtr target;
  StepKind kind;
};

struct Successors {
  enum class Form { None, Deterministic, ChoiceFanout };
  Form form = Form::None;
  std::vector<Step> steps;  // one for Deterministic, bound+1 for ChoiceFanout
  bool truncated = false;
  std::size_t bound = 0;
};

/// The redex of a non-value term together with its surrounding context.
struct Redex {
  EvalContext context;
  TermPtr term;
};

/// Nullopt iff `e` is a value.
inline std::optional<Redex> locate_redex(const TermPtr& e) {
  if (is_value(e)) return std::nullopt;
  std::vector<TermPtr> outer_first;
  TermPtr cur = e;
  while (cur->kind == TermKind::Apply && !is_value(cur->subs[1])) {
    outer_first.push_back(cur->subs[0]);
    cur = cur->subs[1];
  }
  Redex r;
  r.context.frames.assign(outer_first.rbegin(), outer_first.rend());
  r.term = cur;
  return r;
}

struct Contraction {
  TermPtr target;
  StepKind kind;
};

/// Contracts a non-choice redex. Nullopt when the redex is `?` or stuck
/// (which on open terms means a free variable sits in an elimination position).
inline std::optional<Contraction> contract(const TermPtr& r) {
  switch (r->kind) {
    case TermKind::Project: {
      const TermPtr& v = r->subs[0];
      if (v->kind != TermKind::Pair) return std::nullopt;
      return Contraction{v->subs[r->index - 1], StepKind::other()};
    }
    case TermKind::Apply: {
      const TermPtr& f = r->subs[0];
      if (f->kind != TermKind::Lambda || !is_value(r->subs[1])) return std::nullopt;
      return Contraction{subst_term(f->subs[0], r->subs[1]), StepKind::other()};
    }
    case TermKind::TypeApply: {
      const TermPtr& f = r->subs[0];
      if (f->kind != TermKind::TypeLambda) return std::nullopt;
      return Contraction{subst_type_in_term(f->subs[0], r->type), StepKind::other()};
    }
    case TermKind::Case: {
      const TermPtr& v = r->subs[0];
      if (v->kind != TermKind::Inject || v->index >= r->subs.size()) return std::nullopt;
      return Contraction{subst_term(r->subs[v->index], v->subs[0]), StepKind::unfold_fold()};
    }
    default:
      return std::nullopt;
  }
}

/// All one-step successors of a closed term; `?` fans out to 0..choice_bound.
inline Successors step_successors(const TermPtr& e, std::size_t choice_bound) {
  Successors out;
  auto redex = locate_redex(e);
  if (!redex) return out;
  if (redex->term->kind == TermKind::Choice) {
    out.form = Successors::Form::ChoiceFanout;
    out.truncated = true;
    out.bound = choice_bound;
    out.steps.reserve(choice_bound + 1);
    for (std::size_t n = 0; n <= choice_bound; ++n)
      out.steps.push_back(Step{e, plug(redex->context, tm::numeral(n)), StepKind::choice(n)});
    return out;
  }
  auto c = contract(redex->term);
  if (!c) throw InternalFault("stuck non-value term (ill-typed or open input)");
  out.form = Successors::Form::Deterministic;
  out.steps.push_back(Step{e, plug(redex->context, c->target), c->kind});
  return out;
}

/// Picks the numeral for a `?` step.
using ChoicePolicy = std::function<std::uint64_t()>;

inline ChoicePolicy fixed_policy(std::uint64_t n) {
  return [n] { return n; };
}

/// Uniform over 0..max, reproducible for a fixed seed.
inline ChoicePolicy random_policy(std::uint64_t seed, std::uint64_t max) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng, max] { return std::uniform_int_distribution<std::uint64_t>(0, max)(*rng); };
}

/// Reads one natural per choice from `in`; defaults to 0 on end of input or garbage.
inline ChoicePolicy stream_policy(std::istream& in) {
  return [&in] {
    std::uint64_t n = 0;
    if (!(in >> n)) {
      in.clear();
      return std::uint64_t{0};
    }
    return n;
  };
}

/// A single path of at most `fuel` steps, stopping early at a value.
inline std::vector<Step> trace(const TermPtr& e, std::size_t fuel, const ChoicePolicy& policy) {
  std::vector<Step> path;
  TermPtr cur = e;
  while (path.size() < fuel) {
    auto redex = locate_redex(cur);
    if (!redex) break;
    Step s;
    s.source = cur;
    if (redex->term->kind == TermKind::Choice) {
      const std::uint64_t n = policy();
      s.target = plug(redex->context, tm::numeral(n));
      s.kind = StepKind::choice(n);
    } else {
      auto c = contract(redex->term);
      if (!c) throw InternalFault("stuck non-value term (ill-typed or open input)");
      s.target = plug(redex->context, c->target);
      s.kind = c->kind;
    }
    cur = s.target;
    path.push_back(std::move(s));
  }
  return path;
}

struct PathClass {
  std::size_t unfold_count = 0;
  std::size_t choice_count = 0;
  bool pure = true;     // no choice step
  bool zero_uf = true;  // no unfold-fold step

  bool witnesses_zero() const { return zero_uf; }             // e ↝⁰ e′
  bool witnesses_one() const { return unfold_count == 1; }    // e ↝¹ e′
  bool witnesses_pure() const { return pure; }                // e ᵖ↝ e′
  bool witnesses_pure_zero() const { return pure && zero_uf; }
};

inline PathClass classify_path(const std::vector<Step>& path) {
  PathClass c;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && !term_eq(path[i - 1].target, path[i].source))
      throw std::invalid_argument("path does not chain at step " + std::to_string(i));
    if (path[i].kind.tag == StepTag::UnfoldFold) ++c.unfold_count;
    if (path[i].kind.tag == StepTag::Choice) ++c.choice_count;
  }
  c.pure = c.choice_count == 0;
  c.zero_uf = c.unfold_count == 0;
  return c;
}

/// True when `s` is one of the successors of its source (a choice of any n is accepted).
inline bool is_valid_step(const Step& s) {
  auto redex = locate_redex(s.source);
  if (!redex) return false;
  if (redex->term->kind == TermKind::Choice) {
    return s.kind.tag == StepTag::Choice &&
           term_eq(s.target, plug(redex->context, tm::numeral(s.kind.chosen)));
  }
  auto c = contract(redex->term);
  return c && c->kind == s.kind && term_eq(s.target, plug(redex->context, c->target));
}

}  // namespace ndlam

#pragma once

// Bounded CIU testing: a term approximates another when, in every context of a
// finite corpus, convergence of the first plugged term implies convergence of
// the second. Outcomes are evidence over the corpus, not proofs.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ndlam/convergence.hpp"
#include "ndlam/print.hpp"
#include "ndlam/surface.hpp"
#include "ndlam/syntax.hpp"
#include "ndlam/typing.hpp"

namespace ndlam {

enum class Mode { May, Must };

inline const char* to_string(Mode m) { return m == Mode::May ? "may" : "must"; }

/// A convergence verdict reduced to what CIU needs.
struct Observation {
  bool positive = false;  // exact Converges / exact MustConverges
  bool negative = false;  // DivergesCertified / Refuted
  std::string verdict;

  bool exact() const { return positive || negative; }
};

inline Observation observe(const TermPtr& e, Mode mode, const Budget& b) {
  Observation o;
  if (mode == Mode::May) {
    auto v = may_converges(e, b);
    o.positive = v.tag == MayTag::Converges;
    o.negative = v.tag == MayTag::DivergesCertified;
    o.verdict = to_string(v.tag);
    if (!v.exact()) o.verdict += " (" + v.reason + ")";
  } else {
    auto v = must_converges(e, b);
    o.positive = v.tag == MustTag::MustConverges && v.exact;
    o.negative = v.tag == MustTag::Refuted;
    o.verdict = to_string(v.tag);
    if (v.tag == MustTag::MustConverges && !v.exact) o.verdict += " (inexact: " + v.reason + ")";
    if (v.tag == MustTag::Unknown) o.verdict += " (" + v.reason + ")";
  }
  return o;
}

/// Memoises observations per term for one fixed budget; safe to share between threads.
class VerdictCache {
 public:
  explicit VerdictCache(Budget b = {}) : budget_(b) {}

  const Budget& budget() const { return budget_; }

  Observation get(const TermPtr& e, Mode mode) {
    auto& table = mode == Mode::May ? may_ : must_;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = table.find(e);
      if (it != table.end()) return it->second;
    }
    Observation o = observe(e, mode, budget_);
    std::lock_guard<std::mutex> lock(mu_);
    table.emplace(e, o);
    return o;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return may_.size() + must_.size();
  }

 private:
  Budget budget_;
  mutable std::mutex mu_;
  std::unordered_map<TermPtr, Observation, TermHash, TermEqual> may_;
  std::unordered_map<TermPtr, Observation, TermHash, TermEqual> must_;
};

// ---------------------------------------------------------------------------
// Context corpora

struct ContextEntry {
  EvalContext context;
  TypePtr result;
};

struct ContextCorpus {
  TypePtr hole;
  std::vector<ContextEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// All stacks of at most `depth` frames drawn from `pool` whose types compose
/// starting at `hole`. The empty context comes first; order is deterministic.
inline ContextCorpus gen_contexts(const TypePtr& hole, const std::vector<TermPtr>& pool, std::size_t depth) {
  struct Typed {
    TermPtr value;
    TypePtr type;
  };
  std::vector<Typed> typed;
  for (const auto& v : pool) {
    if (!v->closed() || !is_value(v)) throw std::invalid_argument("context pool entries must be closed values");
    TypePtr t = infer(v);
    if (t->kind == TypeKind::Arrow) typed.push_back({v, t});
  }
  ContextCorpus corpus;
  corpus.hole = hole;
  corpus.entries.push_back({EvalContext{}, hole});
  std::size_t layer_begin = 0;
  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t layer_end = corpus.entries.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const auto& f : typed) {
        if (!type_equal(f.type->children[0], corpus.entries[i].result)) continue;
        corpus.entries.push_back({corpus.entries[i].context.then(f.value), f.type->children[1]});
      }
    }
    layer_begin = layer_end;
  }
  return corpus;
}

namespace equivalence_detail {

inline TermPtr value_of(const std::string& src) {
  TermPtr t = compile(src).term;
  if (!is_value(t)) throw InternalFault("pool source is not a value: " + src);
  return t;
}

inline std::vector<TermPtr> compile_all(const std::vector<std::string>& srcs) {
  std::vector<TermPtr> out;
  out.reserve(srcs.size());
  for (const auto& s : srcs) out.push_back(value_of(s));
  return out;
}

}  // namespace equivalence_detail

/// Discriminating functions between unit, nat and bool: identities, successor,
/// predecessor, tests, functions that diverge on some inputs, and choices.
inline const std::vector<TermPtr>& base_pool() {
  static const std::vector<TermPtr> pool = equivalence_detail::compile_all({
      "fun (n : nat) => n",
      "fun (n : nat) => in2[nat] n",
      "fun (n : nat) => case n of in1 u => 0 | in2 m => m",
      "fun (n : nat) => ifz n then omega[nat] else n",
      "fun (n : nat) => ifz n then n else omega[nat]",
      "fun (n : nat) => n or 0",
      "fun (n : nat) => n or omega[nat]",
      "fun (n : nat) => case n of in1 u => 0 | in2 m => ifz m then omega[nat] else n",
      "fun (n : nat) => ifz n then true else false",
      "fun (n : nat) => ifz n then true else omega[bool]",
      "fun (n : nat) => ()",
      "fun (n : nat) => ifz n then () else omega[unit]",
      "fun (b : bool) => b",
      "fun (b : bool) => if b then false else true",
      "fun (b : bool) => if b then b else omega[bool]",
      "fun (b : bool) => if b then omega[bool] else b",
      "fun (b : bool) => b or true",
      "fun (b : bool) => if b then 0 else 1",
      "fun (b : bool) => if b then 0 or 1 else omega[nat]",
      "fun (b : bool) => if b then () else omega[unit]",
      "fun (b : bool) => if b then omega[unit] else ()",
      "fun (u : unit) => u",
      "fun (u : unit) => omega[unit]",
      "fun (u : unit) => () or omega[unit]",
      "fun (u : unit) => 0 or 1",
      "fun (u : unit) => 2",
      "fun (u : unit) => true or false",
  });
  return pool;
}

inline bool is_base(const TypePtr& t) {
  return t->kind == TypeKind::Unit || type_equal(t, ty::nat()) || type_equal(t, ty::boolean());
}

/// A few closed values of a closed type, small ones first.
inline std::vector<TermPtr> sample_values(const TypePtr& t, std::size_t nesting = 2) {
  std::vector<TermPtr> out;
  if (!t->closed()) return out;
  if (t->kind == TypeKind::Unit) return {tm::unit()};
  if (type_equal(t, ty::nat())) return {tm::numeral(0), tm::numeral(1), tm::numeral(2), tm::numeral(3)};
  if (type_equal(t, ty::boolean())) return {tm::true_value(), tm::false_value()};
  switch (t->kind) {
    case TypeKind::Product: {
      auto as = sample_values(t->children[0], nesting);
      auto bs = sample_values(t->children[1], nesting);
      for (std::size_t i = 0; i < std::min<std::size_t>(as.size(), 2); ++i)
        for (std::size_t j = 0; j < std::min<std::size_t>(bs.size(), 2); ++j) out.push_back(tm::pair(as[i], bs[j]));
      return out;
    }
    case TypeKind::Arrow: {
      const TypePtr& a = t->children[0];
      const TypePtr& b = t->children[1];
      if (type_equal(a, b)) out.push_back(tm::lam(a, tm::var(0)));
      if (nesting > 0) {
        auto bs = sample_values(b, nesting - 1);
        for (std::size_t j = 0; j < std::min<std::size_t>(bs.size(), 2); ++j) out.push_back(tm::lam(a, bs[j]));
      }
      out.push_back(tm::lam(a, tm::tapp(library_omega(), b)));
      return out;
    }
    case TypeKind::Recursive: {
      if (nesting == 0) return out;
      for (std::size_t j = 1; j <= t->children.size(); ++j) {
        auto ps = sample_values(unfold_arm(t, j), nesting - 1);
        for (std::size_t k = 0; k < std::min<std::size_t>(ps.size(), 2); ++k)
          out.push_back(tm::inj(static_cast<std::uint32_t>(j), ps[k], t));
      }
      return out;
    }
    case TypeKind::Forall:
      return {tm::tlam(tm::tapp(library_omega(), t->children[0]))};
    default:
      return out;
  }
}

/// Frames that take apart a value of type `t`: apply a function to sample
/// arguments, project a pair, instantiate a polymorphic value, or analyse an
/// injection. Recurses into the result types up to `nesting` levels.
inline void structural_frames(const TypePtr& t, std::size_t nesting, std::vector<TermPtr>& out) {
  if (nesting == 0 || is_base(t) || !t->closed()) return;
  auto add = [&](const TermPtr& frame) {
    if (std::none_of(out.begin(), out.end(), [&](const TermPtr& f) { return term_eq(f, frame); }))
      out.push_back(frame);
  };
  switch (t->kind) {
    case TypeKind::Arrow: {
      auto args = sample_values(t->children[0]);
      for (std::size_t i = 0; i < std::min<std::size_t>(args.size(), 4); ++i)
        add(tm::lam(t, tm::app(tm::var(0), shift_terms(args[i], 1))));
      structural_frames(t->children[1], nesting - 1, out);
      return;
    }
    case TypeKind::Product:
      add(tm::lam(t, tm::proj(1, tm::var(0))));
      add(tm::lam(t, tm::proj(2, tm::var(0))));
      structural_frames(t->children[0], nesting - 1, out);
      structural_frames(t->children[1], nesting - 1, out);
      return;
    case TypeKind::Forall:
      for (const TypePtr& s : {ty::boolean(), ty::nat(), ty::unit()}) {
        add(tm::lam(t, tm::tapp(tm::var(0), s)));
        structural_frames(subst_type_in_type(t->children[0], s), nesting - 1, out);
      }
      return;
    case TypeKind::Recursive: {
      const std::size_t n = t->children.size();
      std::vector<TermPtr> tags;
      for (std::size_t j = 0; j < n; ++j) tags.push_back(tm::numeral(j));
      add(tm::lam(t, tm::case_of(tm::var(0), tags)));
      for (std::size_t j = 1; j <= n; ++j) {
        TypePtr payload = unfold_arm(t, j);
        std::vector<TermPtr> branches;
        for (std::size_t k = 1; k <= n; ++k)
          branches.push_back(k == j ? tm::var(0) : tm::tapp(library_omega(), payload));
        add(tm::lam(t, tm::case_of(tm::var(0), branches)));
        structural_frames(payload, nesting - 1, out);
      }
      return;
    }
    default:
      return;
  }
}

/// Hand-written discriminators for particular hole types, as concrete contexts.
inline std::vector<EvalContext> hand_contexts(const TypePtr& hole) {
  static const char* const xor_src =
      "fun (a : bool) (b : bool) => if a then (if b then false else true) else b";
  static const char* const xnor_src =
      "fun (a : bool) (b : bool) => if a then b else (if b then false else true)";
  auto twice = [](const std::string& inst, const char* cmp) {
    return "let x = " + inst + " in let f = " + cmp +
           " in let y = x (true, false) in let z = x (true, false) in let w = f y z in if w then w else omega[bool]";
  };
  std::vector<std::string> srcs;
  if (type_equal(hole, compile_type("bool * bool -> bool"))) {
    srcs = {twice("[]", xor_src), twice("[]", xnor_src)};
  } else if (type_equal(hole, compile_type("all 'a. 'a * 'a -> 'a"))) {
    const std::string inst = "(fun (h : all 'a. 'a * 'a -> 'a) => h [bool]) []";
    srcs = {twice(inst, xor_src), twice(inst, xnor_src)};
  }
  std::vector<EvalContext> out;
  for (const auto& s : srcs) out.push_back(compile_context(s, hole).first);
  return out;
}

/// The corpus used by the checks: base and structural frames to `depth` plus the
/// structural depth of the hole, then hand-written discriminators. When `limit`
/// is non-zero and exceeded, the deepest layer is thinned evenly.
inline ContextCorpus default_corpus(const TypePtr& hole, std::size_t depth = 2, std::size_t limit = 600) {
  std::vector<TermPtr> pool = base_pool();
  std::vector<TermPtr> structural;
  structural_frames(hole, 3, structural);
  std::size_t extra = 0;
  for (TypePtr t = hole; !is_base(t) && extra < 3; ++extra) {
    if (t->kind == TypeKind::Arrow) t = t->children[1];
    else if (t->kind == TypeKind::Product) t = t->children[0];
    else if (t->kind == TypeKind::Forall) t = subst_type_in_type(t->children[0], ty::boolean());
    else if (t->kind == TypeKind::Recursive) t = unfold_arm(t, 1);
    else break;
  }
  pool.insert(pool.end(), structural.begin(), structural.end());
  ContextCorpus corpus = gen_contexts(hole, pool, depth + extra);
  if (limit && corpus.entries.size() > limit) {
    // Keep every context shorter than the deepest layer, then a strided sample of the rest.
    const std::size_t deepest = corpus.entries.back().context.depth();
    std::vector<ContextEntry> keep, deep;
    for (auto& e : corpus.entries) (e.context.depth() < deepest ? keep : deep).push_back(std::move(e));
    const std::size_t room = keep.size() < limit ? limit - keep.size() : 0;
    if (room > 0) {
      const double stride = static_cast<double>(deep.size()) / static_cast<double>(room);
      for (std::size_t i = 0; i < room && i < deep.size(); ++i)
        keep.push_back(std::move(deep[static_cast<std::size_t>(static_cast<double>(i) * stride)]));
    }
    corpus.entries = std::move(keep);
  }
  for (auto& ctx : hand_contexts(hole)) corpus.entries.push_back({ctx, check_context(ctx, hole)});
  return corpus;
}

// ---------------------------------------------------------------------------
// CIU approximation

struct CiuOutcome {
  enum class Tag { Holds, Counterexample, Inconclusive };
  Tag tag = Tag::Holds;
  std::size_t contexts_tested = 0;
  // Counterexample: the first violating context and both observations.
  std::optional<std::size_t> context_index;
  EvalContext context;
  std::string left_verdict;
  std::string right_verdict;
  // Inconclusive: indices of contexts whose verdicts were not exact.
  std::vector<std::size_t> unknown_sites;

  bool holds() const { return tag == Tag::Holds; }
  bool counterexample() const { return tag == Tag::Counterexample; }
};

inline const char* to_string(CiuOutcome::Tag t) {
  switch (t) {
    case CiuOutcome::Tag::Holds: return "holds";
    case CiuOutcome::Tag::Counterexample: return "counterexample";
    case CiuOutcome::Tag::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace equivalence_detail {

struct SiteResult {
  enum class Kind { Ok, Violated, Unknown } kind = Kind::Ok;
  Observation left, right;
};

inline SiteResult check_site(const TermPtr& lhs, const TermPtr& rhs, const EvalContext& ctx, Mode mode,
                             VerdictCache& cache) {
  SiteResult r;
  r.left = cache.get(plug(ctx, lhs), mode);
  if (r.left.negative) return r;
  r.right = cache.get(plug(ctx, rhs), mode);
  if (r.right.positive) return r;
  r.kind = r.left.positive && r.right.negative ? SiteResult::Kind::Violated : SiteResult::Kind::Unknown;
  return r;
}

}  // namespace equivalence_detail

/// e ≲ e2 in the given mode over every context of the corpus.
inline CiuOutcome ciu_leq(const TermPtr& e, const TermPtr& e2, Mode mode, const ContextCorpus& corpus,
                          VerdictCache& cache) {
  const TypePtr t1 = infer(e);
  const TypePtr t2 = infer(e2);
  if (!type_equal(t1, t2) || !type_equal(t1, corpus.hole))
    throw TypeError({}, corpus.hole, type_equal(t1, corpus.hole) ? t2 : t1, "ciu",
                    "CIU check needs both terms at the corpus hole type " + pretty(corpus.hole));

  using equivalence_detail::SiteResult;
  std::vector<SiteResult> results(corpus.entries.size());
  const std::size_t jobs = std::max<std::size_t>(1, cache.budget().jobs);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < corpus.entries.size(); i += stride)
      results[i] = equivalence_detail::check_site(e, e2, corpus.entries[i].context, mode, cache);
  };
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        try {
          work(w, jobs);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : workers) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  CiuOutcome out;
  out.contexts_tested = corpus.entries.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].kind == SiteResult::Kind::Violated && !out.context_index) {
      out.tag = CiuOutcome::Tag::Counterexample;
      out.context_index = i;
      out.context = corpus.entries[i].context;
      out.left_verdict = results[i].left.verdict;
      out.right_verdict = results[i].right.verdict;
    } else if (results[i].kind == SiteResult::Kind::Unknown) {
      out.unknown_sites.push_back(i);
    }
  }
  if (!out.context_index && !out.unknown_sites.empty()) out.tag = CiuOutcome::Tag::Inconclusive;
  return out;
}

inline CiuOutcome ciu_leq(const TermPtr& e, const TermPtr& e2, Mode mode, const ContextCorpus& corpus,
                          const Budget& b = {}) {
  VerdictCache cache(b);
  return ciu_leq(e, e2, mode, corpus, cache);
}

/// Both directions; Holds only if both hold, Counterexample if either has one.
inline CiuOutcome ciu_equiv(const TermPtr& e, const TermPtr& e2, Mode mode, const ContextCorpus& corpus,
                            VerdictCache& cache) {
  CiuOutcome a = ciu_leq(e, e2, mode, corpus, cache);
  CiuOutcome b = ciu_leq(e2, e, mode, corpus, cache);
  if (a.counterexample()) return a;
  if (b.counterexample()) return b;
  if (!a.holds()) return a;
  if (!b.holds()) return b;
  a.contexts_tested += b.contexts_tested;
  return a;
}

/// Type instantiations used to close open terms.
inline std::vector<TypePtr> closing_types() {
  return {ty::unit(), ty::nat(), ty::boolean(), ty::arrow(ty::nat(), ty::nat())};
}

/// CIU for open terms: Δ type variables and Γ term variables (innermost last,
/// types written under all Δ binders) are closed by every δ from
/// `closing_types()` and γ drawn from `sample_values`, up to `max_closings`.
inline CiuOutcome ciu_leq_open(const TermPtr& e, const TermPtr& e2, std::uint32_t type_vars,
                               const std::vector<TypePtr>& gamma, Mode mode, std::size_t depth, VerdictCache& cache,
                               std::size_t max_closings = 16) {
  const auto tys = closing_types();
  std::vector<std::vector<TypePtr>> deltas{{}};
  for (std::uint32_t i = 0; i < type_vars; ++i) {
    std::vector<std::vector<TypePtr>> next;
    for (const auto& d : deltas)
      for (const auto& t : tys) {
        auto ext = d;
        ext.push_back(t);
        next.push_back(std::move(ext));
      }
    deltas = std::move(next);
  }
  CiuOutcome total;
  std::size_t closings = 0;
  for (const auto& delta : deltas) {
    // delta[i] instantiates de Bruijn type index type_vars-1-i (outermost first).
    auto close_type = [&](TypePtr t) {
      for (std::size_t i = delta.size(); i-- > 0;) t = subst_type_in_type(t, delta[i]);
      return t;
    };
    auto close_types_in = [&](TermPtr t) {
      for (std::size_t i = delta.size(); i-- > 0;) t = subst_type_in_term(t, delta[i]);
      return t;
    };
    std::vector<std::vector<TermPtr>> gammas{{}};
    for (const auto& gt : gamma) {
      auto vals = sample_values(close_type(gt));
      std::vector<std::vector<TermPtr>> next;
      for (const auto& g : gammas)
        for (std::size_t k = 0; k < std::min<std::size_t>(vals.size(), 2); ++k) {
          auto ext = g;
          ext.push_back(vals[k]);
          next.push_back(std::move(ext));
        }
      gammas = std::move(next);
    }
    for (const auto& vals : gammas) {
      if (closings++ >= max_closings) break;
      TermPtr a = close_types_in(e);
      TermPtr b = close_types_in(e2);
      // Innermost variable (index 0) is the last entry of gamma.
      for (std::size_t i = vals.size(); i-- > 0;) {
        a = subst_term(a, vals[i]);
        b = subst_term(b, vals[i]);
      }
      auto corpus = default_corpus(infer(a), depth);
      auto r = ciu_leq(a, b, mode, corpus, cache);
      total.contexts_tested += r.contexts_tested;
      if (r.counterexample()) return r;
      if (!r.holds()) total.tag = CiuOutcome::Tag::Inconclusive;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// The basic may/must law table

enum class Relation { Equiv, Leq };

struct LawInstanceResult {
  std::string lhs;
  std::string rhs;
  std::string type;
  Mode mode;
  bool forward = true;  // lhs ≲ rhs; false for the rhs ≲ lhs direction
  CiuOutcome outcome;
};

struct LawCellReport {
  int id = 0;
  std::string statement;
  Relation relation = Relation::Equiv;
  std::vector<Mode> modes;
  std::vector<LawInstanceResult> checks;
  // Strict cells: the converse is expected to fail on at least one instance.
  std::vector<LawInstanceResult> converse_checks;
  std::size_t min_contexts = 0;

  bool strict() const { return relation == Relation::Leq; }
  bool passed() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.outcome.holds()) return false;
    if (strict())
      return std::any_of(converse_checks.begin(), converse_checks.end(),
                         [](const LawInstanceResult& r) { return r.outcome.counterexample(); });
    return true;
  }
};

struct LawReport {
  std::vector<LawCellReport> cells;
  Budget budget;
  std::size_t depth = 2;

  bool all_passed() const {
    return std::all_of(cells.begin(), cells.end(), [](const LawCellReport& c) { return c.passed(); });
  }
};

namespace equivalence_detail {

struct Inst {
  std::string type;
  std::vector<std::string> parts;
};

inline std::string paren(const std::string& s) { return "(" + s + ")"; }

inline std::string fill(std::string pattern, const Inst& in) {
  // {0}, {1}, {2}, {T}
  for (std::size_t i = 0; i < in.parts.size(); ++i) {
    const std::string key = "{" + std::to_string(i) + "}";
    for (std::size_t pos; (pos = pattern.find(key)) != std::string::npos;)
      pattern.replace(pos, key.size(), paren(in.parts[i]));
  }
  for (std::size_t pos; (pos = pattern.find("{T}")) != std::string::npos;) pattern.replace(pos, 3, in.type);
  return pattern;
}

struct CellSpec {
  int id;
  std::string statement;
  Relation relation;
  std::vector<Mode> modes;
  std::string lhs;
  std::string rhs;
  std::vector<Inst> instances;
  bool substitute_rhs = false;  // rhs is e[v/x] computed from the lhs redex
};

inline std::vector<Inst> singles() {
  return {{"nat", {"0"}},
          {"nat", {"(fun (x : nat) => x) 2"}},
          {"nat", {"0 or 1"}},
          {"nat", {"1 or omega[nat]"}},
          {"bool", {"(fun (b : bool) => if b then false else true) true"}},
          {"unit", {"proj1 ((), ())"}}};
}

inline std::vector<Inst> pairs() {
  return {{"nat", {"0", "1"}},
          {"nat", {"0 or 1", "omega[nat]"}},
          {"nat", {"omega[nat]", "2"}},
          {"bool", {"true", "(fun (b : bool) => b) false"}},
          {"unit", {"()", "omega[unit]"}}};
}

inline std::vector<Inst> triples() {
  return {{"nat", {"0", "1", "2"}},
          {"nat", {"0 or 1", "omega[nat]", "3"}},
          {"bool", {"true", "false", "omega[bool]"}},
          {"unit", {"()", "omega[unit]", "proj2 ((), ())"}}};
}

inline std::vector<CellSpec> law_cells() {
  const std::vector<Mode> both{Mode::May, Mode::Must};
  return {
      {1, "let x = ? in e ≅ e", Relation::Equiv, both, "let unused = ? in {0}", "{0}", singles()},
      {2, "let x = v in e ≅ e[v/x]", Relation::Equiv, both, "let x = {0} in {1}", "", {
           {"nat", {"3", "x or 0"}},
           {"nat", {"true", "if x then 0 else 1"}},
           {"nat", {"2", "(fun (y : nat) => y) x"}},
           {"nat", {"fun (u : unit) => 0 or 1", "x () or x ()"}}}, true},
      {3, "let x = e in x ≅ e", Relation::Equiv, both, "let x = {0} in x", "{0}", singles()},
      {4, "e or e ≅ e", Relation::Equiv, both, "{0} or {0}", "{0}", singles()},
      {5, "Ω ≲may e", Relation::Leq, {Mode::May}, "omega[{T}]", "{0}", singles()},
      {6, "Ω ≲must e", Relation::Leq, {Mode::Must}, "omega[{T}]", "{0}", singles()},
      {7, "e1 or e2 ≅ e2 or e1", Relation::Equiv, both, "{0} or {1}", "{1} or {0}", pairs()},
      {8, "e1 ≲may e1 or e2", Relation::Leq, {Mode::May}, "{0}", "{0} or {1}", pairs()},
      {9, "e1 or e2 ≲must e1", Relation::Leq, {Mode::Must}, "{0} or {1}", "{0}", pairs()},
      {10, "(e1 or e2) or e3 ≅ e1 or (e2 or e3)", Relation::Equiv, both, "({0} or {1}) or {2}",
       "{0} or ({1} or {2})", triples()},
      {11, "e or Ω ≅may e", Relation::Equiv, {Mode::May}, "{0} or omega[{T}]", "{0}", singles()},
      {12, "e or Ω ≅must Ω", Relation::Equiv, {Mode::Must}, "{0} or omega[{T}]", "omega[{T}]", singles()},
  };
}

}  // namespace equivalence_detail

/// Checks every cell of the law table over its instances and the default corpora.
inline LawReport run_law_suite(const Budget& b = {}, std::size_t depth = 2,
                               const std::function<void(const LawCellReport&)>& progress = nullptr) {
  using namespace equivalence_detail;
  LawReport report;
  report.budget = b;
  report.depth = depth;
  VerdictCache cache(b);
  std::unordered_map<std::string, ContextCorpus> corpora;
  auto corpus_for = [&](const std::string& type) -> const ContextCorpus& {
    auto it = corpora.find(type);
    if (it == corpora.end()) it = corpora.emplace(type, default_corpus(compile_type(type), depth)).first;
    return it->second;
  };
  for (const auto& cell : law_cells()) {
    LawCellReport cr;
    cr.id = cell.id;
    cr.statement = cell.statement;
    cr.relation = cell.relation;
    cr.modes = cell.modes;
    cr.min_contexts = std::numeric_limits<std::size_t>::max();
    for (const auto& inst : cell.instances) {
      const std::string ls = fill(cell.lhs, inst);
      TermPtr lhs = compile(ls).term;
      TermPtr rhs;
      std::string rs;
      if (cell.substitute_rhs) {
        rhs = subst_term(lhs->subs[0]->subs[0], lhs->subs[1]);
        rs = pretty(rhs);
      } else {
        rs = fill(cell.rhs, inst);
        rhs = compile(rs).term;
      }
      const ContextCorpus& corpus = corpus_for(inst.type);
      cr.min_contexts = std::min(cr.min_contexts, corpus.size());
      for (Mode m : cell.modes) {
        cr.checks.push_back({ls, rs, inst.type, m, true, ciu_leq(lhs, rhs, m, corpus, cache)});
        LawInstanceResult back{ls, rs, inst.type, m, false, ciu_leq(rhs, lhs, m, corpus, cache)};
        if (cell.relation == Relation::Equiv)
          cr.checks.push_back(std::move(back));
        else
          cr.converse_checks.push_back(std::move(back));
      }
    }
    if (progress) progress(cr);
    report.cells.push_back(std::move(cr));
  }
  return report;
}

}  // namespace ndlam

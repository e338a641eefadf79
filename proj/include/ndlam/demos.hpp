#pragma once

// Executable demonstrations: non-extensionality of function-typed expressions,
// the fixed-point property of fix, minimal invariance of a recursive type, and
// a behavioural classifier for values of type ∀α.α×α→α.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ndlam/convergence.hpp"
#include "ndlam/equivalence.hpp"
#include "ndlam/print.hpp"
#include "ndlam/reduction.hpp"
#include "ndlam/surface.hpp"
#include "ndlam/syntax.hpp"
#include "ndlam/typing.hpp"

namespace ndlam {

struct DemoCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct DemoReport {
  std::string title;
  std::vector<DemoCheck> checks;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const DemoCheck& c) { return c.ok; });
  }
  void add(std::string name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
};

inline std::string describe(const CiuOutcome& o) {
  std::string s = std::string(to_string(o.tag)) + " over " + std::to_string(o.contexts_tested) + " contexts";
  if (o.counterexample())
    s += "; at " + pretty(o.context) + ": " + o.left_verdict + " vs " + o.right_verdict;
  if (!o.unknown_sites.empty()) s += "; " + std::to_string(o.unknown_sites.size()) + " unknown";
  return s;
}

/// The value reached by the choice-free deterministic path from `e`, if any within `fuel`.
inline std::optional<TermPtr> pure_value(const TermPtr& e, std::size_t fuel) {
  TermPtr cur = e;
  for (std::size_t i = 0; i <= fuel; ++i) {
    if (is_value(cur)) return cur;
    auto redex = locate_redex(cur);
    if (redex->term->kind == TermKind::Choice) return std::nullopt;
    auto c = contract(redex->term);
    if (!c) return std::nullopt;
    cur = plug(redex->context, c->target);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Non-extensionality

namespace demo_detail {

inline const char* const pair_fn_e = "(fun (x : bool * bool) => proj1 x or proj2 x)";
inline const char* const pair_fn_e_prime =
    "(ifz ? then (fun (x : bool * bool) => proj1 x) else (fun (x : bool * bool) => proj2 x))";
inline const char* const xor_fn = "fun (a : bool) (b : bool) => if a then (if b then false else true) else b";
inline const char* const xnor_fn = "fun (a : bool) (b : bool) => if a then b else (if b then false else true)";

inline std::string observe_twice(const std::string& under_test, const char* cmp) {
  return "let x = " + under_test + " in let f = " + cmp +
         " in let y = x (true, false) in let z = x (true, false) in let w = f y z in if w then w else omega[bool]";
}

}  // namespace demo_detail

/// Two functions that agree on every argument yet differ in context: one
/// chooses per call, the other once up front.
inline DemoReport demo_nonextensionality(const Budget& b = {}) {
  using namespace demo_detail;
  DemoReport r;
  r.title = "non-extensionality";
  VerdictCache cache(b);
  const auto bool_corpus = default_corpus(ty::boolean());
  const char* const args[] = {"(true, true)", "(true, false)", "(false, true)", "(false, false)"};
  for (const char* u : args) {
    TermPtr lhs = compile(std::string(pair_fn_e) + " " + u).term;
    TermPtr rhs = compile(std::string(pair_fn_e_prime) + " " + u).term;
    for (Mode m : {Mode::May, Mode::Must}) {
      auto o = ciu_equiv(lhs, rhs, m, bool_corpus, cache);
      r.add(std::string("e u ≅") + to_string(m) + " e' u, u = " + u, o.holds(), describe(o));
    }
  }

  TermPtr E_e = compile(observe_twice(pair_fn_e, xor_fn)).term;
  TermPtr E_ep = compile(observe_twice(pair_fn_e_prime, xor_fn)).term;
  TermPtr E2_e = compile(observe_twice(pair_fn_e, xnor_fn)).term;
  TermPtr E2_ep = compile(observe_twice(pair_fn_e_prime, xnor_fn)).term;

  auto may_e = may_converges(E_e, b);
  r.add("E[e] may-converges", may_e.tag == MayTag::Converges && replay_path(may_e.witness),
        std::string(to_string(may_e.tag)) + ", witness " + std::to_string(may_e.witness.size()) + " steps, " +
            std::to_string(may_e.unfold_count) + " unfold-fold");

  for (std::size_t k : {4, 8, 16}) {
    Budget bk = b;
    bk.choice_bound = k;
    auto mv = may_converges(E_ep, bk);
    ReductionTree tree = explore(E_ep, bk);
    const auto choice_node = std::find_if(tree.nodes.begin(), tree.nodes.end(), [](const TreeNode& n) {
      return !n.edges.empty() && n.edges.front().kind.tag == StepTag::Choice;
    });
    bool every_branch_refuted = choice_node != tree.nodes.end();
    std::size_t branches = 0;
    if (every_branch_refuted) {
      for (const auto& edge : choice_node->edges) {
        ++branches;
        auto mu = must_converges(tree.nodes[edge.target].term, bk);
        if (mu.tag != MustTag::Refuted || !replay_cycle(mu.witness)) every_branch_refuted = false;
      }
    }
    r.add("E[e'] has no converging branch, K=" + std::to_string(k),
          mv.tag != MayTag::Converges && tree.value_count() == 0 && every_branch_refuted,
          std::string(to_string(mv.tag)) + ", " + std::to_string(branches) + " branches each cycle-refuted: " +
              (every_branch_refuted ? "yes" : "no"));
  }

  auto must_e2ep = must_converges(E2_ep, b);
  r.add("E'[e'] must-converges", must_e2ep.tag == MustTag::MustConverges,
        std::string(to_string(must_e2ep.tag)) + ", rank " + std::to_string(must_e2ep.rank) +
            (must_e2ep.exact ? ", exact" : ", inexact: " + must_e2ep.reason));
  auto must_e2e = must_converges(E2_e, b);
  r.add("E'[e] is must-refuted", must_e2e.tag == MustTag::Refuted && replay_cycle(must_e2e.witness),
        std::string(to_string(must_e2e.tag)) + ", cycle witness " + std::to_string(must_e2e.witness.size()) +
            " steps");

  // The function-level terms are told apart by the discriminating contexts.
  const TypePtr fn_type = compile_type("bool * bool -> bool");
  const auto fn_corpus = default_corpus(fn_type);
  TermPtr e = compile(pair_fn_e).term;
  TermPtr ep = compile(pair_fn_e_prime).term;
  auto may_sep = ciu_leq(e, ep, Mode::May, fn_corpus, cache);
  r.add("e ≲may e' fails", may_sep.counterexample(), describe(may_sep));
  auto must_sep = ciu_leq(ep, e, Mode::Must, fn_corpus, cache);
  r.add("e' ≲must e fails", must_sep.counterexample(), describe(must_sep));
  return r;
}

// ---------------------------------------------------------------------------
// Fixed points

struct Functional {
  std::string source;     // f : (τ → τ2) → (τ → τ2)
  std::string arg;        // τ
  std::string result;     // τ2
  std::string upper;      // optional v′ for the recursion-induction instance
};

inline std::vector<Functional> default_functionals() {
  return {
      {"fun (g : nat -> nat) (x : nat) => x", "nat", "nat", "fun (x : nat) => x"},
      {"fun (g : nat -> nat) (x : nat) => case x of in1 u => 0 | in2 m => in2[nat] (g m)", "nat", "nat",
       "fun (x : nat) => x"},
      {"fun (g : bool -> bool) (b : bool) => if b then true else g true", "bool", "bool", "fun (b : bool) => true"},
      {"fun (g : nat -> nat) (x : nat) => g x", "nat", "nat", "fun (x : nat) => omega[nat]"},
      {"fun (g : nat -> bool) (x : nat) => case x of in1 u => true or false | in2 m => g m", "nat", "bool",
       "fun (x : nat) => true or false"},
  };
}

namespace demo_detail {

inline std::string paren(const std::string& s) { return "(" + s + ")"; }

/// A pure trace of `fix_term` reaches f h with h = λx.(λr.r x) T, where T itself occurred earlier.
inline std::pair<bool, std::string> check_unfolding(const TermPtr& fix_term, const TermPtr& f, std::size_t fuel) {
  auto path = trace(fix_term, fuel, fixed_policy(0));
  const PathClass cls = classify_path(path);
  std::vector<TermPtr> seen{fix_term};
  for (const auto& s : path) seen.push_back(s.target);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    const TermPtr& t = seen[i];
    if (t->kind != TermKind::Apply || !term_eq(t->subs[0], f)) continue;
    const TermPtr& h = t->subs[1];
    if (h->kind != TermKind::Lambda) continue;
    const TermPtr& body = h->subs[0];
    if (body->kind != TermKind::Apply || body->subs[0]->kind != TermKind::Lambda) continue;
    const TermPtr& inner = body->subs[1];
    if (!inner->closed()) continue;
    const bool earlier = std::any_of(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(i),
                                     [&](const TermPtr& s) { return term_eq(s, inner); });
    const bool pure_prefix = classify_path({path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i)}).pure;
    if (earlier && pure_prefix)
      return {true, "reached f h after " + std::to_string(i) + " pure steps, " +
                        std::to_string(classify_path({path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i)})
                                           .unfold_count) +
                        " unfold-fold"};
  }
  return {false, "no f h on the pure trace (" + std::to_string(path.size()) + " steps, pure: " +
                     (cls.pure ? "yes" : "no") + ")"};
}

}  // namespace demo_detail

/// fix f and f (fix f) are CIU-indistinguishable when every f g pure-reduces to a value.
inline DemoReport demo_fix(const Functional& fn, const Budget& b = {}) {
  using demo_detail::paren;
  DemoReport r;
  r.title = "fixed point of " + fn.source;
  VerdictCache cache(b);
  const auto f = compile(fn.source);
  const TypePtr a = compile_type(fn.arg);
  const TypePtr c = compile_type(fn.result);
  const TypePtr fn_type = ty::arrow(a, c);
  if (!type_equal(f.type, ty::arrow(fn_type, fn_type)))
    throw TypeError({}, ty::arrow(fn_type, fn_type), f.type, "demo", "functional has the wrong type");

  const std::string fix_src = "fix[" + fn.arg + "][" + fn.result + "] " + paren(fn.source);
  const TermPtr fix_f = compile(fix_src).term;
  const TermPtr f_fix_f = compile(paren(fn.source) + " " + paren(fix_src)).term;

  // Hypothesis over sample arguments and the h produced by unfolding.
  std::vector<TermPtr> gs = sample_values(fn_type);
  const auto path = trace(fix_f, b.fuel, fixed_policy(0));
  for (const auto& s : path)
    if (s.target->kind == TermKind::Apply && term_eq(s.target->subs[0], f.term)) {
      gs.push_back(s.target->subs[1]);
      break;
    }
  bool hypothesis = true;
  for (const auto& g : gs)
    if (!pure_value(tm::app(f.term, g), b.fuel)) hypothesis = false;
  r.add("f g pure-reduces to a value", hypothesis, std::to_string(gs.size()) + " arguments g checked");

  auto [unfolds, detail] = demo_detail::check_unfolding(fix_f, f.term, b.fuel);
  r.add("fix f pure-reduces to f h", unfolds, detail);

  const auto corpus = default_corpus(fn_type);
  for (Mode m : {Mode::May, Mode::Must}) {
    auto o = ciu_equiv(fix_f, f_fix_f, m, corpus, cache);
    r.add(std::string("fix f ≅") + to_string(m) + " f (fix f)", o.holds(), describe(o));
  }

  if (!fn.upper.empty()) {
    const TermPtr v2 = compile(fn.upper).term;
    const TermPtr v_v2 = compile(paren(fn.source) + " " + paren(fn.upper)).term;
    for (Mode m : {Mode::May, Mode::Must}) {
      auto premise = ciu_leq(v_v2, v2, m, corpus, cache);
      auto conclusion = ciu_leq(fix_f, v2, m, corpus, cache);
      r.add(std::string("recursion induction (") + to_string(m) + "): f v' ≲ v' gives fix f ≲ v'",
            premise.holds() && conclusion.holds(), "premise " + describe(premise) + "; conclusion " +
                                                         describe(conclusion));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Minimal invariance

inline const char* const minimal_invariance_type = "mu 'a. nat + ('a -> 'a)";

inline std::string minimal_invariance_functional() {
  const std::string t = minimal_invariance_type;
  return "fun (h : (" + t + ") -> (" + t + ")) (x : " + t + ") => case x of in1 y => in1[" + t +
         "] y | in2 g => in2[" + t + "] (fun (y : " + t + ") => h (g (h y)))";
}

inline std::vector<std::string> minimal_invariance_samples() {
  const std::string t = minimal_invariance_type;
  const std::string in1 = "in1[" + t + "] ";
  const std::string in2 = "in2[" + t + "] ";
  return {
      in1 + "3",
      in1 + "0",
      in2 + "(fun (y : " + t + ") => y)",
      in2 + "(fun (y : " + t + ") => omega[" + t + "])",
      in2 + "(fun (y : " + t + ") => " + in1 + "2)",
      in2 + "(fun (y : " + t + ") => case y of in1 n => " + in1 + "(in2[nat] n) | in2 k => y)",
      in2 + "(fun (y : " + t + ") => y or " + in1 + "1)",
  };
}

/// (fix f) v and id v are indistinguishable at τ = μα.nat+(α→α) for each sample v.
inline DemoReport demo_minimal_invariance(const std::vector<std::string>& samples = minimal_invariance_samples(),
                                          const Budget& b = {}) {
  using demo_detail::paren;
  DemoReport r;
  r.title = "minimal invariance";
  VerdictCache cache(b);
  const std::string t = minimal_invariance_type;
  const TypePtr tau = compile_type(t);
  const std::string fix_src = "fix[" + t + "][" + t + "] " + paren(minimal_invariance_functional());
  const std::string id_src = "fun (x : " + t + ") => x";
  const auto corpus = default_corpus(tau);
  for (const auto& v : samples) {
    const auto lhs = compile(paren(fix_src) + " " + paren(v));
    const TermPtr rhs = compile(paren(id_src) + " " + paren(v)).term;
    if (!type_equal(lhs.type, tau)) throw TypeError({}, tau, lhs.type, "demo", "sample is not of the recursive type");
    CiuOutcome may = ciu_equiv(lhs.term, rhs, Mode::May, corpus, cache);
    CiuOutcome must = ciu_equiv(lhs.term, rhs, Mode::Must, corpus, cache);
    r.add("(fix f) v ≅ id v, v = " + v, may.holds() && must.holds(),
          "may: " + describe(may) + "; must: " + describe(must));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Parametricity for ∀α.α×α→α

enum class Clause { DivergesAtInstantiation, DivergesApplied, Proj1Like, Proj2Like, OrLike, Unknown };

inline const char* to_string(Clause c) {
  switch (c) {
    case Clause::DivergesAtInstantiation: return "diverges-at-instantiation";
    case Clause::DivergesApplied: return "diverges-applied";
    case Clause::Proj1Like: return "proj1-like";
    case Clause::Proj2Like: return "proj2-like";
    case Clause::OrLike: return "or-like";
    case Clause::Unknown: return "unknown";
  }
  return "?";
}

inline const char* const selector_type = "all 'a. 'a * 'a -> 'a";

/// One representative per clause, in declaration order of Clause.
inline const std::vector<std::pair<Clause, std::string>>& selector_representatives() {
  static const std::vector<std::pair<Clause, std::string>> reps = {
      {Clause::DivergesAtInstantiation, "Lam 'a => omega['a * 'a -> 'a]"},
      {Clause::DivergesApplied, "Lam 'a => fun (x : 'a * 'a) => omega['a]"},
      {Clause::Proj1Like, "Lam 'a => fun (x : 'a * 'a) => proj1 x"},
      {Clause::Proj2Like, "Lam 'a => fun (x : 'a * 'a) => proj2 x"},
      {Clause::OrLike, "Lam 'a => fun (x : 'a * 'a) => proj1 x or proj2 x"},
  };
  return reps;
}

/// Values outside the pure-reduction hypothesis: the choice happens at instantiation.
inline const std::vector<std::string>& noncanonical_selectors() {
  static const std::vector<std::string> vals = {
      "Lam 'a => ifz ? then (fun (x : 'a * 'a) => proj1 x) else (fun (x : 'a * 'a) => proj2 x)",
      "Lam 'a => let c = ? in fun (x : 'a * 'a) => ifz c then proj1 x else proj2 x",
  };
  return vals;
}

struct Classification {
  Clause clause = Clause::Unknown;
  bool hypothesis = false;  // every sampled v[τ] pure-reduces to a value
  std::string second_part;  // clause confirmed against its representative, or why not
  DemoReport report;
};

namespace demo_detail {

/// let f = v[τ] in f ⟨a, b⟩
inline TermPtr apply_selector(const TermPtr& v, const TypePtr& t, const TermPtr& a, const TermPtr& b) {
  TermPtr inst = tm::tapp(v, t);
  return tm::let(inst, tm::app(tm::var(0), tm::pair(shift_terms(a, 1), shift_terms(b, 1))), infer(inst));
}

/// Which of a, b are reachable values of `e` on its explored graph.
inline std::pair<bool, bool> reachable(const TermPtr& e, const TermPtr& a, const TermPtr& b, const Budget& budget) {
  ReductionTree tree = explore(e, budget);
  bool ra = false, rb = false;
  for (const auto& n : tree.nodes) {
    if (!n.value) continue;
    ra = ra || term_eq(n.term, a);
    rb = rb || term_eq(n.term, b);
  }
  return {ra, rb};
}

inline Clause clause_of(bool first, bool second) {
  if (first && second) return Clause::OrLike;
  if (first) return Clause::Proj1Like;
  if (second) return Clause::Proj2Like;
  return Clause::Unknown;
}

}  // namespace demo_detail

/// Classifies v : ∀α.α×α→α by running v[2]⟨true,false⟩, then cross-checks at nat
/// and, when v[τ] pure-reduces to a value, against the clause representative.
inline Classification demo_parametricity(const TermPtr& v, const Budget& b = {}) {
  using namespace demo_detail;
  Classification out;
  out.report.title = "classify " + pretty(v);
  DemoReport& r = out.report;
  const TypePtr sel = compile_type(selector_type);
  if (!type_equal(infer(v), sel)) throw TypeError({}, sel, infer(v), "demo", "not a value of type ∀α.α×α→α");
  VerdictCache cache(b);

  const TypePtr two = ty::boolean();
  auto inst = must_converges(tm::tapp(v, two), b);
  if (inst.tag == MustTag::Refuted) {
    out.clause = Clause::DivergesAtInstantiation;
  } else if (inst.tag == MustTag::MustConverges && inst.exact) {
    TermPtr applied = apply_selector(v, two, tm::true_value(), tm::false_value());
    auto mv = must_converges(applied, b);
    if (mv.tag == MustTag::Refuted) {
      out.clause = Clause::DivergesApplied;
    } else if (mv.tag == MustTag::MustConverges && mv.exact) {
      auto [t, f] = reachable(applied, tm::true_value(), tm::false_value(), b);
      out.clause = clause_of(t, f);
    }
  }
  r.add("first-part clause", out.clause != Clause::Unknown, to_string(out.clause));
  if (out.clause == Clause::Unknown) return out;

  // Cross-check at nat with ⟨0,1⟩ and the clause equation at ⟨2,3⟩.
  const TypePtr nat = ty::nat();
  const auto nat_corpus = default_corpus(nat);
  if (out.clause == Clause::DivergesAtInstantiation) {
    auto nat_inst = must_converges(tm::tapp(v, nat), b);
    r.add("v[nat] also diverges", nat_inst.tag == MustTag::Refuted, to_string(nat_inst.tag));
    const TermPtr rep = compile(selector_representatives()[0].second).term;
    auto o = ciu_equiv(v, rep, Mode::Must, default_corpus(sel), cache);
    r.add("v ≅must Λα.Ω", o.holds(), describe(o));
  } else {
    TermPtr at_nat = apply_selector(v, nat, tm::numeral(0), tm::numeral(1));
    auto mv = must_converges(at_nat, b);
    Clause nat_clause = Clause::Unknown;
    if (mv.tag == MustTag::Refuted) {
      nat_clause = Clause::DivergesApplied;
    } else if (mv.tag == MustTag::MustConverges && mv.exact) {
      auto [z, o] = reachable(at_nat, tm::numeral(0), tm::numeral(1), b);
      nat_clause = clause_of(z, o);
    }
    r.add("same clause at nat", nat_clause == out.clause, to_string(nat_clause));

    const TermPtr lhs = apply_selector(v, nat, tm::numeral(2), tm::numeral(3));
    TermPtr rhs;
    switch (out.clause) {
      case Clause::DivergesApplied: rhs = compile("omega[nat]").term; break;
      case Clause::Proj1Like: rhs = tm::numeral(2); break;
      case Clause::Proj2Like: rhs = tm::numeral(3); break;
      default: rhs = compile("2 or 3").term; break;
    }
    auto o = ciu_equiv(lhs, rhs, Mode::Must, nat_corpus, cache);
    r.add("clause equation at nat holds (must)", o.holds(), describe(o));
  }

  // Second part: needs every v[τ] to pure-reduce to a value.
  out.hypothesis = out.clause != Clause::DivergesAtInstantiation;
  for (const TypePtr& t : {ty::boolean(), ty::nat(), ty::unit()})
    if (out.hypothesis && !pure_value(tm::tapp(v, t), b.fuel)) out.hypothesis = false;
  if (!out.hypothesis && out.clause != Clause::DivergesAtInstantiation) {
    out.second_part = "unclassified (hypothesis fails)";
    return out;
  }
  const auto& reps = selector_representatives();
  const auto rep_it = std::find_if(reps.begin(), reps.end(), [&](const auto& p) { return p.first == out.clause; });
  const TermPtr rep = compile(rep_it->second).term;
  const auto sel_corpus = default_corpus(sel);
  auto may = ciu_equiv(v, rep, Mode::May, sel_corpus, cache);
  auto must = ciu_equiv(v, rep, Mode::Must, sel_corpus, cache);
  const bool ok = may.holds() && must.holds();
  out.second_part = ok ? std::string("≅ ") + rep_it->second : "representative check failed";
  r.add("v ≅ representative", ok, "may: " + describe(may) + "; must: " + describe(must));
  return out;
}

/// For each clause representative, the first mode and direction in which `v`
/// is separated from it by a corpus context.
inline DemoReport distinguish_from_representatives(const TermPtr& v, const Budget& b = {}) {
  DemoReport r;
  r.title = "separate " + pretty(v) + " from every clause representative";
  VerdictCache cache(b);
  const auto corpus = default_corpus(compile_type(selector_type));
  for (const auto& [clause, src] : selector_representatives()) {
    const TermPtr rep = compile(src).term;
    std::optional<std::string> found;
    for (Mode m : {Mode::Must, Mode::May}) {
      for (bool forward : {true, false}) {
        auto o = forward ? ciu_leq(v, rep, m, corpus, cache) : ciu_leq(rep, v, m, corpus, cache);
        if (o.counterexample()) {
          found = std::string(forward ? "v ≲" : "rep ≲") + to_string(m) + (forward ? " rep" : " v") +
                  " fails at " + pretty(o.context) + " (" + o.left_verdict + " vs " + o.right_verdict + ")";
          break;
        }
      }
      if (found) break;
    }
    r.add(std::string("separated from ") + to_string(clause), found.has_value(), found.value_or("no context"));
  }
  return r;
}

}  // namespace ndlam

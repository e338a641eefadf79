#include <sstream>

#include <gtest/gtest.h>

#include "ndlam/print.hpp"
#include "ndlam/reduction.hpp"
#include "ndlam/surface.hpp"
#include "ndlam/typing.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"

using namespace ndlam;

namespace {

TermPtr core(const std::string& src) { return compile(src).term; }

std::vector<TermPtr> corpus_terms() {
  std::vector<TermPtr> out;
  for (const auto& [file, type] : support::expected_types())
    if (!file.ends_with(".ctx")) out.push_back(core(support::sample(file)));
  for (const char* src : {"0 or 1", "omega[nat]", "0 or omega[nat]", "(fun (x : nat) => x) 3",
                          "fix[nat][nat] (fun (g : nat -> nat) (x : nat) => x) 2"})
    out.push_back(core(src));
  return out;
}

/// A random closed frame λx:hole. body producing some pool type.
TermPtr random_frame(support::TermGenerator& gen, const TypePtr& hole, std::mt19937_64& rng) {
  // Generate a function value of type hole -> T through the generator's arrow case.
  const TypePtr result = support::TermGenerator::type_pool()[rng() % support::TermGenerator::type_pool().size()];
  for (int tries = 0; tries < 50; ++tries) {
    TermPtr f = gen.term(ty::arrow(hole, result), 3);
    if (f->kind == TermKind::Lambda) return f;
  }
  return tm::lam(hole, gen.term(result, 3));
}

}  // namespace

TEST(Steps, BasicContractions) {
  auto s = step_successors(core("(fun (x : nat) => in2[nat] x) 0"), 8);
  ASSERT_EQ(s.form, Successors::Form::Deterministic);
  EXPECT_TRUE(term_eq(s.steps[0].target, tm::numeral(1)));
  EXPECT_EQ(s.steps[0].kind.tag, StepTag::Other);

  s = step_successors(core("case 2 of in1 u => 0 | in2 m => m"), 8);
  EXPECT_EQ(s.steps[0].kind.tag, StepTag::UnfoldFold);
  EXPECT_TRUE(term_eq(s.steps[0].target, tm::numeral(1)));

  s = step_successors(core("proj2 (0, 1)"), 8);
  EXPECT_TRUE(term_eq(s.steps[0].target, tm::numeral(1)));

  s = step_successors(core("(Lam 'a => fun (x : 'a) => x) [nat]"), 8);
  EXPECT_TRUE(term_eq(s.steps[0].target, core("fun (x : nat) => x")));
}

TEST(Steps, ChoiceFansOutToEveryNumeralUpToTheBound) {
  auto s = step_successors(tm::choice(), 5);
  ASSERT_EQ(s.form, Successors::Form::ChoiceFanout);
  ASSERT_EQ(s.steps.size(), 6u);
  for (std::size_t n = 0; n <= 5; ++n) {
    EXPECT_EQ(s.steps[n].kind, StepKind::choice(n));
    EXPECT_EQ(numeral_value(s.steps[n].target), n);
  }
}

TEST(Steps, ValuesHaveNoRedex) {
  EXPECT_FALSE(locate_redex(tm::numeral(3)).has_value());
  EXPECT_EQ(step_successors(tm::unit(), 4).form, Successors::Form::None);
}

TEST(Steps, StuckOpenTermsAreReported) {
  const TermPtr stuck = tm::proj(1, tm::var(0));
  EXPECT_FALSE(contract(stuck).has_value());
  EXPECT_THROW(step_successors(stuck, 4), InternalFault);
}

TEST(Properties, PreservationAndProgressOnGeneratedTerms) {
  support::TermGenerator gen(7);
  std::size_t terms = 0, steps = 0;
  for (int i = 0; i < 1200; ++i) {
    const TermPtr e = gen.term(4);
    const TypePtr t = infer(e);
    ++terms;
    auto path = trace(e, 80, random_policy(static_cast<std::uint64_t>(i), 4));
    for (const auto& s : path) {
      ++steps;
      ASSERT_TRUE(type_equal(infer(s.target), t)) << pretty(s.source) << "\n  --> " << pretty(s.target);
    }
    const TermPtr last = path.empty() ? e : path.back().target;
    if (!is_value(last)) ASSERT_NO_THROW(step_successors(last, 4)) << pretty(last);
  }
  EXPECT_GE(terms, 1000u);
  EXPECT_GT(steps, terms);
}

TEST(Properties, PreservationAndProgressOnCorpusTerms) {
  for (const auto& e : corpus_terms()) {
    const TypePtr t = infer(e);
    for (const auto& s : trace(e, 200, fixed_policy(1))) {
      ASSERT_TRUE(type_equal(infer(s.target), t)) << pretty(s.source);
      ASSERT_TRUE(is_valid_step(s));
    }
  }
}

TEST(Properties, DeterminismOutsideChoice) {
  support::TermGenerator gen(8);
  for (int i = 0; i < 1000; ++i) {
    TermPtr cur = gen.term(4);
    for (int k = 0; k < 30 && !is_value(cur); ++k) {
      const auto s = step_successors(cur, 3);
      const bool choice = locate_redex(cur)->term->kind == TermKind::Choice;
      if (choice) {
        ASSERT_EQ(s.form, Successors::Form::ChoiceFanout);
        ASSERT_EQ(s.steps.size(), 4u);
      } else {
        ASSERT_EQ(s.form, Successors::Form::Deterministic);
        ASSERT_EQ(s.steps.size(), 1u);
      }
      cur = s.steps[static_cast<std::size_t>(k) % s.steps.size()].target;
    }
  }
}

TEST(Properties, StepKindPartition) {
  // Every step has exactly one kind, fixed by the shape of its redex.
  support::TermGenerator gen(9);
  std::size_t counts[3] = {0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    for (const auto& s : trace(gen.term(4), 40, random_policy(static_cast<std::uint64_t>(i), 3))) {
      const auto r = locate_redex(s.source);
      ASSERT_TRUE(r.has_value());
      const TermKind k = r->term->kind;
      switch (s.kind.tag) {
        case StepTag::UnfoldFold: ASSERT_EQ(k, TermKind::Case); break;
        case StepTag::Choice: ASSERT_EQ(k, TermKind::Choice); break;
        case StepTag::Other:
          ASSERT_TRUE(k == TermKind::Apply || k == TermKind::Project || k == TermKind::TypeApply);
          break;
      }
      ++counts[static_cast<int>(s.kind.tag)];
    }
  }
  EXPECT_GT(counts[0], 0u);
  EXPECT_GT(counts[1], 0u);
  EXPECT_GT(counts[2], 0u);
}

TEST(Properties, CongruenceUnderRandomContexts) {
  // E[e] ⟼ E[e'] exactly when e ⟼ e', for non-value e.
  support::TermGenerator gen(10);
  std::mt19937_64 rng(10);
  std::size_t checked = 0;
  for (int i = 0; i < 600; ++i) {
    const TypePtr t = gen.any_type();
    const TermPtr e = gen.term(t, 4);
    if (is_value(e)) continue;
    EvalContext ctx;
    TypePtr running = t;
    const int frames = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < frames; ++f) {
      const TermPtr frame = random_frame(gen, running, rng);
      ctx = ctx.then(frame);
      running = infer(frame)->children[1];
    }
    const auto inner = step_successors(e, 3);
    const auto outer = step_successors(plug(ctx, e), 3);
    ASSERT_EQ(inner.steps.size(), outer.steps.size());
    for (std::size_t k = 0; k < inner.steps.size(); ++k) {
      ASSERT_EQ(inner.steps[k].kind, outer.steps[k].kind);
      ASSERT_TRUE(term_eq(plug(ctx, inner.steps[k].target), outer.steps[k].target));
    }
    // And nothing else: an unrelated e'' is a successor inside iff outside.
    const TermPtr other = gen.term(t, 3);
    const bool in_inner = std::any_of(inner.steps.begin(), inner.steps.end(),
                                      [&](const Step& s) { return term_eq(s.target, other); });
    const bool in_outer = std::any_of(outer.steps.begin(), outer.steps.end(),
                                      [&](const Step& s) { return term_eq(s.target, plug(ctx, other)); });
    ASSERT_EQ(in_inner, in_outer);
    ++checked;
  }
  EXPECT_GE(checked, 200u);
}

TEST(Trace, PoliciesAreReproducible) {
  const TermPtr e = core("(0 or 1) or (2 or 3)");
  auto a = trace(e, 100, random_policy(42, 8));
  auto b = trace(e, 100, random_policy(42, 8));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(term_eq(a[i].target, b[i].target));

  std::istringstream answers("1 1");
  auto c = trace(e, 100, stream_policy(answers));
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(numeral_value(c.back().target), 3u);

  auto d = trace(e, 100, fixed_policy(0));
  EXPECT_EQ(numeral_value(d.back().target), 0u);
}

TEST(Trace, FuelBoundsThePath) {
  auto p = trace(core("omega[nat]"), 25, fixed_policy(0));
  EXPECT_EQ(p.size(), 25u);
  EXPECT_FALSE(is_value(p.back().target));
}

TEST(Paths, ClassificationCountsStepKinds) {
  const auto p = trace(core("0 or 1"), 100, fixed_policy(1));
  const PathClass c = classify_path(p);
  EXPECT_EQ(c.choice_count, 1u);
  EXPECT_EQ(c.unfold_count, 1u);
  EXPECT_FALSE(c.pure);
  EXPECT_TRUE(c.witnesses_one());
  const auto q = trace(core("(fun (x : nat) => x) 0"), 10, fixed_policy(0));
  EXPECT_TRUE(classify_path(q).witnesses_pure_zero());
}

TEST(Paths, BrokenChainsAreRejected) {
  auto p = trace(core("(fun (x : nat) => (fun (y : nat) => y) x) 0"), 10, fixed_policy(0));
  ASSERT_EQ(p.size(), 2u);
  std::swap(p[0], p[1]);
  EXPECT_THROW(classify_path(p), std::invalid_argument);
  Step forged{core("proj1 (0, 1)"), tm::numeral(1), StepKind::other()};
  EXPECT_FALSE(is_valid_step(forged));
}

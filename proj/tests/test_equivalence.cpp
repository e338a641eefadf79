#include <set>

#include <gtest/gtest.h>

#include "ndlam/equivalence.hpp"
#include "ndlam/print.hpp"
#include "ndlam/surface.hpp"
#include "support/files.hpp"

using namespace ndlam;

namespace {

TermPtr core(const std::string& src) { return compile(src).term; }

const ContextCorpus& nat_corpus() {
  static const ContextCorpus c = default_corpus(ty::nat());
  return c;
}

}  // namespace

TEST(Contexts, GenerationComposesTypes) {
  const std::vector<TermPtr> pool = {core("fun (n : nat) => in2[nat] n"), core("fun (n : nat) => ifz n then true else false"),
                                     core("fun (b : bool) => if b then 0 else 1")};
  const auto c = gen_contexts(ty::nat(), pool, 2);
  // [], S[], Z[], S S[], Z S[] ... with only type-correct stacks.
  ASSERT_GE(c.size(), 1u);
  EXPECT_EQ(c.entries[0].context.depth(), 0u);
  std::size_t depth1 = 0, depth2 = 0;
  for (const auto& e : c.entries) {
    EXPECT_TRUE(type_equal(check_context(e.context, ty::nat()), e.result));
    if (e.context.depth() == 1) ++depth1;
    if (e.context.depth() == 2) ++depth2;
  }
  EXPECT_EQ(depth1, 2u);  // succ, is-zero
  EXPECT_EQ(depth2, 3u);  // succ∘succ, zero∘succ, b2n∘zero
  EXPECT_EQ(c.size(), 6u);
  EXPECT_THROW(gen_contexts(ty::nat(), {core("0 or 1")}, 1), std::invalid_argument);
}

TEST(Contexts, DefaultCorporaAreLargeAndWellTyped) {
  for (const char* hole : {"nat", "bool", "unit", "bool * bool -> bool", "all 'a. 'a * 'a -> 'a"}) {
    const TypePtr h = compile_type(hole);
    const auto c = default_corpus(h);
    EXPECT_GE(c.size(), 50u) << hole;
    for (const auto& e : c.entries) ASSERT_TRUE(type_equal(check_context(e.context, h), e.result)) << hole;
  }
}

TEST(Contexts, DiscriminatorIsInTheCorpus) {
  const TypePtr hole = compile_type("bool * bool -> bool");
  const EvalContext e = compile_context(support::sample("E.ctx"), hole).first;
  const EvalContext e2 = compile_context(support::sample("E-prime.ctx"), hole).first;
  const auto c = default_corpus(hole);
  auto contains = [&](const EvalContext& x) {
    return std::any_of(c.entries.begin(), c.entries.end(),
                       [&](const ContextEntry& en) { return context_eq(en.context, x); });
  };
  EXPECT_TRUE(contains(e));
  EXPECT_TRUE(contains(e2));
}

TEST(Ciu, ChoiceOrderIsIrrelevant) {
  VerdictCache cache;
  for (Mode m : {Mode::May, Mode::Must}) {
    const auto r = ciu_equiv(core("0 or 1"), core("1 or 0"), m, nat_corpus(), cache);
    EXPECT_TRUE(r.holds()) << to_string(m);
  }
}

TEST(Ciu, MayAddsBehaviourMustRemovesIt) {
  VerdictCache cache;
  const TermPtr zero = core("0"), either = core("0 or 1");
  EXPECT_TRUE(ciu_leq(zero, either, Mode::May, nat_corpus(), cache).holds());
  const auto back = ciu_leq(either, zero, Mode::May, nat_corpus(), cache);
  ASSERT_TRUE(back.counterexample());
  EXPECT_TRUE(ciu_leq(either, zero, Mode::Must, nat_corpus(), cache).holds());
  EXPECT_TRUE(ciu_leq(zero, either, Mode::Must, nat_corpus(), cache).counterexample());
}

TEST(Ciu, CounterexamplesReplay) {
  VerdictCache cache;
  const TermPtr l = core("0 or 1"), r = core("0");
  const auto out = ciu_leq(l, r, Mode::May, nat_corpus(), cache);
  ASSERT_TRUE(out.counterexample());
  ASSERT_TRUE(out.context_index.has_value());
  EXPECT_TRUE(context_eq(out.context, nat_corpus().entries[*out.context_index].context));
  const auto left = may_converges(plug(out.context, l), cache.budget());
  const auto right = may_converges(plug(out.context, r), cache.budget());
  ASSERT_EQ(left.tag, MayTag::Converges);
  EXPECT_TRUE(replay_path(left.witness));
  ASSERT_EQ(right.tag, MayTag::DivergesCertified);
  EXPECT_TRUE(replay_cycle(right.witness));
  // It is the lowest-index violating site.
  for (std::size_t i = 0; i < *out.context_index; ++i) {
    const auto& ctx = nat_corpus().entries[i].context;
    EXPECT_FALSE(cache.get(plug(ctx, l), Mode::May).positive && cache.get(plug(ctx, r), Mode::May).negative);
  }
}

TEST(Ciu, TypeMismatchThrows) {
  VerdictCache cache;
  EXPECT_THROW(ciu_leq(core("0"), core("true"), Mode::May, nat_corpus(), cache), TypeError);
  EXPECT_THROW(ciu_leq(core("true"), core("false"), Mode::May, nat_corpus(), cache), TypeError);
}

TEST(Ciu, StarvedBudgetIsInconclusive) {
  Budget tiny;
  tiny.fuel = 2;
  VerdictCache cache(tiny);
  const auto r = ciu_leq(core("(fun (x : nat) => x) (0 or 1)"), core("1 or 0"), Mode::Must, nat_corpus(), cache);
  EXPECT_EQ(r.tag, CiuOutcome::Tag::Inconclusive);
  EXPECT_FALSE(r.unknown_sites.empty());
}

TEST(Ciu, PreorderProperties) {
  VerdictCache cache;
  const std::vector<TermPtr> terms = {core("0"), core("1"), core("0 or 1"), core("omega[nat]"), core("0 or omega[nat]")};
  for (Mode m : {Mode::May, Mode::Must}) {
    for (const auto& a : terms) EXPECT_TRUE(ciu_leq(a, a, m, nat_corpus(), cache).holds());
    for (const auto& a : terms)
      for (const auto& b : terms)
        for (const auto& c : terms) {
          if (ciu_leq(a, b, m, nat_corpus(), cache).holds() && ciu_leq(b, c, m, nat_corpus(), cache).holds())
            EXPECT_FALSE(ciu_leq(a, c, m, nat_corpus(), cache).counterexample())
                << pretty(a) << " / " << pretty(b) << " / " << pretty(c);
        }
  }
}

TEST(Ciu, LargerCorporaOnlyFindMoreCounterexamples) {
  VerdictCache cache;
  const auto shallow = default_corpus(ty::nat(), 1, 0);
  const auto deep = default_corpus(ty::nat(), 2, 0);
  ASSERT_LT(shallow.size(), deep.size());
  const std::vector<TermPtr> terms = {core("0"), core("0 or 1"), core("omega[nat]"), core("1 or omega[nat]")};
  for (Mode m : {Mode::May, Mode::Must})
    for (const auto& a : terms)
      for (const auto& b : terms)
        if (ciu_leq(a, b, m, shallow, cache).counterexample())
          EXPECT_TRUE(ciu_leq(a, b, m, deep, cache).counterexample());
}

TEST(Ciu, OpenTermsAreClosedByInstantiation) {
  VerdictCache cache;
  // x : nat ⊢ x or x ≅ x
  const TermPtr a = tm::app(core("fun (p : nat) => p"), tm::var(0));
  const TermPtr lhs = core("fun (y : nat) => y or y");
  const TermPtr open_lhs = tm::app(lhs, tm::var(0));
  for (Mode m : {Mode::May, Mode::Must}) {
    EXPECT_TRUE(ciu_leq_open(open_lhs, a, 0, {ty::nat()}, m, 2, cache).holds());
    EXPECT_TRUE(ciu_leq_open(a, open_lhs, 0, {ty::nat()}, m, 2, cache).holds());
  }
  // ∀'a. x : 'a ⊢ x ≲ x
  const TermPtr id = tm::app(tm::lam(ty::var(0), tm::var(0)), tm::var(0));
  EXPECT_TRUE(ciu_leq_open(id, tm::var(0), 1, {ty::var(0)}, Mode::Must, 1, cache).holds());
}

TEST(Ciu, ParallelismDoesNotChangeOutcomes) {
  Budget four;
  four.jobs = 4;
  VerdictCache serial, parallel(four);
  const auto corpus = default_corpus(compile_type("bool * bool -> bool"));
  const TermPtr e = core(support::sample("e.nd")), e2 = core(support::sample("e-prime.nd"));
  for (Mode m : {Mode::May, Mode::Must}) {
    const auto a = ciu_leq(e, e2, m, corpus, serial);
    const auto b = ciu_leq(e, e2, m, corpus, parallel);
    EXPECT_EQ(a.tag, b.tag);
    EXPECT_EQ(a.context_index, b.context_index);
    EXPECT_EQ(a.unknown_sites, b.unknown_sites);
  }
}

TEST(Laws, AllCellsPass) {
  const auto report = run_law_suite();
  ASSERT_EQ(report.cells.size(), 12u);
  for (const auto& cell : report.cells) {
    EXPECT_TRUE(cell.passed()) << cell.id << ": " << cell.statement;
    std::set<std::string> instances;
    for (const auto& c : cell.checks) instances.insert(c.lhs);
    EXPECT_GE(instances.size(), 3u) << cell.id;
    EXPECT_GE(cell.min_contexts, 50u) << cell.id;
    if (cell.strict()) {
      const bool witnessed = std::any_of(cell.converse_checks.begin(), cell.converse_checks.end(),
                                         [](const LawInstanceResult& r) { return r.outcome.counterexample(); });
      EXPECT_TRUE(witnessed) << cell.id;
    }
  }
  EXPECT_TRUE(report.all_passed());
}

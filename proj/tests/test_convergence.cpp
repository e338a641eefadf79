#include <gtest/gtest.h>

#include "ndlam/convergence.hpp"
#include "ndlam/print.hpp"
#include "ndlam/surface.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"
#include "support/rank_oracle.hpp"

using namespace ndlam;

namespace {

TermPtr core(const std::string& src) { return compile(src).term; }

Budget small(std::size_t fuel = 200, std::size_t k = 3) {
  Budget b;
  b.fuel = fuel;
  b.choice_bound = k;
  return b;
}

}  // namespace

TEST(May, ValuesAndChoices) {
  const auto v = may_converges(core("0 or omega[nat]"), {});
  ASSERT_EQ(v.tag, MayTag::Converges);
  EXPECT_TRUE(replay_path(v.witness));
  EXPECT_TRUE(is_value(v.witness.back().target));
  EXPECT_EQ(may_converges(tm::numeral(0), {}).tag, MayTag::Converges);
  EXPECT_TRUE(may_converges(tm::numeral(0), {}).witness.empty());
}

TEST(May, OmegaIsCertifiedDivergent) {
  const auto v = may_converges(core("omega[nat]"), {});
  ASSERT_EQ(v.tag, MayTag::DivergesCertified);
  EXPECT_TRUE(replay_cycle(v.witness));
}

TEST(May, ChoiceIntoOmegaOnEveryBranchDiverges) {
  const auto v = may_converges(core("ifz ? then omega[nat] else omega[nat]"), {});
  EXPECT_EQ(v.tag, MayTag::DivergesCertified);
}

TEST(May, WithinCountsUnfoldFoldSteps) {
  const TermPtr e = core("0 or 1");
  EXPECT_EQ(may_converges_within(e, 0, {}).tag, MayTag::DivergesCertified);
  const auto one = may_converges_within(e, 1, {});
  ASSERT_EQ(one.tag, MayTag::Converges);
  EXPECT_EQ(one.unfold_count, 1u);
  EXPECT_TRUE(replay_path(one.witness));
  EXPECT_EQ(may_converges_within(tm::numeral(4), 0, {}).tag, MayTag::Converges);
}

TEST(Must, RanksAndRefutations) {
  auto v = must_converges(core("0 or 1"), {});
  ASSERT_EQ(v.tag, MustTag::MustConverges);
  EXPECT_TRUE(v.exact);
  EXPECT_EQ(v.rank, 1u);

  v = must_converges(core("0 or omega[nat]"), {});
  ASSERT_EQ(v.tag, MustTag::Refuted);
  EXPECT_TRUE(replay_cycle(v.witness));

  v = must_converges(tm::numeral(3), {});
  EXPECT_EQ(v.tag, MustTag::MustConverges);
  EXPECT_EQ(v.rank, 0u);
}

TEST(Must, ChoiceScrutinisedDeeplyIsInexact) {
  // Peeling more layers of ? than K leaves the probe stuck.
  const auto v = must_converges(core("ifz ? then 0 else ifz ? then 1 else 2"), small(200, 1));
  EXPECT_EQ(v.tag, MustTag::MustConverges);
  const auto deep = must_converges(
      core("let n = ? in case n of in1 u => 0 | in2 m => case m of in1 u => 1 | in2 k => case k of in1 u => 2 | in2 j => 3"),
      small(200, 1));
  EXPECT_EQ(deep.tag, MustTag::MustConverges);
  EXPECT_FALSE(deep.exact);
  const auto wide = must_converges(
      core("let n = ? in case n of in1 u => 0 | in2 m => case m of in1 u => 1 | in2 k => case k of in1 u => 2 | in2 j => 3"),
      small(200, 3));
  EXPECT_TRUE(wide.exact);
  EXPECT_EQ(wide.rank, 3u);
}

TEST(Must, FuelExhaustionIsUnknown) {
  const auto v = must_converges(core("0 or 1"), small(2, 8));
  EXPECT_EQ(v.tag, MustTag::Unknown);
  EXPECT_FALSE(v.reason.empty());
}

TEST(Must, GrowingTermsAreNeverRefuted) {
  // Unbounded growth: each unfolding yields a larger term, so no cycle exists.
  const TermPtr grow = core(
      "fix[nat][nat] (fun (g : nat -> nat) (n : nat) => g (in2[nat] n)) 0");
  const auto v = must_converges(grow, small(200, 3));
  EXPECT_EQ(v.tag, MustTag::Unknown);
  EXPECT_EQ(may_converges(grow, small(200, 3)).tag, MayTag::Unknown);
}

TEST(Tree, ChoiceCertification) {
  // The continuation ignores the numeral: certified.
  EvalContext ignore = EvalContext{}.then(core("fun (x : nat) => ()"));
  EXPECT_TRUE(certify_choice(ignore, 2, 100));
  // Peels three layers: not certified at K = 1.
  EvalContext peel = EvalContext{}.then(core("fun (x : nat) => case x of in1 u => 0 | in2 m => case m of in1 u => 1 | in2 k => case k of in1 u => 2 | in2 j => 3"));
  EXPECT_FALSE(certify_choice(peel, 1, 100));
  EXPECT_TRUE(certify_choice(peel, 3, 100));
}

TEST(Tree, NoMultiSuccessorNonChoiceNodes) {
  support::TermGenerator gen(21);
  std::size_t nodes = 0;
  for (int i = 0; i < 300; ++i) {
    const auto tree = explore(gen.term(3), small(60, 3));
    for (const auto& n : tree.nodes) {
      ++nodes;
      if (!n.expanded) continue;
      const bool choice = locate_redex(n.term)->term->kind == TermKind::Choice;
      if (!choice) {
        ASSERT_EQ(n.edges.size(), 1u) << pretty(n.term);
      } else {
        ASSERT_EQ(n.edges.size(), 4u);
        ASSERT_TRUE(n.certified_choice != n.truncated_choice);
      }
    }
  }
  EXPECT_GT(nodes, 1000u);
}

TEST(Tree, PostOrderVisitsChildrenFirst) {
  const auto tree = explore(core("(0 or 1) or (2 or 3)"), {});
  ASSERT_FALSE(tree.has_cycle);
  std::vector<std::size_t> pos(tree.nodes.size());
  for (std::size_t i = 0; i < tree.post_order.size(); ++i) pos[tree.post_order[i]] = i;
  for (std::size_t u = 0; u < tree.nodes.size(); ++u)
    for (const auto& e : tree.nodes[u].edges) EXPECT_LT(pos[e.target], pos[u]);
  EXPECT_EQ(tree.value_count(), 4u);
}

TEST(Tree, DedupDoesNotChangeVerdicts) {
  support::TermGenerator gen(22);
  Budget shared = small(80, 2), plain = small(80, 2);
  plain.dedup = false;
  plain.memo_limit = 20000;
  for (int i = 0; i < 200; ++i) {
    const TermPtr e = gen.term(3);
    const auto a = must_converges(e, shared);
    const auto b = must_converges(e, plain);
    if (a.tag == MustTag::Unknown || b.tag == MustTag::Unknown) continue;
    ASSERT_EQ(a.tag, b.tag) << pretty(e);
    if (a.tag == MustTag::MustConverges) ASSERT_EQ(a.rank, b.rank) << pretty(e);
    ASSERT_EQ(may_converges(e, shared).tag, may_converges(e, plain).tag) << pretty(e);
  }
}

TEST(Tree, MoreFuelNeverRetractsExactVerdicts) {
  support::TermGenerator gen(23);
  for (int i = 0; i < 200; ++i) {
    const TermPtr e = gen.term(3);
    const auto lo = must_converges(e, small(40, 2));
    const auto hi = must_converges(e, small(160, 2));
    if (lo.tag != MustTag::Unknown) {
      ASSERT_EQ(lo.tag, hi.tag) << pretty(e);
      ASSERT_EQ(lo.rank, hi.rank);
    }
    const auto mlo = may_converges(e, small(40, 2));
    if (mlo.exact()) ASSERT_EQ(mlo.tag, may_converges(e, small(160, 2)).tag) << pretty(e);
  }
}

TEST(Tree, ParallelExpansionIsDeterministic) {
  support::TermGenerator gen(24);
  Budget one = small(100, 4), four = small(100, 4);
  four.jobs = 4;
  for (int i = 0; i < 100; ++i) {
    const TermPtr e = gen.term(4);
    const auto a = explore(e, one);
    const auto b = explore(e, four);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t n = 0; n < a.nodes.size(); ++n) {
      ASSERT_TRUE(term_eq(a.nodes[n].term, b.nodes[n].term));
      ASSERT_EQ(a.nodes[n].edges.size(), b.nodes[n].edges.size());
    }
    ASSERT_EQ(a.post_order, b.post_order);
  }
}

TEST(Rank, AgreesWithLiteralRecursion) {
  support::TermGenerator gen(25);
  support::RankOracle oracle(2, 200000);
  std::size_t agreed = 0, positive = 0;
  for (int i = 0; i < 2000 && agreed < 300; ++i) {
    const TermPtr e = gen.term(3);
    const auto tree = explore(e, small(200, 2));
    const auto r = must_rank(tree);
    if (!r) continue;
    const auto o = oracle.rank(e);
    if (!o) continue;
    ASSERT_EQ(*r, *o) << pretty(e);
    ++agreed;
    if (*r > 0) ++positive;
  }
  EXPECT_GE(agreed, 100u);
  EXPECT_GE(positive, 20u);
}

TEST(Rank, HandPickedTerms) {
  support::RankOracle oracle(8, 1000000);
  for (const char* src : {"0", "0 or 1", "(0 or 1) or (2 or 3)", "ifz ? then 0 else 1",
                          "fix[nat][nat] (fun (g : nat -> nat) (n : nat) => case n of in1 u => 0 | in2 m => g m) 3"}) {
    const TermPtr e = core(src);
    const auto r = must_rank(explore(e, {}));
    ASSERT_TRUE(r.has_value()) << src;
    EXPECT_EQ(r, oracle.rank(e)) << src;
  }
}

TEST(Samples, VerdictsOnTheCorpus) {
  EXPECT_EQ(may_converges(core(support::sample("or.nd")), {}).tag, MayTag::Converges);
  EXPECT_EQ(must_converges(core(support::sample("or.nd")), {}).tag, MustTag::MustConverges);
  EXPECT_EQ(must_converges(core(support::sample("omega-nat.nd")), {}).tag, MustTag::Refuted);
  EXPECT_EQ(may_converges(core(support::sample("omega-nat.nd")), {}).tag, MayTag::DivergesCertified);
}

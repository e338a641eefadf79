// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <string>

#include "ndlam/demos.hpp"
#include "support/files.hpp"
#include "support/generator.hpp"
#include "support/rank_oracle.hpp"

using namespace ndlam;

namespace {

struct Result {
  bool ok = false;
  std::string detail;
};

TermPtr core(const std::string& src) { return compile(src).term; }

Result samples_typecheck() {
  std::size_t matched = 0, rows = 0;
  std::string bad;
  for (const auto& [file, type] : support::expected_types()) {
    ++rows;
    const std::string text = support::sample(file);
    TypePtr got;
    if (file.ends_with(".ctx"))
      got = compile_context(text, compile_type(support::hole_of(text))).second;
    else
      got = compile(text).type;
    if (type_equal(got, compile_type(type)))
      ++matched;
    else
      bad += " " + file;
  }
  const std::string fix = pretty(compile(support::sample("fix.nd")).type);
  const bool fix_ok = fix == "∀'a.∀'b.(('a->'b)->('a->'b))->('a->'b)";
  std::size_t mutants = 0, rejected = 0;
  for (const auto& entry : std::filesystem::directory_iterator(support::sample_path("ill-typed"))) {
    ++mutants;
    try {
      compile(support::read_text(entry.path().string()));
    } catch (const TypeError&) {
      ++rejected;
    } catch (const DesugarError&) {
      ++rejected;
    }
  }
  return {matched == rows && fix_ok && rejected == mutants && rejected >= 10,
          std::to_string(matched) + "/" + std::to_string(rows) + " samples, fix : " + fix + ", " +
              std::to_string(rejected) + "/" + std::to_string(mutants) + " mutants rejected" + bad};
}

Result preservation_progress() {
  std::vector<TermPtr> terms;
  support::TermGenerator gen(2);
  for (int i = 0; i < 1000; ++i) terms.push_back(gen.term(4));
  std::size_t corpus = 0;
  for (const auto& [file, type] : support::expected_types())
    if (!file.ends_with(".ctx")) {
      terms.push_back(core(support::sample(file)));
      ++corpus;
    }
  std::size_t steps = 0, i = 0;
  for (const auto& e : terms) {
    const TypePtr t = infer(e);
    const auto path = trace(e, 100, random_policy(i++, 8));
    for (const auto& s : path) {
      ++steps;
      if (!type_equal(infer(s.target), t)) return {false, "type changed: " + pretty(s.source)};
    }
    const TermPtr last = path.empty() ? e : path.back().target;
    if (!is_value(last) && step_successors(last, 8).steps.empty()) return {false, "stuck: " + pretty(last)};
  }
  return {true, std::to_string(terms.size() - corpus) + " generated + " + std::to_string(corpus) + " corpus terms, " +
                    std::to_string(steps) + " steps checked"};
}

Result law_suite() {
  const auto report = run_law_suite();
  std::size_t ok = 0, min_ctx = std::numeric_limits<std::size_t>::max(), min_inst = 1000;
  for (const auto& c : report.cells) {
    std::set<std::string> inst;
    for (const auto& r : c.checks) inst.insert(r.lhs);
    min_inst = std::min(min_inst, inst.size());
    min_ctx = std::min(min_ctx, c.min_contexts);
    if (c.passed()) ++ok;
  }
  return {report.cells.size() == 12 && ok == 12 && min_inst >= 3 && min_ctx >= 50,
          std::to_string(ok) + "/12 cells, >= " + std::to_string(min_inst) + " instances, >= " +
              std::to_string(min_ctx) + " contexts per type"};
}

Result from_report(const DemoReport& r) {
  std::string failed;
  for (const auto& c : r.checks)
    if (!c.ok) failed += "; failed: " + c.name + " (" + c.detail + ")";
  return {r.passed(), std::to_string(r.checks.size()) + " checks" + failed};
}

Result nonextensionality() { return from_report(demo_nonextensionality()); }

Result rank_oracle() {
  support::TermGenerator gen(5);
  support::RankOracle oracle(2, 200000);
  Budget b;
  b.choice_bound = 2;
  std::size_t agreed = 0, positive = 0;
  for (int i = 0; i < 3000 && agreed < 200; ++i) {
    const TermPtr e = gen.term(3);
    const auto r = must_rank(explore(e, b));
    if (!r) continue;
    const auto o = oracle.rank(e);
    if (!o) continue;
    if (*r != *o) return {false, "mismatch on " + pretty(e)};
    ++agreed;
    if (*r > 0) ++positive;
  }
  return {agreed >= 100, std::to_string(agreed) + " terms agree (" + std::to_string(positive) + " with rank > 0)"};
}

Result fix_demo() {
  std::size_t ok = 0, total = 0;
  std::string failed;
  for (const auto& fn : default_functionals()) {
    ++total;
    const auto r = demo_fix(fn);
    if (r.passed())
      ++ok;
    else
      failed += "; " + fn.source + from_report(r).detail;
  }
  return {ok == total && ok >= 3, std::to_string(ok) + "/" + std::to_string(total) + " functionals" + failed};
}

Result minimal_invariance() {
  const auto samples = minimal_invariance_samples();
  const auto r = demo_minimal_invariance(samples);
  auto out = from_report(r);
  out.ok = out.ok && samples.size() >= 5;
  out.detail = std::to_string(samples.size()) + " samples, " + out.detail;
  return out;
}

Result classifier() {
  std::set<Clause> clauses;
  bool own = true;
  for (const auto& [clause, src] : selector_representatives()) {
    const auto c = demo_parametricity(core(src));
    clauses.insert(c.clause);
    own = own && c.clause == clause && c.report.passed();
  }
  std::size_t separated = 0;
  for (const auto& src : noncanonical_selectors()) {
    const TermPtr v = core(src);
    const auto c = demo_parametricity(v);
    if (!c.hypothesis && distinguish_from_representatives(v).passed()) ++separated;
  }
  return {own && clauses.size() == 5 && separated == noncanonical_selectors().size(),
          std::to_string(clauses.size()) + " distinct clauses, " + std::to_string(separated) +
              " non-canonical values separated from all representatives"};
}

Result engine_invariants() {
  support::TermGenerator gen(9);
  Budget b;
  b.fuel = 60;
  b.choice_bound = 3;
  std::size_t multi = 0, nodes = 0, partition_bad = 0, steps = 0;
  for (int i = 0; i < 300; ++i) {
    const auto tree = explore(gen.term(3), b);
    for (const auto& n : tree.nodes) {
      if (!n.expanded) continue;
      ++nodes;
      const TermKind redex = locate_redex(n.term)->term->kind;
      if (redex != TermKind::Choice && n.edges.size() != 1) ++multi;
      for (const auto& e : n.edges) {
        ++steps;
        const bool fits = (e.kind.tag == StepTag::UnfoldFold && redex == TermKind::Case) ||
                          (e.kind.tag == StepTag::Choice && redex == TermKind::Choice) ||
                          (e.kind.tag == StepTag::Other && redex != TermKind::Case && redex != TermKind::Choice);
        if (!fits) ++partition_bad;
      }
    }
  }
  std::mt19937_64 rng(9);
  std::size_t congruent = 0, contexts = 0;
  const auto& pool = support::TermGenerator::type_pool();
  for (int i = 0; i < 400; ++i) {
    const TypePtr t = gen.any_type();
    const TermPtr e = gen.term(t, 4);
    if (is_value(e)) continue;
    EvalContext ctx;
    TypePtr running = t;
    for (std::size_t f = 0, n = 1 + rng() % 3; f < n; ++f) {
      const TypePtr out = pool[rng() % pool.size()];
      const TermPtr frame = tm::lam(running, tm::app(tm::lam(running, gen.term(out, 2)), tm::var(0)));
      ctx = ctx.then(frame);
      running = out;
    }
    ++contexts;
    const auto inner = step_successors(e, 3);
    const auto outer = step_successors(plug(ctx, e), 3);
    bool same = inner.steps.size() == outer.steps.size();
    for (std::size_t k = 0; same && k < inner.steps.size(); ++k)
      same = inner.steps[k].kind == outer.steps[k].kind &&
             term_eq(plug(ctx, inner.steps[k].target), outer.steps[k].target);
    if (same) ++congruent;
  }
  return {multi == 0 && partition_bad == 0 && congruent == contexts && contexts >= 100,
          std::to_string(multi) + " multi-successor non-choice nodes of " + std::to_string(nodes) + ", " +
              std::to_string(partition_bad) + " mis-kinded of " + std::to_string(steps) + " steps, " +
              std::to_string(congruent) + "/" + std::to_string(contexts) + " random contexts congruent"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"samples typecheck, fix type, ill-typed mutants rejected", samples_typecheck},
      {"preservation and progress", preservation_progress},
      {"law suite", law_suite},
      {"non-extensionality", nonextensionality},
      {"must rank matches the recursive definition", rank_oracle},
      {"fix demo", fix_demo},
      {"minimal invariance", minimal_invariance},
      {"parametricity classifier", classifier},
      {"engine invariants", engine_invariants},
  };
  bool all = true;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && r.ok;
    std::cout << (r.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " (" << r.detail
              << ", " << std::fixed << std::setprecision(1) << secs << "s)" << std::endl;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (all ? "all criteria pass" : "some criteria fail") << " in " << std::fixed << std::setprecision(1)
            << total << "s" << std::endl;
  return all ? 0 : 1;
}

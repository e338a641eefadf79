// Command-line front end.
//
// Exit codes: 0 pass / holds, 1 counterexample or refutation, 2 inconclusive,
// 3 parse or type error, 64 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndlam/convergence.hpp"
#include "ndlam/demos.hpp"
#include "ndlam/equivalence.hpp"
#include "ndlam/print.hpp"
#include "ndlam/reduction.hpp"
#include "ndlam/surface.hpp"
#include "ndlam/typing.hpp"

namespace {

using json = nlohmann::json;
using namespace ndlam;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_unknown = 2;
constexpr int exit_input = 3;
constexpr int exit_usage = 64;

struct Options {
  std::size_t fuel = 500;
  std::size_t choice_bound = 8;
  std::size_t depth = 2;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  bool json = false;
  std::string policy = "first";
  std::string mode = "both";

  Budget budget() const {
    Budget b;
    b.fuel = fuel;
    b.choice_bound = choice_bound;
    b.jobs = jobs;
    return b;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A `.ctx` file names its hole type on the first line: `// hole: <type>`.
std::optional<std::string> hole_header(const std::string& text) {
  const std::string tag = "// hole:";
  if (text.rfind(tag, 0) != 0) return std::nullopt;
  const auto end = text.find('\n');
  return text.substr(tag.size(), end == std::string::npos ? std::string::npos : end - tag.size());
}

json budget_json(const Budget& b) { return {{"fuel", b.fuel}, {"choice_bound", b.choice_bound}}; }

json steps_json(const std::vector<Step>& steps) {
  json out = json::array();
  for (const auto& s : steps) out.push_back({{"kind", to_string(s.kind)}, {"term", pretty(s.target)}});
  return out;
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

int max_code(int a, int b) {
  // Failures dominate unknowns.
  if (a == exit_fail || b == exit_fail) return exit_fail;
  return std::max(a, b);
}

int cmd_check(const std::string& file, const Options& o) {
  const std::string text = read_file(file);
  if (auto hole = hole_header(text)) {
    const TypePtr h = compile_type(*hole);
    auto [ctx, result] = compile_context(text, h);
    if (o.json)
      emit({{"context", pretty(ctx)}, {"hole", pretty(h)}, {"type", pretty(result)}});
    else
      std::cout << pretty(h) << " => " << pretty(result) << '\n';
    return exit_pass;
  }
  const auto el = compile(text);
  if (o.json)
    emit({{"term", pretty(el.term)}, {"type", pretty(el.type)}});
  else
    std::cout << pretty(el.type) << '\n';
  return exit_pass;
}

int cmd_run(const std::string& file, const Options& o) {
  const TermPtr e = compile(read_file(file)).term;
  ChoicePolicy policy;
  if (o.policy == "first")
    policy = fixed_policy(0);
  else if (o.policy == "random")
    policy = random_policy(o.seed, o.choice_bound);
  else
    policy = stream_policy(std::cin);
  const auto path = trace(e, o.fuel, policy);
  const TermPtr last = path.empty() ? e : path.back().target;
  const bool value = is_value(last);
  const PathClass cls = classify_path(path);
  if (o.json) {
    emit({{"term", pretty(e)},
          {"steps", steps_json(path)},
          {"value", value},
          {"result", pretty(last)},
          {"unfold_fold", cls.unfold_count},
          {"choices", cls.choice_count}});
  } else {
    for (const auto& s : path) std::cout << "  --" << to_string(s.kind) << "--> " << pretty(s.target) << '\n';
    std::cout << (value ? "value: " : "stopped after fuel: ") << pretty(last) << '\n'
              << path.size() << " steps, " << cls.unfold_count << " unfold-fold, " << cls.choice_count
              << " choices\n";
  }
  return value ? exit_pass : exit_unknown;
}

int cmd_tree(const std::string& file, const Options& o) {
  const TermPtr e = compile(read_file(file)).term;
  const ReductionTree tree = explore(e, o.budget());
  if (o.json) {
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& n = tree.nodes[i];
      json edges = json::array();
      for (const auto& ed : n.edges) edges.push_back({{"to", ed.target}, {"kind", to_string(ed.kind)}, {"back", ed.back}});
      nodes.push_back({{"id", i}, {"depth", n.depth}, {"term", pretty(n.term)}, {"value", n.value}, {"edges", edges}});
    }
    emit({{"nodes", nodes}, {"complete", tree.complete()}, {"cycle", tree.has_cycle}, {"budget", budget_json(o.budget())}});
  } else {
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& n = tree.nodes[i];
      std::cout << '#' << i << " d" << n.depth << (n.value ? " value " : " ") << pretty(n.term) << '\n';
      for (const auto& ed : n.edges)
        std::cout << "    " << to_string(ed.kind) << " -> #" << ed.target << (ed.back ? " (cycle)" : "") << '\n';
    }
    std::cout << tree.nodes.size() << " nodes, " << (tree.complete() ? "complete" : "incomplete")
              << (tree.has_cycle ? ", cyclic" : "") << '\n';
  }
  return tree.complete() ? exit_pass : exit_unknown;
}

int cmd_verdict(const std::string& file, const Options& o) {
  const TermPtr e = compile(read_file(file)).term;
  const Budget b = o.budget();
  int code = exit_pass;
  if (o.mode != "must") {
    const auto v = may_converges(e, b);
    json j{{"term", pretty(e)}, {"mode", "may"}, {"verdict", to_string(v.tag)}, {"exact", v.exact()},
           {"budget", budget_json(b)}};
    if (!v.witness.empty()) j["witness"] = steps_json(v.witness);
    if (v.tag == MayTag::Unknown) j["reason"] = v.reason;
    if (o.json)
      emit(j);
    else
      std::cout << "may:  " << to_string(v.tag)
                << (v.tag == MayTag::Converges ? " (" + std::to_string(v.witness.size()) + " steps)" : "")
                << (v.exact() ? "" : " [" + v.reason + "]") << '\n';
    code = max_code(code, v.tag == MayTag::Converges ? exit_pass : v.exact() ? exit_fail : exit_unknown);
  }
  if (o.mode != "may") {
    const auto v = must_converges(e, b);
    json j{{"term", pretty(e)}, {"mode", "must"}, {"verdict", to_string(v.tag)}, {"exact", v.exact},
           {"budget", budget_json(b)}};
    if (v.tag == MustTag::MustConverges) j["rank"] = v.rank;
    if (!v.witness.empty()) j["witness"] = steps_json(v.witness);
    if (!v.reason.empty()) j["reason"] = v.reason;
    if (o.json)
      emit(j);
    else
      std::cout << "must: " << to_string(v.tag)
                << (v.tag == MustTag::MustConverges ? " rank " + std::to_string(v.rank) : "")
                << (v.tag == MustTag::Refuted ? " (cycle of " + std::to_string(v.witness.size()) + " steps)" : "")
                << (v.reason.empty() ? "" : " [" + v.reason + "]") << '\n';
    const bool pass = v.tag == MustTag::MustConverges && v.exact;
    code = max_code(code, pass ? exit_pass : v.tag == MustTag::Refuted ? exit_fail : exit_unknown);
  }
  return code;
}

int outcome_code(const CiuOutcome& r) {
  return r.holds() ? exit_pass : r.counterexample() ? exit_fail : exit_unknown;
}

int cmd_equiv(const std::string& f1, const std::string& f2, const std::string& corpus_file, bool one_way,
              const Options& o) {
  const auto a = compile(read_file(f1));
  const auto b = compile(read_file(f2));
  if (!type_equal(a.type, b.type)) throw TypeError({}, a.type, b.type, "equiv", "the two terms have different types");
  ContextCorpus corpus = default_corpus(a.type, o.depth);
  if (!corpus_file.empty()) {
    std::istringstream lines(read_file(corpus_file));
    for (std::string line; std::getline(lines, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line.rfind("//", 0) == 0) continue;
      auto [ctx, result] = compile_context(line, a.type);
      corpus.entries.push_back({ctx, result});
    }
  }
  VerdictCache cache(o.budget());
  int code = exit_pass;
  for (Mode m : {Mode::May, Mode::Must}) {
    if ((o.mode == "may" && m != Mode::May) || (o.mode == "must" && m != Mode::Must)) continue;
    for (bool forward : {true, false}) {
      if (one_way && !forward) continue;
      const auto r = forward ? ciu_leq(a.term, b.term, m, corpus, cache) : ciu_leq(b.term, a.term, m, corpus, cache);
      const std::string rel = forward ? "lhs ≲" + std::string(to_string(m)) + " rhs" : "rhs ≲" + std::string(to_string(m)) + " lhs";
      if (o.json) {
        json j{{"relation", rel}, {"mode", to_string(m)}, {"outcome", to_string(r.tag)},
               {"contexts", r.contexts_tested}, {"budget", budget_json(o.budget())}};
        if (r.counterexample())
          j["counterexample"] = {{"context", pretty(r.context)}, {"left", r.left_verdict}, {"right", r.right_verdict}};
        if (!r.unknown_sites.empty()) j["unknown_sites"] = r.unknown_sites;
        emit(j);
      } else {
        std::cout << rel << ": " << describe(r) << '\n';
      }
      code = max_code(code, outcome_code(r));
    }
  }
  return code;
}

const char* cell_status(const LawCellReport& c) {
  if (c.passed()) return "pass";
  for (const auto& k : c.checks)
    if (k.outcome.counterexample()) return "FAIL";
  return "inconclusive";
}

int cmd_laws(const Options& o) {
  const auto report = run_law_suite(o.budget(), o.depth);
  int code = exit_pass;
  for (const auto& c : report.cells) {
    std::size_t holds = 0;
    for (const auto& k : c.checks) holds += k.outcome.holds();
    std::size_t refuted = 0;
    for (const auto& k : c.converse_checks) refuted += k.outcome.counterexample();
    std::string modes;
    for (Mode m : c.modes) modes += std::string(modes.empty() ? "" : ",") + to_string(m);
    if (o.json) {
      json checks = json::array();
      for (const auto& k : c.checks)
        checks.push_back({{"lhs", k.lhs}, {"rhs", k.rhs}, {"type", k.type}, {"mode", to_string(k.mode)},
                          {"direction", k.forward ? "forward" : "backward"}, {"outcome", to_string(k.outcome.tag)},
                          {"contexts", k.outcome.contexts_tested}});
      json converse = json::array();
      for (const auto& k : c.converse_checks) {
        json j{{"lhs", k.rhs}, {"rhs", k.lhs}, {"type", k.type}, {"mode", to_string(k.mode)},
               {"outcome", to_string(k.outcome.tag)}};
        if (k.outcome.counterexample()) j["context"] = pretty(k.outcome.context);
        converse.push_back(j);
      }
      emit({{"cell", c.id}, {"law", c.statement}, {"modes", modes}, {"status", cell_status(c)},
            {"checks", checks}, {"expected_fail_converse", converse}, {"min_contexts", c.min_contexts}});
    } else {
      std::printf("%2d  %-38s %-9s %-13s %zu/%zu checks hold", c.id, c.statement.c_str(), modes.c_str(),
                  cell_status(c), holds, c.checks.size());
      if (c.strict()) std::printf(", converse refuted %zu/%zu", refuted, c.converse_checks.size());
      std::printf(", >=%zu contexts\n", c.min_contexts);
    }
    code = max_code(code, c.passed() ? exit_pass : std::string(cell_status(c)) == "FAIL" ? exit_fail : exit_unknown);
  }
  return code;
}

void print_report(const DemoReport& r, const Options& o) {
  if (o.json) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    emit({{"demo", r.title}, {"passed", r.passed()}, {"checks", checks}});
    return;
  }
  std::cout << "== " << r.title << (r.passed() ? "" : "  [FAILED]") << '\n';
  for (const auto& c : r.checks) std::cout << (c.ok ? "  ok    " : "  FAIL  ") << c.name << "\n        " << c.detail << '\n';
}

int cmd_demo(const std::string& name, const std::string& term_file, const Options& o) {
  const Budget b = o.budget();
  bool ok = true;
  auto show = [&](const DemoReport& r) {
    print_report(r, o);
    ok = ok && r.passed();
  };
  if (name == "counterexample") {
    show(demo_nonextensionality(b));
  } else if (name == "fix") {
    for (const auto& f : default_functionals()) show(demo_fix(f, b));
  } else if (name == "minimal-invariance") {
    show(demo_minimal_invariance(minimal_invariance_samples(), b));
  } else if (name == "parametricity") {
    auto classify = [&](const TermPtr& v, bool separate) {
      auto c = demo_parametricity(v, b);
      c.report.add("clause", c.clause != Clause::Unknown,
                   std::string(to_string(c.clause)) + (c.second_part.empty() ? "" : "; " + c.second_part));
      show(c.report);
      if (separate) show(distinguish_from_representatives(v, b));
    };
    if (!term_file.empty()) {
      classify(compile(read_file(term_file)).term, false);
    } else {
      for (const auto& rep : selector_representatives()) classify(compile(rep.second).term, false);
      for (const auto& src : noncanonical_selectors()) classify(compile(src).term, true);
    }
  } else {
    std::cerr << "unknown demo: " << name << " (counterexample, fix, minimal-invariance, parametricity)\n";
    return exit_usage;
  }
  return ok ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ndlam: typed lambda calculus with countable nondeterminism"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--fuel", o.fuel, "maximum path length in steps")->check(CLI::PositiveNumber);
    sub->add_option("--choice-bound", o.choice_bound, "fan-out bound K for ?")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--json", o.json, "line-delimited JSON output");
  };
  std::string file, file2, corpus_file, demo_name, term_file;
  bool one_way = false;

  auto* check = app.add_subcommand("check", "print the type of a program or context");
  check->add_option("file", file)->required();
  common(check);

  auto* run = app.add_subcommand("run", "follow one reduction path");
  run->add_option("file", file)->required();
  run->add_option("--policy", o.policy, "choice policy")->check(CLI::IsMember({"first", "random", "ask"}));
  run->add_option("--seed", o.seed, "seed for the random policy");
  common(run);

  auto* tree = app.add_subcommand("tree", "explore the reduction graph");
  tree->add_option("file", file)->required();
  common(tree);

  auto* verdict = app.add_subcommand("verdict", "may/must convergence");
  verdict->add_option("file", file)->required();
  verdict->add_option("--mode", o.mode)->check(CLI::IsMember({"may", "must", "both"}));
  common(verdict);

  auto* equiv = app.add_subcommand("equiv", "bounded CIU comparison of two programs");
  equiv->add_option("lhs", file)->required();
  equiv->add_option("rhs", file2)->required();
  equiv->add_option("--mode", o.mode)->check(CLI::IsMember({"may", "must", "both"}));
  equiv->add_option("--depth", o.depth, "context corpus depth");
  equiv->add_option("--contexts", corpus_file, "extra contexts, one per line with []");
  equiv->add_flag("--leq", one_way, "check lhs ≲ rhs only");
  common(equiv);

  auto* laws = app.add_subcommand("laws", "run the basic may/must law table");
  laws->add_option("--depth", o.depth, "context corpus depth");
  common(laws);

  auto* demo = app.add_subcommand("demo", "counterexample | fix | minimal-invariance | parametricity");
  demo->add_option("name", demo_name)->required();
  demo->add_option("--term", term_file, "classify this value (parametricity)");
  common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return exit_usage;
  }

  try {
    if (*check) return cmd_check(file, o);
    if (*run) return cmd_run(file, o);
    if (*tree) return cmd_tree(file, o);
    if (*verdict) return cmd_verdict(file, o);
    if (*equiv) return cmd_equiv(file, file2, corpus_file, one_way, o);
    if (*laws) return cmd_laws(o);
    if (*demo) return cmd_demo(demo_name, term_file, o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return exit_input;
  } catch (const DesugarError& e) {
    std::cerr << e.kind() << " error: " << e.what() << '\n';
    return exit_input;
  } catch (const TypeError& e) {
    std::cerr << "type error (" << e.rule() << "): " << e.what() << '\n';
    return exit_input;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << '\n';
    return exit_input;
  }
  return exit_usage;
}

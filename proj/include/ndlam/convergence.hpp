#pragma once

// Bounded exploration of the reduction graph and the may/must verdicts built
// on it.
//
// Exploration is breadth-first, so every node is first reached at its minimal
// depth and parent pointers give shortest witnesses. A node at depth == fuel is
// not expanded (fuel cut). A `?` node fans out to 0..K; the fan-out counts as
// complete when the symbolic probe below shows that every n >= K behaves like
// n = K.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ndlam/reduction.hpp"
#include "ndlam/syntax.hpp"

namespace ndlam {

struct Budget {
  std::size_t fuel = 500;           // max path length in steps
  std::size_t choice_bound = 8;     // K: `?` fans out to 0..K
  bool dedup = true;                // share alpha-equal terms across the whole graph
  std::size_t memo_limit = 100000;  // node cap; exceeding it aborts exploration
  std::size_t jobs = 1;             // worker threads for expanding a BFS layer
};

struct TreeEdge {
  std::size_t target;
  StepKind kind;
  bool back = false;  // closes a cycle (target is on the DFS stack)
};

struct TreeNode {
  TermPtr term;
  std::size_t depth = 0;
  std::optional<std::size_t> parent;  // BFS tree parent
  StepKind via;                       // kind of the edge from parent
  std::vector<TreeEdge> edges;
  bool value = false;
  bool expanded = false;
  bool fuel_cut = false;
  bool truncated_choice = false;  // `?` node whose fan-out could not be certified complete
  bool certified_choice = false;  // `?` node whose fan-out 0..K covers every n
  bool cycle_backedge = false;    // has an outgoing back edge
};

struct ReductionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  Budget budget;
  bool aborted = false;        // memo_limit exceeded
  bool stopped_early = false;  // exploration halted at the first value
  bool any_fuel_cut = false;
  bool any_truncated = false;
  bool has_cycle = false;
  std::vector<std::size_t> cycle_path;  // root .. X .. X when has_cycle
  std::vector<std::size_t> post_order;  // DFS post-order over reachable nodes

  /// Every reachable node expanded within fuel, every `?` fan-out certified.
  bool complete() const { return !aborted && !stopped_early && !any_fuel_cut && !any_truncated; }

  std::size_t value_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.value; }));
  }

  /// Steps along BFS parent pointers from the root to `node`.
  std::vector<Step> path_to(std::size_t node) const {
    std::vector<Step> rev;
    std::size_t cur = node;
    while (nodes[cur].parent) {
      const std::size_t p = *nodes[cur].parent;
      rev.push_back(Step{nodes[p].term, nodes[cur].term, nodes[cur].via});
      cur = p;
    }
    return {rev.rbegin(), rev.rend()};
  }

  /// Steps along an explicit node sequence, using the edge kinds between consecutive nodes.
  std::vector<Step> steps_along(const std::vector<std::size_t>& seq) const {
    std::vector<Step> out;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const auto& from = nodes[seq[i - 1]];
      auto it = std::find_if(from.edges.begin(), from.edges.end(),
                             [&](const TreeEdge& e) { return e.target == seq[i]; });
      if (it == from.edges.end()) throw InternalFault("node sequence is not a path");
      out.push_back(Step{from.term, nodes[seq[i]].term, it->kind});
    }
    return out;
  }
};

/// Runs the continuation of a `?` redex on the symbolic numeral in2^K(*).
/// Returns true when a choice-free path closes the term (or reaches a value)
/// without ever eliminating *: then n = K + m follows the same steps for all m.
inline bool certify_choice(const EvalContext& ctx, std::size_t bound, std::size_t fuel) {
  TermPtr probe = tm::var(0);
  for (std::size_t i = 0; i < bound; ++i) probe = tm::inj(2, probe, ty::nat());
  TermPtr cur = plug(ctx, probe);
  for (std::size_t i = 0; i <= fuel; ++i) {
    if (cur->free_terms == 0 || is_value(cur)) return true;
    auto redex = locate_redex(cur);
    if (!redex || redex->term->kind == TermKind::Choice) return false;
    auto c = contract(redex->term);
    if (!c) return false;
    cur = plug(redex->context, c->target);
  }
  return false;
}

namespace convergence_detail {

struct Expansion {
  Successors succ;
  bool certified = false;
};

inline Expansion expand(const TermPtr& t, const Budget& b) {
  Expansion x;
  x.succ = step_successors(t, b.choice_bound);
  if (x.succ.form == Successors::Form::ChoiceFanout) {
    auto redex = locate_redex(t);
    x.certified = certify_choice(redex->context, b.choice_bound, b.fuel);
  }
  return x;
}

inline std::vector<Expansion> expand_layer(const std::vector<TermPtr>& terms, const Budget& b) {
  std::vector<Expansion> out(terms.size());
  const std::size_t jobs = std::max<std::size_t>(1, b.jobs);
  if (jobs == 1 || terms.size() < 2 * jobs) {
    for (std::size_t i = 0; i < terms.size(); ++i) out[i] = expand(terms[i], b);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < terms.size(); i += jobs) out[i] = expand(terms[i], b);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Colours the graph from the root, marks back edges, records the first cycle
/// as root..X..X, and fills the post-order.
inline void analyse_cycles(ReductionTree& tree) {
  const std::size_t n = tree.nodes.size();
  enum : std::uint8_t { White, Grey, Black };
  std::vector<std::uint8_t> colour(n, White);
  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  std::vector<Frame> stack{{0, 0}};
  colour[0] = Grey;
  while (!stack.empty()) {
    Frame& f = stack.back();
    auto& node = tree.nodes[f.node];
    if (f.next_edge == node.edges.size()) {
      colour[f.node] = Black;
      tree.post_order.push_back(f.node);
      stack.pop_back();
      continue;
    }
    TreeEdge& e = node.edges[f.next_edge++];
    if (colour[e.target] == Grey) {
      e.back = true;
      node.cycle_backedge = true;
      if (!tree.has_cycle) {
        tree.has_cycle = true;
        for (const auto& s : stack) tree.cycle_path.push_back(s.node);
        tree.cycle_path.push_back(e.target);
      }
    } else if (colour[e.target] == White) {
      colour[e.target] = Grey;
      stack.push_back({e.target, 0});
    }
  }
}

}  // namespace convergence_detail

/// Explores the reduction graph of a closed term within the budget.
inline ReductionTree explore(const TermPtr& root, const Budget& b, bool stop_at_value = false) {
  if (b.fuel < 1) throw std::invalid_argument("fuel must be at least 1");
  ReductionTree tree;
  tree.budget = b;
  std::unordered_map<TermPtr, std::size_t, TermHash, TermEqual> index;

  TreeNode first;
  first.term = root;
  tree.nodes.push_back(std::move(first));
  if (b.dedup) index.emplace(root, 0);

  std::vector<std::size_t> layer{0};
  while (!layer.empty() && !tree.aborted && !tree.stopped_early) {
    std::vector<TermPtr> to_expand;
    std::vector<std::size_t> expand_ids;
    for (std::size_t id : layer) {
      TreeNode& node = tree.nodes[id];
      if (is_value(node.term)) {
        node.value = true;
        if (stop_at_value) tree.stopped_early = true;
      } else if (node.depth >= b.fuel) {
        node.fuel_cut = true;
        tree.any_fuel_cut = true;
      } else {
        to_expand.push_back(node.term);
        expand_ids.push_back(id);
      }
    }
    if (tree.stopped_early) break;

    auto expansions = convergence_detail::expand_layer(to_expand, b);
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < expand_ids.size() && !tree.aborted; ++k) {
      const std::size_t id = expand_ids[k];
      auto& x = expansions[k];
      tree.nodes[id].expanded = true;
      if (x.succ.form == Successors::Form::ChoiceFanout) {
        tree.nodes[id].certified_choice = x.certified;
        tree.nodes[id].truncated_choice = !x.certified;
        if (!x.certified) tree.any_truncated = true;
      }
      for (auto& step : x.succ.steps) {
        std::optional<std::size_t> target;
        if (b.dedup) {
          auto it = index.find(step.target);
          if (it != index.end()) target = it->second;
        } else {
          // Only a recurrence on the current branch counts.
          std::optional<std::size_t> cur = id;
          while (cur) {
            if (term_eq(tree.nodes[*cur].term, step.target)) {
              target = *cur;
              break;
            }
            cur = tree.nodes[*cur].parent;
          }
        }
        if (!target) {
          if (tree.nodes.size() >= b.memo_limit) {
            tree.aborted = true;
            break;
          }
          TreeNode child;
          child.term = step.target;
          child.depth = tree.nodes[id].depth + 1;
          child.parent = id;
          child.via = step.kind;
          target = tree.nodes.size();
          tree.nodes.push_back(std::move(child));
          if (b.dedup) index.emplace(step.target, *target);
          next.push_back(*target);
        }
        tree.nodes[id].edges.push_back(TreeEdge{*target, step.kind});
      }
    }
    layer = std::move(next);
  }
  // Nodes left unvisited in the last layer were never classified.
  for (auto& node : tree.nodes)
    if (!node.expanded && !node.fuel_cut && is_value(node.term)) node.value = true;

  convergence_detail::analyse_cycles(tree);
  return tree;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class MayTag { Converges, DivergesCertified, Unknown };
enum class MustTag { MustConverges, Refuted, Unknown };

inline const char* to_string(MayTag t) {
  switch (t) {
    case MayTag::Converges: return "converges";
    case MayTag::DivergesCertified: return "diverges-certified";
    case MayTag::Unknown: return "unknown";
  }
  return "?";
}
inline const char* to_string(MustTag t) {
  switch (t) {
    case MustTag::MustConverges: return "must-converges";
    case MustTag::Refuted: return "refuted";
    case MustTag::Unknown: return "unknown";
  }
  return "?";
}

struct MayVerdict {
  MayTag tag = MayTag::Unknown;
  std::vector<Step> witness;     // Converges: path to a value; DivergesCertified: root..X..X
  std::size_t unfold_count = 0;  // Converges: unfold-fold steps on the witness
  std::string reason;            // Unknown: what stopped the search
  std::size_t nodes = 0;

  bool exact() const { return tag != MayTag::Unknown; }
};

struct MustVerdict {
  MustTag tag = MustTag::Unknown;
  std::size_t rank = 0;       // MustConverges: the unfold-fold rank
  bool exact = false;         // MustConverges: the whole fan-out was certified; Refuted: always
  std::vector<Step> witness;  // Refuted: root..X..X
  std::string reason;
  std::size_t nodes = 0;
};

namespace convergence_detail {

inline std::string incompleteness(const ReductionTree& t) {
  if (t.aborted) return "node limit " + std::to_string(t.budget.memo_limit) + " exceeded";
  if (t.any_fuel_cut) return "fuel " + std::to_string(t.budget.fuel) + " exhausted on some path";
  if (t.any_truncated) return "choice fan-out truncated at K=" + std::to_string(t.budget.choice_bound);
  return "complete";
}

inline std::size_t count_unfold(const std::vector<Step>& p) { return classify_path(p).unfold_count; }

}  // namespace convergence_detail

/// e↓: some path reaches a value.
inline MayVerdict may_converges(const TermPtr& e, const Budget& b) {
  ReductionTree tree = explore(e, b, /*stop_at_value=*/true);
  MayVerdict v;
  v.nodes = tree.nodes.size();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].value) {
      v.tag = MayTag::Converges;
      v.witness = tree.path_to(i);
      v.unfold_count = convergence_detail::count_unfold(v.witness);
      return v;
    }
  }
  if (tree.complete()) {
    v.tag = MayTag::DivergesCertified;
    if (tree.has_cycle) v.witness = tree.steps_along(tree.cycle_path);
    return v;
  }
  v.reason = convergence_detail::incompleteness(tree);
  return v;
}

/// Least number of unfold-fold steps from the root to each node (0-1 BFS), with predecessors.
inline std::pair<std::vector<std::size_t>, std::vector<std::optional<std::size_t>>> unfold_distances(
    const ReductionTree& tree) {
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(tree.nodes.size(), inf);
  std::vector<std::optional<std::size_t>> pred(tree.nodes.size());
  std::deque<std::size_t> dq{0};
  dist[0] = 0;
  while (!dq.empty()) {
    const std::size_t u = dq.front();
    dq.pop_front();
    for (const auto& e : tree.nodes[u].edges) {
      const std::size_t w = e.kind.tag == StepTag::UnfoldFold ? 1 : 0;
      if (dist[u] + w < dist[e.target]) {
        dist[e.target] = dist[u] + w;
        pred[e.target] = u;
        if (w == 0)
          dq.push_front(e.target);
        else
          dq.push_back(e.target);
      }
    }
  }
  return {dist, pred};
}

/// e↓ₙ: some path reaches a value using at most n unfold-fold steps.
/// DivergesCertified here means no such path exists.
inline MayVerdict may_converges_within(const TermPtr& e, std::size_t n, const Budget& b) {
  ReductionTree tree = explore(e, b);
  MayVerdict v;
  v.nodes = tree.nodes.size();
  auto [dist, pred] = unfold_distances(tree);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i)
    if (tree.nodes[i].value && dist[i] <= n && (!best || dist[i] < dist[*best])) best = i;
  if (best) {
    std::vector<std::size_t> seq;
    for (std::optional<std::size_t> cur = *best; cur; cur = pred[*cur]) seq.push_back(*cur);
    std::reverse(seq.begin(), seq.end());
    v.tag = MayTag::Converges;
    v.witness = tree.steps_along(seq);
    v.unfold_count = dist[*best];
    return v;
  }
  if (tree.complete()) {
    v.tag = MayTag::DivergesCertified;
    v.reason = "no value within " + std::to_string(n) + " unfold-fold steps";
    return v;
  }
  v.reason = convergence_detail::incompleteness(tree);
  return v;
}

/// Maximum unfold-fold count over all paths from each node; requires an acyclic graph.
inline std::vector<std::size_t> longest_unfold(const ReductionTree& tree) {
  if (tree.has_cycle) throw InternalFault("longest_unfold on a cyclic graph");
  std::vector<std::size_t> best(tree.nodes.size(), 0);
  for (std::size_t u : tree.post_order) {
    for (const auto& e : tree.nodes[u].edges) {
      const std::size_t w = e.kind.tag == StepTag::UnfoldFold ? 1 : 0;
      best[u] = std::max(best[u], w + best[e.target]);
    }
  }
  return best;
}

/// The least β with e⇓_β, defined when the tree is complete, acyclic and all leaves are values.
inline std::optional<std::size_t> must_rank(const ReductionTree& tree) {
  if (!tree.complete() || tree.has_cycle) return std::nullopt;
  for (const auto& n : tree.nodes)
    if (n.edges.empty() && !n.value) return std::nullopt;
  return longest_unfold(tree)[0];
}

/// e⇓: every path reaches a value.
inline MustVerdict must_converges(const TermPtr& e, const Budget& b) {
  ReductionTree tree = explore(e, b);
  MustVerdict v;
  v.nodes = tree.nodes.size();
  if (tree.has_cycle) {
    v.tag = MustTag::Refuted;
    v.exact = true;
    v.witness = tree.steps_along(tree.cycle_path);
    return v;
  }
  if (tree.aborted || tree.any_fuel_cut) {
    v.reason = convergence_detail::incompleteness(tree);
    return v;
  }
  v.tag = MustTag::MustConverges;
  v.rank = longest_unfold(tree)[0];
  v.exact = !tree.any_truncated;
  if (!v.exact) v.reason = convergence_detail::incompleteness(tree);
  return v;
}

/// Re-steps a witness: every step is a genuine successor and consecutive steps chain.
inline bool replay_path(const std::vector<Step>& path) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && !term_eq(path[i - 1].target, path[i].source)) return false;
    if (!is_valid_step(path[i])) return false;
  }
  return true;
}

/// A cycle witness replays and its last target recurs earlier, so following the
/// loop `laps` more times re-steps to the same term each time.
inline bool replay_cycle(const std::vector<Step>& path, std::size_t laps = 2) {
  if (path.empty() || !replay_path(path)) return false;
  const TermPtr& x = path.back().target;
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (term_eq(path[i].source, x)) start = i;
  if (!start) return false;
  TermPtr cur = x;
  for (std::size_t lap = 0; lap < laps; ++lap) {
    for (std::size_t i = *start; i < path.size(); ++i) {
      Step s{cur, nullptr, path[i].kind};
      auto redex = locate_redex(cur);
      if (!redex) return false;
      if (redex->term->kind == TermKind::Choice) {
        s.target = plug(redex->context, tm::numeral(path[i].kind.chosen));
      } else {
        auto c = contract(redex->term);
        if (!c || !(c->kind == path[i].kind)) return false;
        s.target = plug(redex->context, c->target);
      }
      cur = s.target;
    }
    if (!term_eq(cur, x)) return false;
  }
  return true;
}

}  // namespace ndlam

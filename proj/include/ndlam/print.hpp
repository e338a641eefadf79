#pragma once

// Pretty-printing of types, terms and evaluation contexts in the concrete
// syntax accepted by the parser. Binders are named by nesting level
// (term variables x0, x1, …; type variables 'a, 'b, …), which is capture-free
// by construction.

#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndlam/syntax.hpp"

namespace ndlam {

namespace print_detail {

inline std::string type_var_name(std::size_t level) {
  if (level < 26) return std::string("'") + static_cast<char>('a' + level);
  return "'t" + std::to_string(level);
}

inline bool is_nat(const TypePtr& t) { return type_equal(t, ty::nat()); }
inline bool is_bool(const TypePtr& t) { return type_equal(t, ty::boolean()); }

inline void type_to(std::string& out, const TypePtr& t, std::size_t depth);

inline void type_operand(std::string& out, const TypePtr& t, std::size_t depth) {
  const bool atomic = t->kind == TypeKind::Var || t->kind == TypeKind::Unit || is_nat(t) || is_bool(t);
  if (atomic) {
    type_to(out, t, depth);
  } else {
    out += '(';
    type_to(out, t, depth);
    out += ')';
  }
}

inline void type_to(std::string& out, const TypePtr& t, std::size_t depth) {
  switch (t->kind) {
    case TypeKind::Var:
      if (t->index < depth)
        out += type_var_name(depth - 1 - t->index);
      else
        out += "'free" + std::to_string(t->index - depth);
      return;
    case TypeKind::Unit:
      out += "unit";
      return;
    case TypeKind::Product:
      type_operand(out, t->children[0], depth);
      out += '*';
      type_operand(out, t->children[1], depth);
      return;
    case TypeKind::Arrow:
      type_operand(out, t->children[0], depth);
      out += "->";
      type_operand(out, t->children[1], depth);
      return;
    case TypeKind::Recursive:
      if (is_nat(t)) {
        out += "nat";
        return;
      }
      if (is_bool(t)) {
        out += "bool";
        return;
      }
      out += "\xCE\xBC";  // μ
      out += type_var_name(depth);
      out += '.';
      for (std::size_t i = 0; i < t->children.size(); ++i) {
        if (i) out += '+';
        type_operand(out, t->children[i], depth + 1);
      }
      return;
    case TypeKind::Forall:
      out += "\xE2\x88\x80";  // ∀
      out += type_var_name(depth);
      out += '.';
      type_to(out, t->children[0], depth + 1);
      return;
  }
}

/// Closed terms printed by name instead of structurally (library fix and omega).
struct NamedTerms {
  std::mutex mu;
  std::vector<std::pair<TermPtr, std::string>> entries;
};

inline NamedTerms& named_terms() {
  static NamedTerms table;
  return table;
}

inline std::optional<std::string> name_of(const TermPtr& e) {
  if (!e->closed()) return std::nullopt;
  auto& table = named_terms();
  std::lock_guard<std::mutex> lock(table.mu);
  for (const auto& [t, name] : table.entries)
    if (term_eq(t, e)) return name;
  return std::nullopt;
}

struct TermPrinter {
  std::string out;
  std::string hole_text = "[]";
  // When set, a free term variable with this index (relative to the top) prints as the hole.
  std::optional<std::uint32_t> hole_index;

  void type(const TypePtr& t, std::size_t tdepth) { type_to(out, t, tdepth); }

  static bool atomic(const TermPtr& e) {
    if (name_of(e)) return true;
    switch (e->kind) {
      case TermKind::Var:
      case TermKind::Unit:
      case TermKind::Pair:
      case TermKind::Choice:
        return true;
      case TermKind::Inject:
        return numeral_value(e).has_value() || boolean_value(e).has_value();
      default:
        return false;
    }
  }

  void operand(const TermPtr& e, std::size_t d, std::size_t td) {
    if (atomic(e)) {
      term(e, d, td);
    } else {
      out += '(';
      term(e, d, td);
      out += ')';
    }
  }

  void term(const TermPtr& e, std::size_t d, std::size_t td) {
    if (auto name = name_of(e)) {
      out += *name;
      return;
    }
    switch (e->kind) {
      case TermKind::Var:
        if (e->index < d) {
          out += "x" + std::to_string(d - 1 - e->index);
        } else if (hole_index && e->index - d == *hole_index) {
          out += hole_text;
        } else {
          out += "free" + std::to_string(e->index - d);
        }
        return;
      case TermKind::Unit:
        out += "()";
        return;
      case TermKind::Pair:
        out += '(';
        term(e->subs[0], d, td);
        out += ", ";
        term(e->subs[1], d, td);
        out += ')';
        return;
      case TermKind::Lambda:
        out += "fun ";
        if (e->type) {
          out += "(x" + std::to_string(d) + " : ";
          type(e->type, td);
          out += ")";
        } else {
          out += "x" + std::to_string(d);
        }
        out += " => ";
        term(e->subs[0], d + 1, td);
        return;
      case TermKind::Inject: {
        if (auto n = numeral_value(e)) {
          out += std::to_string(*n);
          return;
        }
        if (auto b = boolean_value(e)) {
          out += *b ? "true" : "false";
          return;
        }
        out += "in" + std::to_string(e->index) + "[";
        type(e->type, td);
        out += "] ";
        operand(e->subs[0], d, td);
        return;
      }
      case TermKind::TypeLambda:
        out += "Lam " + type_var_name(td) + " => ";
        term(e->subs[0], d, td + 1);
        return;
      case TermKind::Choice:
        out += '?';
        return;
      case TermKind::Project:
        out += "proj" + std::to_string(e->index) + " ";
        operand(e->subs[0], d, td);
        return;
      case TermKind::Apply:
        operand(e->subs[0], d, td);
        out += ' ';
        operand(e->subs[1], d, td);
        return;
      case TermKind::Case: {
        out += "case ";
        operand(e->subs[0], d, td);
        out += " of ";
        const std::size_t n = e->subs.size() - 1;
        for (std::size_t i = 0; i < n; ++i) {
          if (i) out += " | ";
          out += "in" + std::to_string(i + 1) + " x" + std::to_string(d) + " => ";
          if (i + 1 < n)
            operand(e->subs[i + 1], d + 1, td);
          else
            term(e->subs[i + 1], d + 1, td);
        }
        return;
      }
      case TermKind::TypeApply:
        operand(e->subs[0], d, td);
        out += '[';
        type(e->type, td);
        out += ']';
        return;
    }
  }
};

}  // namespace print_detail

/// Makes `pretty` print the closed term `e` as `name`.
inline void register_name(const TermPtr& e, std::string name) {
  auto& table = print_detail::named_terms();
  std::lock_guard<std::mutex> lock(table.mu);
  table.entries.emplace_back(e, std::move(name));
}

/// Compact type rendering, e.g. ∀'a.∀'b.(('a->'b)->('a->'b))->('a->'b).
inline std::string pretty(const TypePtr& t) {
  std::string out;
  print_detail::type_to(out, t, 0);
  return out;
}

inline std::string pretty(const TermPtr& e) {
  print_detail::TermPrinter p;
  p.term(e, 0, 0);
  return p.out;
}

/// Renders E with `[]` for the hole, e.g. `(fun (x0 : nat) => x0) []`.
inline std::string pretty(const EvalContext& ctx) {
  // Plug a free variable that cannot clash with anything in the closed frames.
  print_detail::TermPrinter p;
  p.hole_index = 0;
  p.term(plug(ctx, tm::var(0)), 0, 0);
  return p.out;
}

}  // namespace ndlam

#include "revpat/pattern.hpp"

#include <algorithm>
#include <stdexcept>

#include "revpat/linguistics.hpp"

namespace revpat {
namespace {

constexpr std::string_view kKindNames[] = {"Sequence",   "And",     "Or",  "Not",       "Repetition",
                                           "Literal",    "Pos",     "Wildcard", "EntityType"};

PatternNode function_node(NodeKind kind, std::vector<PatternNode> children) {
  PatternNode node;
  node.kind = kind;
  node.children = std::move(children);
  return node;
}

std::string arity_rule(NodeKind kind) {
  switch (kind) {
    case NodeKind::Sequence: return "sequence-arity";
    case NodeKind::And: return "and-arity";
    case NodeKind::Or: return "or-arity";
    case NodeKind::Not: return "not-arity";
    default: return "repetition-arity";
  }
}

std::optional<std::string> check(const PatternNode& node, const TreeLimits& limits,
                                 std::size_t level) {
  if (level > limits.max_depth) {
    return "max-depth: tree deeper than " + std::to_string(limits.max_depth);
  }
  if (is_terminal(node.kind)) {
    if (!node.children.empty()) return std::string("terminal-children: ") + std::string(to_string(node.kind)) + " has children";
    switch (node.kind) {
      case NodeKind::Literal:
        if (node.values.empty()) return std::string("literal-values: Literal needs at least one form");
        for (const auto& v : node.values) {
          if (v.empty()) return std::string("literal-values: empty literal form");
        }
        break;
      case NodeKind::Pos:
        if (node.values.size() != 1) return std::string("pos-value: Pos needs exactly one tag");
        if (!Tagset::penn().contains(node.values[0])) {
          return "pos-value: '" + node.values[0] + "' is not a Penn Treebank tag";
        }
        break;
      case NodeKind::EntityType:
        if (node.values.size() != 1 || node.values[0].empty()) {
          return std::string("entity-value: EntityType needs exactly one type name");
        }
        break;
      default:
        if (!node.values.empty()) return std::string("wildcard-values: Wildcard takes no values");
    }
    return std::nullopt;
  }
  if (!node.values.empty()) return std::string("function-values: ") + std::string(to_string(node.kind)) + " takes no values";
  const std::size_t n = node.children.size();
  const bool arity_ok = node.kind == NodeKind::And          ? n >= 2
                        : node.kind == NodeKind::Repetition ? n == 1
                                                            : n >= 1;
  if (!arity_ok) {
    return arity_rule(node.kind) + ": " + std::string(to_string(node.kind)) + " with " +
           std::to_string(n) + " children";
  }
  if (n > limits.max_children) {
    return "max-children: " + std::string(to_string(node.kind)) + " has " + std::to_string(n) +
           " children (limit " + std::to_string(limits.max_children) + ")";
  }
  for (const auto& child : node.children) {
    if (node.kind != NodeKind::Sequence && !is_token_level(child)) {
      return "token-level-child: " + std::string(to_string(node.kind)) + " may not contain " +
             std::string(to_string(child.kind));
    }
    if (auto err = check(child, limits, level + 1)) return err;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::Manual ? "manual" : "learned";
}

PatternNode make_literal(std::vector<std::string> forms) {
  PatternNode node;
  node.kind = NodeKind::Literal;
  for (auto& f : forms) f = case_fold(f);
  std::sort(forms.begin(), forms.end());
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  node.values = std::move(forms);
  return node;
}

PatternNode make_literal(std::initializer_list<std::string_view> forms) {
  return make_literal(std::vector<std::string>(forms.begin(), forms.end()));
}

PatternNode make_pos(std::string tag) {
  PatternNode node;
  node.kind = NodeKind::Pos;
  node.values.push_back(std::move(tag));
  return node;
}

PatternNode make_entity(std::string type) {
  PatternNode node;
  node.kind = NodeKind::EntityType;
  node.values.push_back(case_fold(type));
  return node;
}

PatternNode make_wildcard() { return PatternNode{}; }

PatternNode make_sequence(std::vector<PatternNode> children) {
  return function_node(NodeKind::Sequence, std::move(children));
}
PatternNode make_and(std::vector<PatternNode> children) {
  return function_node(NodeKind::And, std::move(children));
}
PatternNode make_or(std::vector<PatternNode> children) {
  return function_node(NodeKind::Or, std::move(children));
}
PatternNode make_not(std::vector<PatternNode> children) {
  return function_node(NodeKind::Not, std::move(children));
}
PatternNode make_repetition(PatternNode child) {
  std::vector<PatternNode> children;
  children.push_back(std::move(child));
  return function_node(NodeKind::Repetition, std::move(children));
}

bool is_token_level(const PatternNode& node) {
  if (is_terminal(node.kind)) return true;
  if (node.kind == NodeKind::Sequence || node.kind == NodeKind::Repetition) return false;
  return std::all_of(node.children.begin(), node.children.end(),
                     [](const PatternNode& c) { return is_token_level(c); });
}

std::size_t depth(const PatternNode& node) {
  std::size_t deepest = 0;
  for (const auto& child : node.children) deepest = std::max(deepest, depth(child));
  return deepest + 1;
}

std::size_t node_count(const PatternNode& node) {
  std::size_t count = 1;
  for (const auto& child : node.children) count += node_count(child);
  return count;
}

std::optional<std::string> find_violation(const PatternNode& root, const TreeLimits& limits) {
  if (root.kind == NodeKind::Not) return std::string("not-root: a bare NOT cannot be a pattern root");
  return check(root, limits, 1);
}

void validate(const PatternNode& root, const TreeLimits& limits) {
  if (auto violation = find_violation(root, limits)) {
    const auto colon = violation->find(':');
    throw PatternError(violation->substr(0, colon), violation->substr(colon + 2));
  }
}

bool token_match(const PatternNode& node, const Token& token) {
  switch (node.kind) {
    case NodeKind::Literal:
      return std::find(node.values.begin(), node.values.end(), token.norm) != node.values.end();
    case NodeKind::Pos:
      return !node.values.empty() && token.pos == node.values[0];
    case NodeKind::Wildcard:
      return true;
    case NodeKind::EntityType:
      return !node.values.empty() && token.has_entity(node.values[0]);
    case NodeKind::And:
      return std::all_of(node.children.begin(), node.children.end(),
                         [&](const PatternNode& c) { return token_match(c, token); });
    case NodeKind::Or:
      return std::any_of(node.children.begin(), node.children.end(),
                         [&](const PatternNode& c) { return token_match(c, token); });
    case NodeKind::Not:
      return std::none_of(node.children.begin(), node.children.end(),
                          [&](const PatternNode& c) { return token_match(c, token); });
    case NodeKind::Sequence:
    case NodeKind::Repetition:
      break;
  }
  throw std::invalid_argument("token_match: " + std::string(to_string(node.kind)) +
                              " is not a token-level node");
}

std::optional<std::size_t> span_match(const PatternNode& node, const Document& doc,
                                      std::size_t start) {
  const std::size_t n = doc.tokens.size();
  if (start >= n) return std::nullopt;
  switch (node.kind) {
    case NodeKind::Sequence: {
      std::size_t pos = start;
      for (const auto& child : node.children) {
        const auto consumed = span_match(child, doc, pos);
        if (!consumed) return std::nullopt;
        pos += *consumed;
      }
      return pos - start;
    }
    case NodeKind::Repetition: {
      if (node.children.size() != 1) return std::nullopt;
      std::size_t run = 0;
      while (start + run < n && token_match(node.children[0], doc.tokens[start + run])) ++run;
      if (run < 2) return std::nullopt;
      return run;
    }
    default:
      if (token_match(node, doc.tokens[start])) return 1;
      return std::nullopt;
  }
}

bool doc_match(const PatternNode& pattern, const Document& doc) {
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (span_match(pattern, doc, i)) return true;
  }
  return false;
}

bool group_label(const PatternGroup& group, const Document& doc) {
  return std::any_of(group.patterns.begin(), group.patterns.end(),
                     [&](const PatternNode& p) { return doc_match(p, doc); });
}

PatternNode canonicalize(const PatternNode& node) {
  PatternNode out;
  out.kind = node.kind;
  out.values = node.values;
  if (node.kind == NodeKind::Literal) return make_literal(node.values);
  out.children.reserve(node.children.size());
  for (const auto& child : node.children) out.children.push_back(canonicalize(child));
  if (out.kind == NodeKind::Or && !out.children.empty() &&
      std::all_of(out.children.begin(), out.children.end(),
                  [](const PatternNode& c) { return c.kind == NodeKind::Literal; })) {
    std::vector<std::string> forms;
    for (const auto& child : out.children) forms.insert(forms.end(), child.values.begin(), child.values.end());
    return make_literal(std::move(forms));
  }
  return out;
}

}  // namespace revpat

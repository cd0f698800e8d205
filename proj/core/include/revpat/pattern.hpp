#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revpat/document.hpp"
#include "revpat/error.hpp"

namespace revpat {

enum class NodeKind : std::uint8_t {
  Sequence,
  And,
  Or,
  Not,
  Repetition,
  Literal,
  Pos,
  Wildcard,
  EntityType,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

constexpr bool is_terminal(NodeKind kind) {
  return kind == NodeKind::Literal || kind == NodeKind::Pos || kind == NodeKind::Wildcard ||
         kind == NodeKind::EntityType;
}

// A pattern tree. Function nodes own their children; terminals carry values:
// Literal = alternative case-folded forms (sorted), Pos = one tag,
// EntityType = one gazetteer key, Wildcard = none.
struct PatternNode {
  NodeKind kind = NodeKind::Wildcard;
  std::vector<std::string> values;
  std::vector<PatternNode> children;

  bool operator==(const PatternNode&) const = default;
};

PatternNode make_literal(std::vector<std::string> forms);
PatternNode make_literal(std::initializer_list<std::string_view> forms);
PatternNode make_pos(std::string tag);
PatternNode make_entity(std::string type);
PatternNode make_wildcard();
PatternNode make_sequence(std::vector<PatternNode> children);
PatternNode make_and(std::vector<PatternNode> children);
PatternNode make_or(std::vector<PatternNode> children);
PatternNode make_not(std::vector<PatternNode> children);
PatternNode make_repetition(PatternNode child);

/// Terminals and And/Or/Not: nodes that test exactly one token.
bool is_token_level(const PatternNode& node);
/// Root has depth 1.
std::size_t depth(const PatternNode& node);
std::size_t node_count(const PatternNode& node);

struct TreeLimits {
  std::size_t max_depth = 5;
  std::size_t max_children = 4;
};

class PatternError : public InputError {
 public:
  PatternError(std::string rule, const std::string& message)
      : InputError(rule + ": " + message), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

/// Throws PatternError naming the violated rule.
void validate(const PatternNode& root, const TreeLimits& limits = {});
/// Same checks, reporting the first violated rule instead of throwing.
std::optional<std::string> find_violation(const PatternNode& root, const TreeLimits& limits = {});

/// Node must be token-level; Sequence/Repetition throw std::invalid_argument.
bool token_match(const PatternNode& node, const Token& token);

/// Number of tokens consumed when `node` matches at `start`, if it does.
/// Sequence children match contiguously; Repetition takes the maximal run of
/// tokens matching its child and needs at least two.
std::optional<std::size_t> span_match(const PatternNode& node, const Document& doc,
                                      std::size_t start);

bool doc_match(const PatternNode& pattern, const Document& doc);

enum class Provenance { Manual, Learned };
std::string_view to_string(Provenance provenance);

struct PatternGroup {
  FeedbackType feedback_type = FeedbackType::Defect;
  std::vector<PatternNode> patterns;
  Provenance provenance = Provenance::Manual;

  bool operator==(const PatternGroup&) const = default;
};

/// Disjunction over the group's patterns.
bool group_label(const PatternGroup& group, const Document& doc);

/// Folds an Or whose children are all Literals into one multi-valued Literal,
/// bottom-up. Matching behaviour is unchanged.
PatternNode canonicalize(const PatternNode& node);

// DSL:  SEQ(..) AND(..) OR(..) NOT(..) REP(x)  lit(a|b)  pos(VB)  ent(software update)  *
// Inside terminal parentheses, '\' escapes any of  \ | ( ) .
std::string print_dsl(const PatternNode& node);
/// Throws PatternError: rule "syntax" (with byte offset) or an invariant rule.
PatternNode parse_dsl(std::string_view text, const TreeLimits& limits = {});

std::string pattern_to_json(const PatternNode& node);
PatternNode pattern_from_json(std::string_view text, const TreeLimits& limits = {});

// Group files. JSON: {"feedback_type", "provenance", "patterns": [ast...]}.
// DSL: one pattern per line, '#' comments, optional "@feedback <type>" and
// "@provenance <manual|learned>" directives.
std::string group_to_json(const PatternGroup& group);
PatternGroup group_from_json(std::string_view text);
std::string group_to_dsl(const PatternGroup& group);
PatternGroup group_from_dsl(std::string_view text, FeedbackType default_type = FeedbackType::Defect);
/// Format chosen by extension: ".json" is JSON, anything else DSL.
PatternGroup load_group(const std::filesystem::path& path,
                        FeedbackType default_type = FeedbackType::Defect);
void save_group(const PatternGroup& group, const std::filesystem::path& path);

}  // namespace revpat

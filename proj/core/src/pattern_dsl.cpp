#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "revpat/linguistics.hpp"
#include "revpat/pattern.hpp"

namespace revpat {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool needs_escape(char c) { return c == '\\' || c == '|' || c == '(' || c == ')'; }

std::string escape(const std::string& value) {
  std::string out;
  for (char c : value) {
    if (needs_escape(c)) out += '\\';
    out += c;
  }
  return out;
}

void print(const PatternNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Wildcard:
      out += '*';
      return;
    case NodeKind::Literal:
    case NodeKind::Pos:
    case NodeKind::EntityType: {
      out += node.kind == NodeKind::Literal ? "lit(" : node.kind == NodeKind::Pos ? "pos(" : "ent(";
      for (std::size_t i = 0; i < node.values.size(); ++i) {
        if (i) out += '|';
        out += escape(node.values[i]);
      }
      out += ')';
      return;
    }
    case NodeKind::Sequence: out += "SEQ("; break;
    case NodeKind::And: out += "AND("; break;
    case NodeKind::Or: out += "OR("; break;
    case NodeKind::Not: out += "NOT("; break;
    case NodeKind::Repetition: out += "REP("; break;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) out += ", ";
    print(node.children[i], out);
  }
  out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PatternNode parse() {
    PatternNode root = node();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw PatternError("syntax", what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  PatternNode node() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '*') {
      ++pos_;
      return make_wildcard();
    }
    const std::size_t name_start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == name_start) fail("expected a node");
    const std::string name = case_fold(text_.substr(name_start, pos_ - name_start));
    expect('(');

    if (name == "lit" || name == "pos" || name == "ent") {
      std::vector<std::string> values = terminal_values();
      if (name == "lit") return make_literal(std::move(values));
      PatternNode out;
      out.kind = name == "pos" ? NodeKind::Pos : NodeKind::EntityType;
      if (out.kind == NodeKind::EntityType) {
        for (auto& v : values) v = case_fold(v);
      }
      out.values = std::move(values);
      return out;
    }

    NodeKind kind;
    if (name == "seq") kind = NodeKind::Sequence;
    else if (name == "and") kind = NodeKind::And;
    else if (name == "or") kind = NodeKind::Or;
    else if (name == "not") kind = NodeKind::Not;
    else if (name == "rep") kind = NodeKind::Repetition;
    else {
      pos_ = name_start;
      fail("unknown node '" + name + "'");
    }
    PatternNode out;
    out.kind = kind;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return out;
    }
    while (true) {
      out.children.push_back(node());
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return out;
    }
  }

  // Reads "a|b|c)" with backslash escapes; whitespace is trimmed and collapsed.
  std::vector<std::string> terminal_values() {
    std::vector<std::string> values;
    std::string current;
    auto flush = [&] {
      std::string cleaned;
      bool space = false;
      for (char c : current) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          space = !cleaned.empty();
        } else {
          if (space) cleaned += ' ';
          space = false;
          cleaned += c;
        }
      }
      values.push_back(std::move(cleaned));
      current.clear();
    };
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated terminal");
      const char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("dangling escape");
        current += text_[pos_++];
      } else if (c == '|') {
        flush();
      } else if (c == ')') {
        flush();
        return values;
      } else {
        current += c;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

ordered_json to_json(const PatternNode& node) {
  ordered_json out = ordered_json::object();
  out["kind"] = std::string(to_string(node.kind));
  out["values"] = node.values;
  ordered_json children = ordered_json::array();
  for (const auto& child : node.children) children.push_back(to_json(child));
  out["children"] = std::move(children);
  return out;
}

PatternNode from_json(const json& in) {
  if (!in.is_object() || !in.contains("kind") || !in["kind"].is_string()) {
    throw PatternError("syntax", "pattern JSON node needs a string 'kind'");
  }
  const auto kind = node_kind_from_string(in["kind"].get<std::string>());
  if (!kind) throw PatternError("syntax", "unknown node kind '" + in["kind"].get<std::string>() + "'");
  PatternNode node;
  node.kind = *kind;
  try {
    if (in.contains("values")) node.values = in["values"].get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw PatternError("syntax", "'values' must be an array of strings");
  }
  if (in.contains("children")) {
    if (!in["children"].is_array()) throw PatternError("syntax", "'children' must be an array");
    for (const auto& child : in["children"]) node.children.push_back(from_json(child));
  }
  if (node.kind == NodeKind::Literal) return make_literal(std::move(node.values));
  if (node.kind == NodeKind::EntityType) {
    for (auto& v : node.values) v = case_fold(v);
  }
  return node;
}

ordered_json group_json(const PatternGroup& group) {
  ordered_json out = ordered_json::object();
  out["feedback_type"] = std::string(to_string(group.feedback_type));
  out["provenance"] = std::string(to_string(group.provenance));
  ordered_json patterns = ordered_json::array();
  for (const auto& p : group.patterns) patterns.push_back(to_json(p));
  out["patterns"] = std::move(patterns);
  return out;
}

Provenance parse_provenance(const std::string& text) {
  const std::string folded = case_fold(text);
  if (folded == "manual") return Provenance::Manual;
  if (folded == "learned") return Provenance::Learned;
  throw InputError("unknown provenance '" + text + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string print_dsl(const PatternNode& node) {
  std::string out;
  print(canonicalize(node), out);
  return out;
}

PatternNode parse_dsl(std::string_view text, const TreeLimits& limits) {
  PatternNode root = Parser(text).parse();
  validate(root, limits);
  return root;
}

std::string pattern_to_json(const PatternNode& node) { return to_json(node).dump(); }

PatternNode pattern_from_json(std::string_view text, const TreeLimits& limits) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PatternError("syntax", std::string("malformed pattern JSON: ") + e.what());
  }
  PatternNode root = from_json(in);
  validate(root, limits);
  return root;
}

std::string group_to_json(const PatternGroup& group) { return group_json(group).dump(2) + "\n"; }

PatternGroup group_from_json(std::string_view text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed pattern group JSON: ") + e.what());
  }
  if (!in.is_object() || !in.contains("patterns") || !in["patterns"].is_array()) {
    throw InputError("pattern group JSON needs a 'patterns' array");
  }
  PatternGroup group;
  if (in.contains("feedback_type")) group.feedback_type = parse_feedback_type(in["feedback_type"].get<std::string>());
  if (in.contains("provenance")) group.provenance = parse_provenance(in["provenance"].get<std::string>());
  for (const auto& p : in["patterns"]) {
    PatternNode node = from_json(p);
    validate(node);
    group.patterns.push_back(std::move(node));
  }
  return group;
}

std::string group_to_dsl(const PatternGroup& group) {
  std::string out = "@feedback " + std::string(to_string(group.feedback_type)) + "\n";
  out += "@provenance " + std::string(to_string(group.provenance)) + "\n";
  for (const auto& p : group.patterns) out += print_dsl(p) + "\n";
  return out;
}

PatternGroup group_from_dsl(std::string_view text, FeedbackType default_type) {
  PatternGroup group;
  group.feedback_type = default_type;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string content = line.substr(b, e - b + 1);
    if (content[0] == '@') {
      std::istringstream directive(content.substr(1));
      std::string key, value;
      directive >> key >> value;
      if (key == "feedback") group.feedback_type = parse_feedback_type(value);
      else if (key == "provenance") group.provenance = parse_provenance(value);
      else throw InputError("pattern file line " + std::to_string(number) + ": unknown directive '@" + key + "'");
      continue;
    }
    try {
      group.patterns.push_back(parse_dsl(content));
    } catch (const PatternError& err) {
      throw PatternError(err.rule(), "line " + std::to_string(number) + ": " + err.what());
    }
  }
  return group;
}

PatternGroup load_group(const std::filesystem::path& path, FeedbackType default_type) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") return group_from_json(text);
  return group_from_dsl(text, default_type);
}

void save_group(const PatternGroup& group, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (path.extension() == ".json" ? group_to_json(group) : group_to_dsl(group));
}

}  // namespace revpat

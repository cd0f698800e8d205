#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revpat/document.hpp"
#include "revpat/pattern.hpp"

namespace revpat {

class SymbolTable {
 public:
  static constexpr std::uint32_t kMissing = UINT32_MAX;

  std::uint32_t intern(std::string_view symbol);
  std::uint32_t find(std::string_view symbol) const;
  std::size_t size() const { return symbols_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> symbols_;
};

// Documents flattened to integer ids so that many patterns can be matched
// against the same collection without string comparisons.
class EncodedCorpus {
 public:
  explicit EncodedCorpus(std::span<const Document> docs);

  std::size_t size() const { return doc_offsets_.size() - 1; }

 private:
  friend class CompiledPattern;

  struct TokenRec {
    std::uint32_t word;
    std::uint32_t pos;
    std::uint32_t entity_begin;
    std::uint32_t entity_end;
  };

  SymbolTable words_;
  SymbolTable tags_;
  SymbolTable entities_;
  std::vector<TokenRec> tokens_;
  std::vector<std::uint32_t> doc_offsets_;
  std::vector<std::uint32_t> entity_pool_;
};

// A pattern resolved against an EncodedCorpus. Semantics are identical to
// doc_match on the original documents.
class CompiledPattern {
 public:
  CompiledPattern(const PatternNode& pattern, const EncodedCorpus& corpus);

  bool matches(std::size_t doc_index) const;

 private:
  struct Node {
    NodeKind kind;
    std::uint32_t first;  // children: range into child_ids_; terminals: range into values_
    std::uint32_t count;
  };

  std::uint32_t compile(const PatternNode& node);
  bool token_match(std::uint32_t node, const EncodedCorpus::TokenRec& token) const;
  // Returns the end position, or UINT32_MAX on failure.
  std::uint32_t span_end(std::uint32_t node, std::uint32_t pos, std::uint32_t end) const;

  const EncodedCorpus* corpus_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> child_ids_;
  std::vector<std::uint32_t> values_;
  std::uint32_t root_ = 0;
};

}  // namespace revpat

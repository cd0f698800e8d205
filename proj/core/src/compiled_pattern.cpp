#include "revpat/compiled_pattern.hpp"

#include <algorithm>

namespace revpat {
namespace {
constexpr std::uint32_t kFail = UINT32_MAX;
}

std::uint32_t SymbolTable::intern(std::string_view symbol) {
  auto [it, inserted] = ids_.try_emplace(std::string(symbol), static_cast<std::uint32_t>(symbols_.size()));
  if (inserted) symbols_.emplace_back(symbol);
  return it->second;
}

std::uint32_t SymbolTable::find(std::string_view symbol) const {
  const auto it = ids_.find(std::string(symbol));
  return it == ids_.end() ? kMissing : it->second;
}

EncodedCorpus::EncodedCorpus(std::span<const Document> docs) {
  doc_offsets_.reserve(docs.size() + 1);
  doc_offsets_.push_back(0);
  for (const auto& doc : docs) {
    for (const auto& token : doc.tokens) {
      TokenRec rec;
      rec.word = words_.intern(token.norm);
      rec.pos = tags_.intern(token.pos);
      rec.entity_begin = static_cast<std::uint32_t>(entity_pool_.size());
      for (const auto& type : token.entity_types) entity_pool_.push_back(entities_.intern(type));
      std::sort(entity_pool_.begin() + rec.entity_begin, entity_pool_.end());
      rec.entity_end = static_cast<std::uint32_t>(entity_pool_.size());
      tokens_.push_back(rec);
    }
    doc_offsets_.push_back(static_cast<std::uint32_t>(tokens_.size()));
  }
}

CompiledPattern::CompiledPattern(const PatternNode& pattern, const EncodedCorpus& corpus)
    : corpus_(&corpus) {
  root_ = compile(pattern);
}

std::uint32_t CompiledPattern::compile(const PatternNode& node) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({node.kind, 0, 0});
  if (is_terminal(node.kind)) {
    const SymbolTable* table = node.kind == NodeKind::Literal ? &corpus_->words_
                               : node.kind == NodeKind::Pos   ? &corpus_->tags_
                                                              : &corpus_->entities_;
    std::vector<std::uint32_t> ids;
    if (node.kind != NodeKind::Wildcard) {
      for (const auto& value : node.values) {
        const std::uint32_t sym = table->find(value);
        if (sym != SymbolTable::kMissing) ids.push_back(sym);
      }
      std::sort(ids.begin(), ids.end());
    }
    nodes_[id].first = static_cast<std::uint32_t>(values_.size());
    nodes_[id].count = static_cast<std::uint32_t>(ids.size());
    values_.insert(values_.end(), ids.begin(), ids.end());
    return id;
  }
  std::vector<std::uint32_t> kids;
  kids.reserve(node.children.size());
  for (const auto& child : node.children) kids.push_back(compile(child));
  nodes_[id].first = static_cast<std::uint32_t>(child_ids_.size());
  nodes_[id].count = static_cast<std::uint32_t>(kids.size());
  child_ids_.insert(child_ids_.end(), kids.begin(), kids.end());
  return id;
}

bool CompiledPattern::token_match(std::uint32_t id, const EncodedCorpus::TokenRec& token) const {
  const Node& node = nodes_[id];
  switch (node.kind) {
    case NodeKind::Wildcard:
      return true;
    case NodeKind::Literal: {
      const auto* begin = values_.data() + node.first;
      return std::binary_search(begin, begin + node.count, token.word);
    }
    case NodeKind::Pos:
      return node.count == 1 && values_[node.first] == token.pos;
    case NodeKind::EntityType: {
      if (node.count != 1) return false;
      const auto* begin = corpus_->entity_pool_.data() + token.entity_begin;
      const auto* end = corpus_->entity_pool_.data() + token.entity_end;
      return std::binary_search(begin, end, values_[node.first]);
    }
    case NodeKind::And:
      for (std::uint32_t i = 0; i < node.count; ++i) {
        if (!token_match(child_ids_[node.first + i], token)) return false;
      }
      return true;
    case NodeKind::Or:
      for (std::uint32_t i = 0; i < node.count; ++i) {
        if (token_match(child_ids_[node.first + i], token)) return true;
      }
      return false;
    case NodeKind::Not:
      for (std::uint32_t i = 0; i < node.count; ++i) {
        if (token_match(child_ids_[node.first + i], token)) return false;
      }
      return true;
    default:
      return false;
  }
}

std::uint32_t CompiledPattern::span_end(std::uint32_t id, std::uint32_t pos, std::uint32_t end) const {
  if (pos >= end) return kFail;
  const Node& node = nodes_[id];
  if (node.kind == NodeKind::Sequence) {
    for (std::uint32_t i = 0; i < node.count; ++i) {
      pos = span_end(child_ids_[node.first + i], pos, end);
      if (pos == kFail) return kFail;
    }
    return pos;
  }
  const auto& tokens = corpus_->tokens_;
  if (node.kind == NodeKind::Repetition) {
    if (node.count != 1) return kFail;
    const std::uint32_t child = child_ids_[node.first];
    std::uint32_t p = pos;
    while (p < end && token_match(child, tokens[p])) ++p;
    return p - pos >= 2 ? p : kFail;
  }
  return token_match(id, tokens[pos]) ? pos + 1 : kFail;
}

bool CompiledPattern::matches(std::size_t doc_index) const {
  const std::uint32_t begin = corpus_->doc_offsets_[doc_index];
  const std::uint32_t end = corpus_->doc_offsets_[doc_index + 1];
  for (std::uint32_t start = begin; start < end; ++start) {
    if (span_end(root_, start, end) != kFail) return true;
  }
  return false;
}

}  // namespace revpat

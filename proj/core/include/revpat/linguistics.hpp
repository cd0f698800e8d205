#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revpat/corpus.hpp"
#include "revpat/document.hpp"

namespace revpat {

class Gazetteer;

/// ASCII lower-casing; bytes outside ASCII are kept as-is.
std::string case_fold(std::string_view text);

/// Whitespace split, then leading/trailing punctuation peeled into separate
/// tokens and English contractions split Treebank-style ("can't" -> "ca" "n't").
std::vector<std::string> tokenize(std::string_view text);

class Tagset {
 public:
  Tagset() = default;
  explicit Tagset(std::set<std::string, std::less<>> tags) : tags_(std::move(tags)) {}

  /// The 45-tag Penn Treebank set.
  static const Tagset& penn();
  /// One tag per line; blank lines and '#' comments ignored.
  static Tagset load(const std::filesystem::path& path);

  bool contains(std::string_view tag) const { return tags_.find(tag) != tags_.end(); }
  const std::set<std::string, std::less<>>& tags() const { return tags_; }

 private:
  std::set<std::string, std::less<>> tags_;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<std::string> tag(std::span<const std::string> tokens) const = 0;
};

// Lexicon of frequent words, a handful of contextual rules, suffix heuristics
// and an NN fallback. Only ever emits Penn tags.
class BaselineTagger final : public PosTagger {
 public:
  std::vector<std::string> tag(std::span<const std::string> tokens) const override;
};

// Returns tags supplied with the input. Sizes must match the token list.
class PassThroughTagger final : public PosTagger {
 public:
  explicit PassThroughTagger(std::vector<std::string> tags, const Tagset& tagset = Tagset::penn());
  std::vector<std::string> tag(std::span<const std::string> tokens) const override;

 private:
  std::vector<std::string> tags_;
};

/// Builds a Document from surfaces and tags, attaching gazetteer entity types.
/// A token carries type K iff its norm, or a norm-joined phrase covering it,
/// is an entry of K.
Document annotate_tokens(std::string review_id, std::span<const std::string> surfaces,
                         std::span<const std::string> tags, const Gazetteer& gazetteer);

/// Pre-tagged reviews keep their tags; others are tokenized and tagged by `tagger`.
Document annotate(const RawReview& review, const Gazetteer& gazetteer, const PosTagger& tagger);
Document annotate(const RawReview& review, const Gazetteer& gazetteer);

/// annotate + resolve_labels for a whole dataset.
std::vector<LabeledExample> annotate_all(std::span<const RawReview> reviews,
                                         const Gazetteer& gazetteer);

}  // namespace revpat

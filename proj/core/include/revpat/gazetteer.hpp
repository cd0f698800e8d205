#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace revpat {

/// Entity-type lexicon: type name -> set of case-folded phrases (1..4 tokens).
///
/// Text format, one type per line:
///
///     # comment
///     software update: update, updates, upgrade, new version
///
/// Type names and terms are case-folded; terms are re-tokenized so that a
/// phrase entry lines up with document tokens.
class Gazetteer {
 public:
  static constexpr std::size_t kMaxPhraseTokens = 4;

  Gazetteer() = default;
  /// Validates and normalizes. Throws InputError on an empty key, an empty
  /// entry set (naming the key) or a phrase longer than kMaxPhraseTokens.
  explicit Gazetteer(const std::map<std::string, std::vector<std::string>>& entries);

  static Gazetteer parse(std::istream& in);

  /// Keys whose entry set contains `phrase` (already case-folded, tokens
  /// joined by single spaces). Sorted.
  std::vector<std::string> lookup(std::string_view phrase) const;

  std::vector<std::string> keys() const;
  const std::set<std::string>& entries(const std::string& key) const;
  std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
  std::unordered_map<std::string, std::vector<std::string>> index_;
  std::size_t max_phrase_tokens_ = 0;
};

Gazetteer load_gazetteer(const std::filesystem::path& path);

/// data/gazetteer.txt of the source tree (or the installed share dir).
std::filesystem::path default_gazetteer_path();
/// Directory holding the bundled data files.
std::filesystem::path data_dir();

}  // namespace revpat

#include "revpat/gazetteer.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "revpat/error.hpp"
#include "revpat/linguistics.hpp"

#ifndef REVPAT_DATA_DIR
#define REVPAT_DATA_DIR "data"
#endif

namespace revpat {
namespace {

std::string trim(std::string_view text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(b, e - b + 1));
}

// Case-folded, re-tokenized and single-space joined.
std::pair<std::string, std::size_t> normalize_phrase(std::string_view term) {
  const auto tokens = tokenize(term);
  std::string phrase;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) phrase += ' ';
    phrase += case_fold(tokens[i]);
  }
  return {phrase, tokens.size()};
}

}  // namespace

Gazetteer::Gazetteer(const std::map<std::string, std::vector<std::string>>& entries) {
  for (const auto& [raw_key, terms] : entries) {
    const std::string key = case_fold(trim(raw_key));
    if (key.empty()) throw InputError("gazetteer: empty entity-type name");
    if (entries_.count(key)) throw InputError("gazetteer: duplicate entity type '" + key + "'");
    std::set<std::string> phrases;
    for (const auto& term : terms) {
      auto [phrase, length] = normalize_phrase(term);
      if (phrase.empty()) continue;
      if (length > kMaxPhraseTokens) {
        throw InputError("gazetteer: entry '" + term + "' of '" + key + "' has more than " +
                         std::to_string(kMaxPhraseTokens) + " tokens");
      }
      max_phrase_tokens_ = std::max(max_phrase_tokens_, length);
      phrases.insert(std::move(phrase));
    }
    if (phrases.empty()) throw InputError("gazetteer: entity type '" + key + "' has no entries");
    for (const auto& phrase : phrases) index_[phrase].push_back(key);
    entries_.emplace(key, std::move(phrases));
  }
  for (auto& [phrase, keys] : index_) std::sort(keys.begin(), keys.end());
}

Gazetteer Gazetteer::parse(std::istream& in) {
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto colon = content.find(':');
    if (colon == std::string::npos) {
      throw InputError("gazetteer line " + std::to_string(number) + ": expected 'type: term, ...'");
    }
    const std::string key = case_fold(trim(content.substr(0, colon)));
    if (key.empty()) throw InputError("gazetteer line " + std::to_string(number) + ": empty type name");
    if (entries.count(key)) {
      throw InputError("gazetteer line " + std::to_string(number) + ": duplicate type '" + key + "'");
    }
    std::vector<std::string> terms;
    std::stringstream ss(content.substr(colon + 1));
    std::string term;
    while (std::getline(ss, term, ',')) {
      term = trim(term);
      if (!term.empty()) terms.push_back(term);
    }
    entries.emplace(key, std::move(terms));
  }
  return Gazetteer(entries);
}

std::vector<std::string> Gazetteer::lookup(std::string_view phrase) const {
  const auto it = index_.find(std::string(phrase));
  return it == index_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Gazetteer::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [key, _] : entries_) out.push_back(key);
  return out;
}

const std::set<std::string>& Gazetteer::entries(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::out_of_range("gazetteer: unknown entity type '" + key + "'");
  return it->second;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open gazetteer " + path.string());
  return Gazetteer::parse(in);
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("REVPAT_DATA_DIR"); env && *env) return env;
  return REVPAT_DATA_DIR;
}

std::filesystem::path default_gazetteer_path() { return data_dir() / "gazetteer.txt"; }

}  // namespace revpat

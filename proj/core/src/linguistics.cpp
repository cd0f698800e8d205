#include "revpat/linguistics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "revpat/error.hpp"
#include "revpat/gazetteer.hpp"

namespace revpat {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string normalize_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2018 / U+2019 -> ASCII apostrophe
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      out += '\'';
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

constexpr std::array<std::string_view, 6> kClitics{"'s", "'re", "'ve", "'ll", "'d", "'m"};

void split_core(const std::string& core, std::vector<std::string>& out) {
  const std::string lower = case_fold(core);
  if (lower.size() > 3 && lower.ends_with("n't")) {
    out.push_back(core.substr(0, core.size() - 3));
    out.push_back(core.substr(core.size() - 3));
    return;
  }
  if (lower == "cannot") {
    out.push_back(core.substr(0, 3));
    out.push_back(core.substr(3));
    return;
  }
  for (std::string_view clitic : kClitics) {
    if (lower.size() > clitic.size() && lower.ends_with(clitic)) {
      out.push_back(core.substr(0, core.size() - clitic.size()));
      out.push_back(core.substr(core.size() - clitic.size()));
      return;
    }
  }
  out.push_back(core);
}

// Length of the punctuation token starting at `i` ("..." runs stay together).
std::size_t punct_run(std::string_view chunk, std::size_t i) {
  if (chunk[i] != '.') return 1;
  std::size_t j = i;
  while (j < chunk.size() && chunk[j] == '.') ++j;
  return j - i >= 2 ? j - i : 1;
}

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_punct(chunk[begin])) {
    const std::size_t n = punct_run(chunk, begin);
    out.emplace_back(chunk.substr(begin, n));
    begin += n;
  }
  std::vector<std::string> trailing;
  while (end > begin && is_punct(chunk[end - 1])) {
    std::size_t start = end - 1;
    if (chunk[start] == '.') {
      while (start > begin && chunk[start - 1] == '.') --start;
      if (end - start < 2) start = end - 1;
    }
    trailing.emplace_back(chunk.substr(start, end - start));
    end = start;
  }
  if (begin < end) split_core(std::string(chunk.substr(begin, end - begin)), out);
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

// ---------------------------------------------------------------------------
// Baseline tagger lexicon

struct LexEntry {
  std::string_view tag;
  std::initializer_list<std::string_view> words;
};

const std::unordered_map<std::string, std::string>& lexicon() {
  static const std::unordered_map<std::string, std::string> table = [] {
    const LexEntry entries[] = {
        {"DT", {"the", "a", "an", "this", "that", "these", "those", "every", "each", "no", "any",
                "some", "another", "all", "both", "either", "neither"}},
        {"PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
                 "myself", "yourself", "itself", "ourselves", "themselves", "everyone", "someone",
                 "anyone", "nobody"}},
        {"PRP$", {"my", "your", "his", "its", "our", "their"}},
        {"IN", {"in", "on", "at", "of", "for", "with", "from", "by", "about", "into", "after",
                "before", "during", "since", "until", "without", "within", "through", "over",
                "under", "between", "because", "if", "while", "than", "like", "as", "though",
                "although", "unless", "whether", "via", "per", "instead", "upon", "across"}},
        {"CC", {"and", "or", "but", "nor", "yet", "plus"}},
        {"TO", {"to"}},
        {"MD", {"can", "could", "will", "would", "should", "may", "might", "must", "shall", "ca",
                "wo", "'ll", "'d"}},
        {"UH", {"please", "thanks", "yes", "oh", "wow", "hi", "hello", "ok", "okay", "pls", "plz"}},
        {"RB", {"not", "n't", "very", "really", "so", "too", "also", "just", "now", "always",
                "never", "still", "even", "again", "anymore", "only", "already", "sometimes",
                "often", "here", "there", "well", "quite", "almost", "much", "back", "ever",
                "maybe", "soon", "definitely", "actually", "finally", "otherwise", "rather",
                "pretty", "constantly", "totally", "completely", "easily", "away", "together"}},
        {"WRB", {"when", "where", "why", "how"}},
        {"WP", {"what", "who", "whom"}},
        {"WDT", {"which", "whatever"}},
        {"VBZ", {"is", "has", "does", "'s", "seems", "keeps", "works", "makes", "needs", "takes",
                 "gets", "lets", "crashes", "freezes", "says", "looks", "loads", "syncs"}},
        {"VBP", {"am", "are", "'re", "'m", "'ve", "have", "do"}},
        {"VBD", {"was", "were", "had", "did", "said", "made", "got", "went", "lost", "took",
                 "came", "gave", "found", "thought", "stopped", "crashed", "deleted", "changed",
                 "updated", "tried", "used", "wanted", "loved", "worked", "synced", "froze"}},
        {"VBN", {"been", "done", "gone", "seen", "known", "given", "taken", "broken", "frozen"}},
        {"VBG", {"being", "having", "doing", "using", "trying", "getting", "making", "working",
                 "crashing", "loading", "syncing", "adding", "taking", "keeping"}},
        {"VB", {"be", "add", "make", "get", "let", "give", "go", "see", "take", "keep", "allow",
                "bring", "include", "remove", "delete", "open", "save", "find", "put", "show",
                "create", "copy", "duplicate", "adjust", "sort", "share", "export", "import",
                "improve", "consider", "implement", "enable", "disable", "restore", "download",
                "install", "uninstall", "login", "log", "sign", "fetch", "recommend", "try", "want",
                "know", "think", "say", "come", "lose", "stop", "start", "organize", "write", "read",
                "type", "attach", "tag", "select", "scroll", "access", "reinstall", "move",
                "insert", "lessen", "solve"}},
        {"NN", {"app", "application", "note", "notebook", "phone", "tablet", "device", "version",
                "update", "upgrade", "bug", "crash", "feature", "option", "ability", "account",
                "sync", "search", "list", "text", "font", "size", "title", "sentence", "time",
                "lag", "issue", "problem", "way", "day", "thing", "screen", "button", "widget",
                "editor", "mode", "support", "work", "use", "help", "need", "love", "change",
                "fix", "design", "integration", "reminder", "calendar", "file", "photo", "image",
                "camera", "keyboard", "web", "cloud", "storage", "data", "everything", "nothing",
                "something", "anything", "lot", "bit", "today", "tomorrow", "yesterday", "week",
                "month", "year", "service", "price", "subscription", "email", "password",
                "android", "iphone", "ipad", "computer", "laptop", "desktop", "server",
                "interface", "layout", "color", "colour", "coding", "task", "event", "star",
                "dark", "mobile", "offline", "user", "people", "person", "team", "work"}},
        {"NNS", {"notes", "notebooks", "apps", "features", "options", "updates", "bugs", "crashes",
                 "stars", "users", "lists", "numbers", "reminders", "tasks", "events", "months",
                 "days", "weeks", "years", "files", "photos", "images", "devices", "phones",
                 "things", "issues", "problems", "tags", "changes", "ideas", "times", "words"}},
        {"JJ", {"good", "great", "bad", "best", "new", "old", "last", "first", "few", "many",
                "more", "most", "other", "same", "easy", "hard", "useful", "useless", "slow",
                "fast", "nice", "awesome", "amazing", "terrible", "horrible", "simple", "free",
                "able", "unable", "whole", "automatic", "auto", "repetitive", "appalling",
                "annoying", "helpful", "perfect", "excellent", "favorite", "favourite", "clean",
                "beautiful", "latest", "recent", "little", "big", "small", "full", "main",
                "basic", "own", "such", "several", "sure", "happy", "frustrating", "reliable",
                "impossible", "possible", "better", "worse", "fine", "handy", "solid", "smooth",
                "stable", "unusable", "laggy", "buggy", "essential", "fantastic", "wonderful"}},
        {"JJR", {"bigger", "smaller", "faster", "slower", "easier", "larger"}},
        {"JJS", {"biggest", "fastest", "easiest", "worst"}},
    };
    std::unordered_map<std::string, std::string> map;
    for (const auto& entry : entries) {
      for (std::string_view word : entry.words) map.emplace(std::string(word), std::string(entry.tag));
    }
    return map;
  }();
  return table;
}

// Nouns in the lexicon that are also common base-form verbs.
const std::unordered_set<std::string>& verb_capable() {
  static const std::unordered_set<std::string> words{
      "update", "upgrade", "crash", "sync", "search", "list", "support", "work", "use", "help",
      "need", "love", "change", "fix", "design", "note", "tag", "type", "log", "star", "text"};
  return words;
}

bool is_number(const std::string& word) {
  bool digit = false;
  for (char c : word) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '%') {
      return false;
    }
  }
  return digit;
}

std::string punct_tag(const std::string& token) {
  if (token == "." || token == "!" || token == "?") return ".";
  if (token == ",") return ",";
  if (token == ":" || token == ";" || token == "-" || token == "--" || token.starts_with("..")) return ":";
  if (token == "(" || token == "[" || token == "{") return "(";
  if (token == ")" || token == "]" || token == "}") return ")";
  if (token == "\"" || token == "'" || token == "''") return "''";
  if (token == "`" || token == "``") return "``";
  if (token == "$") return "$";
  if (token == "#") return "#";
  return "SYM";
}

bool all_punct(const std::string& token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_punct);
}

std::string suffix_tag(const std::string& surface, const std::string& lower, bool sentence_initial) {
  auto ends = [&](std::string_view suffix, std::size_t min_len) {
    return lower.size() >= min_len && lower.ends_with(suffix);
  };
  if (!sentence_initial && std::isupper(static_cast<unsigned char>(surface[0]))) return "NNP";
  if (ends("ing", 5)) return "VBG";
  if (ends("ed", 4)) return "VBD";
  if (ends("ly", 4)) return "RB";
  for (std::string_view s : {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ism", "ship"}) {
    if (ends(s, s.size() + 2)) return "NN";
  }
  for (std::string_view s : {"able", "ible", "ful", "ous", "ive", "less", "ical", "ish"}) {
    if (ends(s, s.size() + 2)) return "JJ";
  }
  if (ends("est", 6)) return "JJS";
  if (ends("s", 4) && !ends("ss", 2) && !ends("us", 2) && !ends("is", 2)) return "NNS";
  return "NN";
}

}  // namespace

std::string case_fold(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::string normalized = normalize_quotes(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && is_space(normalized[i])) ++i;
    std::size_t j = i;
    while (j < normalized.size() && !is_space(normalized[j])) ++j;
    if (j > i) split_chunk(std::string_view(normalized).substr(i, j - i), out);
    i = j;
  }
  return out;
}

const Tagset& Tagset::penn() {
  static const Tagset tagset(std::set<std::string, std::less<>>{
      "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS",
      "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO",
      "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "#", "$",
      "''", "``", "(", ")", ",", ".", ":"});
  return tagset;
}

Tagset Tagset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tagset file " + path.string());
  std::set<std::string, std::less<>> tags;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || (line[b] == '#' && line.size() > b + 1 && line[b + 1] == ' ')) continue;
    const auto e = line.find_last_not_of(" \t\r");
    tags.insert(line.substr(b, e - b + 1));
  }
  if (tags.empty()) throw InputError("tagset file " + path.string() + " is empty");
  return Tagset(std::move(tags));
}

std::vector<std::string> BaselineTagger::tag(std::span<const std::string> tokens) const {
  const auto& lex = lexicon();
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& surface = tokens[i];
    const std::string lower = case_fold(surface);
    const bool initial = i == 0 || tags.back() == ".";
    const std::string prev = i == 0 ? std::string() : case_fold(tokens[i - 1]);
    const std::string prev_tag = tags.empty() ? std::string() : tags.back();

    std::string tag;
    if (surface.empty()) {
      tag = "SYM";
    } else if (all_punct(surface) && !lex.count(lower)) {
      tag = punct_tag(surface);
    } else if (is_number(surface)) {
      tag = "CD";
    } else if (auto it = lex.find(lower); it != lex.end()) {
      tag = it->second;
      if (lower == "'s" && (prev_tag == "NN" || prev_tag == "NNP" || prev_tag == "NNS")) tag = "POS";
    } else {
      tag = suffix_tag(surface, lower, initial);
    }

    // Base-form verbs and verb-capable nouns resolved from the left context.
    const bool verbal_context = prev == "please" || prev_tag == "TO" || prev_tag == "MD" ||
                                ((prev == "n't" || prev == "not") && i >= 2);
    if (tag == "VB" || (tag == "NN" && verb_capable().count(lower))) {
      if (verbal_context) {
        tag = "VB";
      } else if (prev_tag == "PRP" && prev != "it" && prev != "me" && prev != "us" && prev != "them") {
        tag = "VBP";
      } else if (tag == "VB" && (prev_tag == "DT" || prev_tag == "PRP$" || prev_tag == "JJ" ||
                                 prev_tag == "POS" || prev_tag == "CD" || prev_tag == "IN")) {
        tag = "NN";
      }
    }
    tags.push_back(std::move(tag));
  }
  return tags;
}

PassThroughTagger::PassThroughTagger(std::vector<std::string> tags, const Tagset& tagset)
    : tags_(std::move(tags)) {
  for (const auto& t : tags_) {
    if (!tagset.contains(t)) throw InputError("POS tag '" + t + "' is not in the tagset");
  }
}

std::vector<std::string> PassThroughTagger::tag(std::span<const std::string> tokens) const {
  if (tokens.size() != tags_.size()) {
    throw InputError("pre-tagged input has " + std::to_string(tags_.size()) + " tags for " +
                     std::to_string(tokens.size()) + " tokens");
  }
  return tags_;
}

Document annotate_tokens(std::string review_id, std::span<const std::string> surfaces,
                         std::span<const std::string> tags, const Gazetteer& gazetteer) {
  if (surfaces.size() != tags.size()) throw InputError("token/tag count mismatch in " + review_id);
  Document doc;
  doc.review_id = std::move(review_id);
  doc.tokens.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    doc.tokens.push_back(Token{surfaces[i], case_fold(surfaces[i]), tags[i], {}});
  }
  const std::size_t max_len = gazetteer.max_phrase_tokens();
  for (std::size_t start = 0; start < doc.tokens.size(); ++start) {
    std::string phrase;
    for (std::size_t len = 1; len <= max_len && start + len <= doc.tokens.size(); ++len) {
      if (len > 1) phrase += ' ';
      phrase += doc.tokens[start + len - 1].norm;
      for (const auto& key : gazetteer.lookup(phrase)) {
        for (std::size_t k = start; k < start + len; ++k) doc.tokens[k].entity_types.push_back(key);
      }
    }
  }
  for (auto& token : doc.tokens) {
    auto& types = token.entity_types;
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
  }
  return doc;
}

Document annotate(const RawReview& review, const Gazetteer& gazetteer, const PosTagger& tagger) {
  if (!review.tokens.empty()) {
    std::vector<std::string> surfaces;
    std::vector<std::string> tags;
    for (const auto& t : review.tokens) {
      surfaces.push_back(t.surface);
      tags.push_back(t.pos);
    }
    const PassThroughTagger pass(std::move(tags));
    return annotate_tokens(review.id, surfaces, pass.tag(surfaces), gazetteer);
  }
  const std::vector<std::string> surfaces = tokenize(review.text);
  return annotate_tokens(review.id, surfaces, tagger.tag(surfaces), gazetteer);
}

Document annotate(const RawReview& review, const Gazetteer& gazetteer) {
  static const BaselineTagger tagger;
  return annotate(review, gazetteer, tagger);
}

std::vector<LabeledExample> annotate_all(std::span<const RawReview> reviews,
                                         const Gazetteer& gazetteer) {
  std::vector<LabeledExample> out;
  out.reserve(reviews.size());
  for (const auto& review : reviews) {
    out.push_back({annotate(review, gazetteer), resolve_labels(review).labels});
  }
  return out;
}

}  // namespace revpat

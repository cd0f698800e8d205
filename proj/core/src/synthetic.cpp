#include "revpat/synthetic.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <string_view>

#include "revpat/rng.hpp"

namespace revpat {
namespace {

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& items, Rng& rng) {
  return items[rng.uniform_index(N)];
}

constexpr std::array<std::string_view, 26> kNeutral{
    "i love this app",
    "great for keeping my notes organized",
    "it works fine on my phone",
    "very useful for work and school",
    "the new design looks clean",
    "i use it every day",
    "best note taking app out there",
    "my whole family uses it",
    "the web clipper is handy",
    "it replaced my paper notebook",
    "simple and easy to use",
    "i have been a user for years",
    "the search is fast",
    "good app overall",
    "it does what i need",
    "the free version is enough for me",
    "syncing between my laptop and tablet is seamless",
    "nice way to collect recipes",
    "i keep all my lists here",
    "the reminders help me a lot",
    "it is a bit expensive but worth it",
    "the widget is nice",
    "i recommend it to everyone",
    "works offline too",
    "the tags make things easy to find",
    "not bad at all",
};

// Share single words with the planted signals but not their combinations.
constexpr std::array<std::string_view, 18> kDecoys{
    "please everyone give it a try",
    "5 stars from me",
    "5 star app",
    "sync works great",
    "i don't know what i did without it",
    "i don't use paper anymore",
    "it keeps getting better",
    "when i travel i take it everywhere",
    "please , keep up the good work",
    "i can not imagine working without it",
    "no crashing at all so far",
    "i can't complain",
    "i would not change a thing",
    "it is easy to add a photo or export a note",
    "the dark mode looks great",
    "i gave it 5 stars",
    "it used to keep crashing but the last update fixed that",
    "folders and tags keep my notes tidy",
};

constexpr std::array<std::string_view, 4> kApp{"the app", "evernote", "this app", "it"};
constexpr std::array<std::string_view, 6> kAction{"open", "save", "edit", "share", "delete", "search"};
constexpr std::array<std::string_view, 6> kObject{"a note", "my notebook", "an attachment",
                                                  "a photo", "a checklist", "a long note"};
constexpr std::array<std::string_view, 4> kSyncObject{"my notes", "my notebooks", "anything",
                                                      "my account"};
constexpr std::array<std::string_view, 6> kRequestVerb{"add", "bring", "include", "allow", "make",
                                                       "give"};
constexpr std::array<std::string_view, 8> kFeature{
    "a dark mode",          "folders inside folders", "handwriting support", "a calendar view",
    "table editing",        "markdown export",        "offline notebooks",   "a pin option"};

std::string defect_signal(Rng& rng) {
  if (rng.bernoulli(0.5)) {
    std::string s = std::string(pick(kApp, rng)) + " keeps crashing when i " +
                    std::string(pick(kAction, rng)) + " " + std::string(pick(kObject, rng));
    if (rng.bernoulli(0.3)) s = "since the last update " + s;
    return s;
  }
  std::string s = "i can't sync " + std::string(pick(kSyncObject, rng)) + " anymore";
  if (rng.bernoulli(0.4)) s += " on my phone";
  return s;
}

std::string improvement_signal(Rng& rng) {
  if (rng.bernoulli(0.5)) {
    return "please " + std::string(pick(kRequestVerb, rng)) + " " + std::string(pick(kFeature, rng));
  }
  const std::string_view verb = rng.bernoulli(0.5) ? "add" : "gave us";
  return "i would give 5 stars if you " + std::string(verb) + " " + std::string(pick(kFeature, rng));
}

std::string sentence_case(std::string s, Rng& rng) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  s += rng.bernoulli(0.8) ? "." : "!";
  return s;
}

void add_votes(RawReview& review, FeedbackType type, bool truth, Rng& rng) {
  std::array<bool, 3> votes{truth, truth, truth};
  // At most one annotator disagrees, so the majority is always the truth.
  if (rng.bernoulli(0.15)) {
    const auto who = rng.uniform_index(votes.size());
    votes[who] = !votes[who];
  }
  for (std::size_t a = 0; a < votes.size(); ++a) {
    review.votes.push_back({type, votes[a], "a" + std::to_string(a)});
  }
}

}  // namespace

std::vector<RawReview> generate_synthetic_corpus(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  std::vector<RawReview> reviews;
  reviews.reserve(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const bool defect = rng.bernoulli(spec.defect_rate);
    const bool improvement = rng.bernoulli(spec.improvement_rate);
    const bool labeled = rng.bernoulli(spec.labeled_fraction);

    std::vector<std::string> sentences;
    const auto neutral = 1 + rng.uniform_index(3);
    for (std::uint64_t k = 0; k < neutral; ++k) sentences.emplace_back(pick(kNeutral, rng));
    if (rng.bernoulli(0.5)) sentences.emplace_back(pick(kDecoys, rng));
    auto insert_at_random = [&](std::string s) {
      const auto pos = rng.uniform_index(sentences.size() + 1);
      sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(pos), std::move(s));
    };
    if (defect) insert_at_random(defect_signal(rng));
    if (improvement) insert_at_random(improvement_signal(rng));

    RawReview review;
    char id[32];
    std::snprintf(id, sizeof id, "s%05zu", i + 1);
    review.id = id;
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      if (k) review.text += ' ';
      review.text += sentence_case(sentences[k], rng);
    }
    if (labeled) {
      add_votes(review, FeedbackType::Defect, defect, rng);
      add_votes(review, FeedbackType::Improvement, improvement, rng);
    }
    reviews.push_back(std::move(review));
  }
  return reviews;
}

}  // namespace revpat

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "revpat/document.hpp"

namespace revpat {

struct AnnotatorVote {
  FeedbackType feedback_type;
  bool value;
  std::string annotator_id;
};

// A surface form with a POS tag supplied by the input (pre-tagged JSONL).
struct TaggedToken {
  std::string surface;
  std::string pos;
};

struct RawReview {
  std::string id;
  std::string text;
  std::vector<AnnotatorVote> votes;
  Labels labels;                     // explicit labels; these win over votes
  std::vector<TaggedToken> tokens;   // non-empty only for pre-tagged input
};

enum class InputFormat { Jsonl, Csv };

/// Picks the format from the file extension (.csv -> Csv, otherwise Jsonl).
InputFormat format_from_path(const std::filesystem::path& path);

/// Reads reviews from disk. Malformed records raise InputError naming the
/// 1-based line number; duplicate ids raise InputError naming the id.
std::vector<RawReview> ingest(const std::filesystem::path& path, InputFormat format);
std::vector<RawReview> parse_jsonl(std::istream& in);
std::vector<RawReview> parse_csv(std::istream& in);

/// One JSON object per line in the JSONL input format; parse_jsonl reads it back.
std::string review_to_jsonl(const RawReview& review);
void write_jsonl(std::span<const RawReview> reviews, std::ostream& out);

struct MajorityVote {
  bool value = false;
  bool tie = false;
};

/// True iff strictly more than half of the votes are true. An exact tie
/// resolves to false and sets `tie`. Throws InputError on an empty list.
MajorityVote majority_vote(std::span<const bool> votes);

struct LabelResolution {
  Labels labels;
  std::vector<FeedbackType> ties;  // feedback types whose votes were tied
};

/// Gold labels for a review: explicit labels first, majority vote otherwise.
LabelResolution resolve_labels(const RawReview& review);

struct VoteTally {
  int positive = 0;
  int negative = 0;
  int total() const { return positive + negative; }
};

/// Per-review vote tallies for one feedback type (reviews without votes skipped).
std::vector<VoteTally> tally_votes(std::span<const RawReview> reviews, FeedbackType type);

struct AgreementReport {
  double kappa = 0.0;                // Fleiss' kappa
  double observed_agreement = 0.0;   // mean per-review agreement P-bar, in [0, 1]
  double expected_agreement = 0.0;   // chance agreement P-bar_e
  int raters = 0;
  std::size_t reviews_used = 0;
  std::size_t reviews_excluded = 0;  // rating count differed from `raters`
  bool degenerate = false;           // P-bar_e == 1, kappa reported as 1
};

/// Fleiss' kappa over two categories. Reviews whose rating count differs from
/// the most common count are excluded and reported. Throws InputError when
/// fewer than two reviews remain or the rating count is below two.
AgreementReport fleiss_kappa(std::span<const VoteTally> tallies);

struct DatasetSplit {
  std::uint64_t seed = 0;
  std::vector<std::string> test;           // sorted
  std::vector<std::string> gold_train;     // sorted
  std::vector<std::string> distant_train;  // sorted

  bool operator==(const DatasetSplit&) const = default;
};

struct SplitItem {
  std::string id;
  bool labeled = false;
};

inline constexpr double kTestFraction = 0.20;

/// Holds out round(0.2 N) ids uniformly at random as test; everything else is
/// distant_train, and the labeled part of it is gold_train. Independent of the
/// input order.
DatasetSplit split(std::span<const SplitItem> items, std::uint64_t seed);
DatasetSplit split(std::span<const RawReview> reviews, std::uint64_t seed);
DatasetSplit split(std::span<const LabeledExample> examples, std::uint64_t seed);

std::string split_to_json(const DatasetSplit& split);
DatasetSplit split_from_json(const std::string& text);
void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

}  // namespace revpat

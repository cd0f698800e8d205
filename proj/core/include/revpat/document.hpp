#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revpat {

enum class FeedbackType { Defect, Improvement };

inline constexpr std::array<FeedbackType, 2> kFeedbackTypes{FeedbackType::Defect,
                                                             FeedbackType::Improvement};

std::string_view to_string(FeedbackType type);
/// Accepts "defect" / "improvement" (case-insensitive). Throws InputError otherwise.
FeedbackType parse_feedback_type(std::string_view text);

struct Token {
  std::string surface;
  std::string norm;
  std::string pos;
  std::vector<std::string> entity_types;  // sorted, unique

  bool has_entity(std::string_view type) const {
    return std::binary_search(entity_types.begin(), entity_types.end(), type);
  }
  bool operator==(const Token&) const = default;
};

struct Document {
  std::string review_id;
  std::vector<Token> tokens;

  bool operator==(const Document&) const = default;
};

// Partial label map: a feedback type may be unlabeled.
struct Labels {
  std::optional<bool> defect;
  std::optional<bool> improvement;

  std::optional<bool> get(FeedbackType type) const {
    return type == FeedbackType::Defect ? defect : improvement;
  }
  void set(FeedbackType type, bool value) {
    (type == FeedbackType::Defect ? defect : improvement) = value;
  }
  bool any() const { return defect.has_value() || improvement.has_value(); }
  bool operator==(const Labels&) const = default;
};

struct LabeledExample {
  Document document;
  Labels labels;
};

}  // namespace revpat

#include "revpat/document.hpp"

#include "revpat/error.hpp"
#include "revpat/linguistics.hpp"

namespace revpat {

std::string_view to_string(FeedbackType type) {
  return type == FeedbackType::Defect ? "defect" : "improvement";
}

FeedbackType parse_feedback_type(std::string_view text) {
  const std::string folded = case_fold(text);
  if (folded == "defect") return FeedbackType::Defect;
  if (folded == "improvement") return FeedbackType::Improvement;
  throw InputError("unknown feedback type '" + std::string(text) +
                   "' (expected defect or improvement)");
}

}  // namespace revpat

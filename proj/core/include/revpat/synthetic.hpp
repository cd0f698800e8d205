#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "revpat/corpus.hpp"

namespace revpat {

struct SyntheticSpec {
  std::size_t size = 2000;
  std::uint64_t seed = 2024;
  double labeled_fraction = 0.46;
  double defect_rate = 0.12;
  double improvement_rate = 0.14;
};

// Review-like sentences over a small vocabulary. Positives of each feedback
// type carry exactly one of two planted signal families:
//   defect:       "<app> keeps crashing when ..."   |  "i ca n't sync ... anymore"
//   improvement:  "please <verb> ..."                |  "... 5 stars if ..."
// Negatives contain decoys sharing single words with the signals.
std::vector<RawReview> generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace revpat

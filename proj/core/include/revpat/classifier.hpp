#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revpat/document.hpp"
#include "revpat/pattern.hpp"

namespace revpat {

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;  // sorted by index

// Vocabulary of token-norm unigrams ("w:"), bigrams ("b:") and POS bigrams
// ("p:"), each kept when it occurs in at least `min_df` training documents.
struct FeatureSpace {
  std::map<std::string, std::uint32_t> vocabulary;
  std::vector<std::uint32_t> document_frequency;
  std::vector<double> idf;
  std::size_t fitted_on = 0;
};

inline constexpr std::size_t kMinDocumentFrequency = 2;

std::vector<std::string> extract_features(const Document& doc);
FeatureSpace fit_feature_space(std::span<const Document> docs,
                               std::size_t min_df = kMinDocumentFrequency);
/// (1 + log tf) * idf, L2-normalised; features outside the vocabulary are dropped.
SparseVector featurize(const Document& doc, const FeatureSpace& space);

struct Hyperparameters {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::optional<double> class_weight_positive;  // default: #negative / #positive
  std::uint64_t seed = 1;
};

struct LinearModel {
  FeatureSpace space;
  std::vector<double> weights;
  double bias = 0.0;
  Hyperparameters hyperparameters;  // class weight resolved after training

  double decision_value(const Document& doc) const;
  bool predict(const Document& doc) const { return decision_value(doc) > 0.0; }
};

// Per-epoch regularised hinge objective, evaluated on the full training set.
struct TrainingTrace {
  std::vector<double> objective;
};

/// L2-regularised hinge loss minimised by seeded stochastic subgradient
/// descent with step 1/(lambda t). Throws TrainingError unless both classes
/// are present.
LinearModel train(std::span<const Document> docs, std::span<const bool> labels,
                  const Hyperparameters& hyper, TrainingTrace* trace = nullptr);

bool predict(const LinearModel& model, const Document& doc);

/// Labels every document with group_label and trains on the result. Throws
/// TrainingError when the group yields a single class.
LinearModel distant_train(std::span<const Document> unlabeled, const PatternGroup& group,
                          const Hyperparameters& hyper);

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace revpat

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revpat/classifier.hpp"
#include "revpat/corpus.hpp"
#include "revpat/document.hpp"
#include "revpat/gp.hpp"
#include "revpat/pattern.hpp"

namespace revpat {

class Gazetteer;

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Throws InputError on length mismatch or empty input.
Confusion score(std::span<const bool> predictions, std::span<const bool> gold);

/// 2PR/(P+R), 0 when P+R = 0.
double f1_score(double precision, double recall);

enum class Method { SvmGold, PatternsManual, PatternsLearned, DistantManual, DistantLearned };

inline constexpr std::array<Method, 5> kAllMethods{Method::SvmGold, Method::PatternsManual,
                                                   Method::PatternsLearned, Method::DistantManual,
                                                   Method::DistantLearned};

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

struct MetricsRow {
  Method method = Method::SvmGold;
  FeedbackType task = FeedbackType::Defect;
  Confusion metrics;
  double seconds = 0.0;
  std::size_t group_size = 0;  // learned or manual patterns used, if any
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ExperimentConfig {
  GpConfig gp;
  Hyperparameters svm;
  std::optional<PatternGroup> manual_defect;
  std::optional<PatternGroup> manual_improvement;
  std::size_t jobs = 1;
};

/// 64-bit FNV-1a over the canonical text of the configuration, as hex.
std::string config_hash(const ExperimentConfig& config);

/// Runs one method for both feedback types. Learners only see the split
/// portion their method is entitled to; test documents are scored against gold
/// labels at the very end, and only test reviews labeled for the task count.
MetricsReport run_experiment(Method method, std::span<const LabeledExample> corpus,
                             const DatasetSplit& split, const Gazetteer& gazetteer,
                             const ExperimentConfig& config);

/// method,task,precision,recall,f1,tp,fp,fn,tn,seconds
std::string report_csv(const MetricsReport& report);
std::string report_json(const MetricsReport& report);
std::string report_text(const MetricsReport& report);

struct PublishedResult {
  Method method;
  FeedbackType task;
  double precision;
  double recall;
  double f1;
};

/// Reference precision/recall/F1 figures for the five methods on the Evernote
/// review dataset, used as replication targets.
std::span<const PublishedResult> published_results();

}  // namespace revpat

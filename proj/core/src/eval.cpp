#include "revpat/eval.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "revpat/error.hpp"
#include "revpat/gazetteer.hpp"

namespace revpat {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::string_view, 5> kMethodNames{
    "svm_gold", "patterns_manual", "patterns_learned", "distant_manual", "distant_learned"};

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

struct TaskData {
  std::vector<Document> positives;  // gold_train, labeled positive for the task
  std::vector<Document> negatives;  // gold_train, labeled negative
};

TaskData gold_training_data(const std::unordered_map<std::string, const LabeledExample*>& by_id,
                            const DatasetSplit& split, FeedbackType task) {
  TaskData data;
  for (const auto& id : split.gold_train) {
    const LabeledExample& ex = *by_id.at(id);
    const auto label = ex.labels.get(task);
    if (!label) continue;
    (*label ? data.positives : data.negatives).push_back(ex.document);
  }
  return data;
}

std::uint64_t task_seed(std::uint64_t seed, FeedbackType task) {
  return seed + (task == FeedbackType::Defect ? 0 : 1);
}

PatternGroup learn_for_task(const TaskData& data, const Gazetteer& gazetteer,
                            const ExperimentConfig& config, FeedbackType task) {
  if (data.positives.empty()) {
    throw TrainingError("no positive " + std::string(to_string(task)) +
                        " examples in the gold training portion");
  }
  const TerminalPool pool = mine_terminal_pool(data.positives, data.negatives, config.gp, gazetteer);
  Rng rng(task_seed(config.gp.rng_seed, task));
  return learn_group(data.positives, data.negatives, config.gp, pool, rng, task, config.jobs).group;
}

const PatternGroup& manual_group(const ExperimentConfig& config, FeedbackType task) {
  const auto& group = task == FeedbackType::Defect ? config.manual_defect : config.manual_improvement;
  if (!group || group->patterns.empty()) {
    throw InputError("method needs a manual " + std::string(to_string(task)) + " pattern file");
  }
  return *group;
}

}  // namespace

Confusion score(std::span<const bool> predictions, std::span<const bool> gold) {
  if (predictions.size() != gold.size()) {
    throw InputError("score: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw InputError("score: no examples");
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i]) {
      ++(gold[i] ? c.tp : c.fp);
    } else {
      ++(gold[i] ? c.fn : c.tn);
    }
  }
  c.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  c.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  c.f1 = f1_score(c.precision, c.recall);
  return c;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

std::string_view to_string(Method method) { return kMethodNames[static_cast<std::size_t>(method)]; }

std::optional<Method> method_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == name) return kAllMethods[i];
  }
  return std::nullopt;
}

std::string config_hash(const ExperimentConfig& config) {
  std::ostringstream text;
  text << to_text(config.gp);
  const auto& h = config.svm;
  text << "lambda = " << fixed(h.lambda, 12) << "\nepochs = " << h.epochs
       << "\nclass_weight_positive = "
       << (h.class_weight_positive ? fixed(*h.class_weight_positive, 12) : std::string("auto"))
       << "\nsvm_seed = " << h.seed << "\n";
  if (config.manual_defect) text << group_to_dsl(*config.manual_defect);
  if (config.manual_improvement) text << group_to_dsl(*config.manual_improvement);

  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

MetricsReport run_experiment(Method method, std::span<const LabeledExample> corpus,
                             const DatasetSplit& split, const Gazetteer& gazetteer,
                             const ExperimentConfig& config) {
  std::unordered_map<std::string, const LabeledExample*> by_id;
  for (const auto& ex : corpus) by_id.emplace(ex.document.review_id, &ex);
  auto require = [&](const std::vector<std::string>& ids, const char* part) {
    for (const auto& id : ids) {
      if (!by_id.count(id)) throw InputError(std::string("split ") + part + " id '" + id + "' is not in the corpus");
    }
  };
  require(split.test, "test");
  require(split.gold_train, "gold_train");
  require(split.distant_train, "distant_train");
  if (split.test.empty()) throw InputError("split has no test reviews");

  // Learners only ever see these label-free documents from the test portion.
  std::vector<Document> test_docs;
  test_docs.reserve(split.test.size());
  for (const auto& id : split.test) test_docs.push_back(by_id.at(id)->document);
  std::vector<Document> distant_docs;
  if (method == Method::DistantManual || method == Method::DistantLearned) {
    for (const auto& id : split.distant_train) distant_docs.push_back(by_id.at(id)->document);
  }

  MetricsReport report;
  report.seed = config.gp.rng_seed;
  report.config_hash = config_hash(config);

  for (FeedbackType task : kFeedbackTypes) {
    const auto start = Clock::now();
    std::vector<char> predicted(test_docs.size(), 0);
    std::size_t group_size = 0;

    auto predict_with_group = [&](const PatternGroup& group) {
      group_size = group.patterns.size();
      for (std::size_t i = 0; i < test_docs.size(); ++i) predicted[i] = group_label(group, test_docs[i]);
    };
    auto predict_with_model = [&](const LinearModel& model) {
      for (std::size_t i = 0; i < test_docs.size(); ++i) predicted[i] = model.predict(test_docs[i]);
    };
    Hyperparameters svm = config.svm;
    svm.seed = task_seed(svm.seed, task);

    switch (method) {
      case Method::SvmGold: {
        const TaskData data = gold_training_data(by_id, split, task);
        std::vector<Document> docs = data.positives;
        docs.insert(docs.end(), data.negatives.begin(), data.negatives.end());
        auto labels = std::make_unique<bool[]>(docs.size());
        for (std::size_t i = 0; i < data.positives.size(); ++i) labels[i] = true;
        predict_with_model(train(docs, std::span<const bool>(labels.get(), docs.size()), svm));
        break;
      }
      case Method::PatternsManual:
        predict_with_group(manual_group(config, task));
        break;
      case Method::PatternsLearned:
        predict_with_group(learn_for_task(gold_training_data(by_id, split, task), gazetteer, config, task));
        break;
      case Method::DistantManual: {
        const PatternGroup& group = manual_group(config, task);
        group_size = group.patterns.size();
        predict_with_model(distant_train(distant_docs, group, svm));
        break;
      }
      case Method::DistantLearned: {
        const PatternGroup group =
            learn_for_task(gold_training_data(by_id, split, task), gazetteer, config, task);
        group_size = group.patterns.size();
        predict_with_model(distant_train(distant_docs, group, svm));
        break;
      }
    }

    // Final step: gold labels of the test reviews annotated for this task.
    std::vector<char> pred_scored;
    std::vector<char> gold_scored;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      const auto label = by_id.at(split.test[i])->labels.get(task);
      if (!label) continue;
      pred_scored.push_back(predicted[i]);
      gold_scored.push_back(*label);
    }
    if (gold_scored.empty()) {
      throw InputError("no test review is labeled for " + std::string(to_string(task)));
    }
    auto as_bools = [](const std::vector<char>& v) {
      auto out = std::make_unique<bool[]>(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] != 0;
      return out;
    };
    const auto p = as_bools(pred_scored);
    const auto g = as_bools(gold_scored);
    MetricsRow row;
    row.method = method;
    row.task = task;
    row.metrics = score(std::span<const bool>(p.get(), pred_scored.size()),
                        std::span<const bool>(g.get(), gold_scored.size()));
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    row.group_size = group_size;
    report.rows.push_back(row);
  }
  return report;
}

std::string report_csv(const MetricsReport& report) {
  std::string out = "method,task,precision,recall,f1,tp,fp,fn,tn,seconds\n";
  for (const auto& row : report.rows) {
    const auto& m = row.metrics;
    out += std::string(to_string(row.method)) + "," + std::string(to_string(row.task)) + "," +
           fixed(m.precision, 6) + "," + fixed(m.recall, 6) + "," + fixed(m.f1, 6) + "," +
           std::to_string(m.tp) + "," + std::to_string(m.fp) + "," + std::to_string(m.fn) + "," +
           std::to_string(m.tn) + "," + fixed(row.seconds, 3) + "\n";
  }
  return out;
}

std::string report_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    const auto& m = row.metrics;
    nlohmann::ordered_json r;
    r["method"] = std::string(to_string(row.method));
    r["task"] = std::string(to_string(row.task));
    r["precision"] = m.precision;
    r["recall"] = m.recall;
    r["f1"] = m.f1;
    r["tp"] = m.tp;
    r["fp"] = m.fp;
    r["fn"] = m.fn;
    r["tn"] = m.tn;
    r["seconds"] = row.seconds;
    r["group_size"] = row.group_size;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string report_text(const MetricsReport& report) {
  std::string out = "seed " + std::to_string(report.seed) + ", config " + report.config_hash + "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-17s %-12s %9s %6s %6s %5s %5s %5s %5s %8s\n", "method", "task",
                "precision", "recall", "f1", "tp", "fp", "fn", "tn", "seconds");
  out += line;
  for (const auto& row : report.rows) {
    const auto& m = row.metrics;
    std::snprintf(line, sizeof line, "%-17s %-12s %9.3f %6.3f %6.3f %5zu %5zu %5zu %5zu %8.2f\n",
                  std::string(to_string(row.method)).c_str(), std::string(to_string(row.task)).c_str(),
                  m.precision, m.recall, m.f1, m.tp, m.fp, m.fn, m.tn, row.seconds);
    out += line;
  }
  return out;
}

std::span<const PublishedResult> published_results() {
  static constexpr PublishedResult kTable[] = {
      {Method::SvmGold, FeedbackType::Defect, 0.39, 0.59, 0.47},
      {Method::SvmGold, FeedbackType::Improvement, 0.78, 0.54, 0.64},
      {Method::PatternsManual, FeedbackType::Defect, 0.61, 0.42, 0.50},
      {Method::PatternsManual, FeedbackType::Improvement, 0.81, 0.42, 0.56},
      {Method::PatternsLearned, FeedbackType::Defect, 0.91, 0.39, 0.54},
      {Method::PatternsLearned, FeedbackType::Improvement, 0.79, 0.51, 0.62},
      {Method::DistantManual, FeedbackType::Defect, 0.24, 0.67, 0.36},
      {Method::DistantManual, FeedbackType::Improvement, 0.39, 0.48, 0.43},
      {Method::DistantLearned, FeedbackType::Defect, 0.41, 0.59, 0.49},
      {Method::DistantLearned, FeedbackType::Improvement, 0.46, 0.44, 0.45},
  };
  return kTable;
}

}  // namespace revpat

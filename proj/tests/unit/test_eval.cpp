#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "revpat/corpus.hpp"
#include "revpat/error.hpp"
#include "revpat/eval.hpp"
#include "revpat/linguistics.hpp"

using namespace revpat;

using testing_support::default_gazetteer;

namespace {

Confusion score_of(std::initializer_list<int> pred, std::initializer_list<int> gold) {
  const std::vector<char> p(pred.begin(), pred.end()), g(gold.begin(), gold.end());
  return score({reinterpret_cast<const bool*>(p.data()), p.size()},
               {reinterpret_cast<const bool*>(g.data()), g.size()});
}

std::vector<LabeledExample> example_corpus() {
  std::ifstream in(testing_support::data_dir() / "fixtures" / "example_sentences.tsv");
  std::string line;
  std::getline(in, line);
  std::vector<LabeledExample> out;
  while (std::getline(in, line)) {
    RawReview r;
    r.id = line.substr(0, line.find('\t'));
    r.text = line.substr(line.find('\t') + 1);
    LabeledExample ex;
    ex.document = annotate(r, default_gazetteer());
    const bool defect = r.id == "S1" || r.id == "S2" || r.id == "S5" || r.id == "S6";
    ex.labels.defect = defect;
    ex.labels.improvement = !defect;
    out.push_back(std::move(ex));
  }
  return out;
}

// The example patterns split into their two feedback types.
ExperimentConfig example_config() {
  const PatternGroup all = load_group(testing_support::data_dir() / "patterns" / "examples.dsl");
  ExperimentConfig config;
  config.manual_defect = PatternGroup{};
  config.manual_improvement = PatternGroup{};
  config.manual_improvement->feedback_type = FeedbackType::Improvement;
  for (std::size_t i = 0; i < all.patterns.size(); ++i) {
    const bool defect = i == 0 || i == 1 || i == 4 || i == 5;
    (defect ? config.manual_defect : config.manual_improvement)->patterns.push_back(all.patterns[i]);
  }
  return config;
}

std::vector<LabeledExample> synthetic_corpus() {
  return annotate_all(ingest(testing_support::data_dir() / "synthetic" / "corpus.jsonl", InputFormat::Jsonl), default_gazetteer());
}

const MetricsRow& row_for(const MetricsReport& report, FeedbackType task) {
  return *std::find_if(report.rows.begin(), report.rows.end(), [&](const auto& r) { return r.task == task; });
}

}  // namespace

TEST(Score, PerfectPredictions) {
  const Confusion c = score_of({1, 0, 1, 0}, {1, 0, 1, 0});
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.tn, 2u);
  EXPECT_EQ(c.fp + c.fn, 0u);
  EXPECT_DOUBLE_EQ(c.precision, 1.0);
  EXPECT_DOUBLE_EQ(c.recall, 1.0);
  EXPECT_DOUBLE_EQ(c.f1, 1.0);
}

TEST(Score, CountsAndRates) {
  const Confusion c = score_of({1, 1, 1, 0, 0, 0}, {1, 0, 0, 1, 1, 0});
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 2u);
  EXPECT_EQ(c.fn, 2u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_DOUBLE_EQ(c.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.recall, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.f1, 1.0 / 3.0);
  const Confusion none = score_of({0, 0}, {0, 1});
  EXPECT_DOUBLE_EQ(none.precision, 0.0);
  EXPECT_DOUBLE_EQ(none.f1, 0.0);
}

TEST(Score, PermutationSymmetric) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<char> p(30), g(30);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = rng.bernoulli(0.4);
      g[i] = rng.bernoulli(0.3);
    }
    std::vector<std::size_t> perm(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<char> pp(p.size()), gp(g.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      pp[i] = p[perm[i]];
      gp[i] = g[perm[i]];
    }
    auto as_bool = [](const std::vector<char>& v) { return std::span<const bool>(reinterpret_cast<const bool*>(v.data()), v.size()); };
    const Confusion a = score(as_bool(p), as_bool(g));
    const Confusion b = score(as_bool(pp), as_bool(gp));
    EXPECT_EQ(a.tp, b.tp);
    EXPECT_EQ(a.fp, b.fp);
    EXPECT_EQ(a.fn, b.fn);
    EXPECT_DOUBLE_EQ(a.f1, b.f1);
  }
}

TEST(Score, MismatchAndEmptyAreErrors) {
  EXPECT_THROW(score_of({1, 0}, {1}), InputError);
  EXPECT_THROW(score_of({}, {}), InputError);
}

TEST(F1, HarmonicMean) {
  EXPECT_NEAR(f1_score(0.91, 0.39), 2 * 0.91 * 0.39 / 1.30, 1e-12);
  EXPECT_NEAR(f1_score(0.91, 0.39), 0.546, 5e-4);
  EXPECT_NEAR(f1_score(0.39, 0.59), 0.4696, 5e-4);
  EXPECT_DOUBLE_EQ(f1_score(0, 0), 0.0);
}

TEST(PublishedResults, InternallyConsistent) {
  const auto rows = published_results();
  ASSERT_EQ(rows.size(), 10u);
  std::set<std::pair<Method, FeedbackType>> seen;
  for (const auto& r : rows) {
    EXPECT_NEAR(f1_score(r.precision, r.recall), r.f1, 0.01) << to_string(r.method) << " " << to_string(r.task);
    seen.insert({r.method, r.task});
  }
  EXPECT_EQ(seen.size(), 10u);
  const auto learned = std::find_if(rows.begin(), rows.end(), [](const auto& r) {
    return r.method == Method::PatternsLearned && r.task == FeedbackType::Defect;
  });
  EXPECT_DOUBLE_EQ(learned->precision, 0.91);
  EXPECT_DOUBLE_EQ(learned->recall, 0.39);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(method_from_string(to_string(m)), m);
  EXPECT_EQ(to_string(Method::DistantLearned), "distant_learned");
  EXPECT_FALSE(method_from_string("svm"));
}

TEST(Experiment, ManualPatternsOnTheExampleSentences) {
  const auto corpus = example_corpus();
  DatasetSplit split;
  for (const auto& ex : corpus) split.test.push_back(ex.document.review_id);
  std::sort(split.test.begin(), split.test.end());
  const auto report = run_experiment(Method::PatternsManual, corpus, split, default_gazetteer(), example_config());
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(row_for(report, FeedbackType::Defect).metrics.recall, 1.0);
  EXPECT_DOUBLE_EQ(row_for(report, FeedbackType::Improvement).metrics.recall, 1.0);
  EXPECT_EQ(row_for(report, FeedbackType::Defect).group_size, 4u);
}

TEST(Experiment, MissingManualGroupIsAnError) {
  const auto corpus = example_corpus();
  DatasetSplit split;
  split.test = {"S1"};
  EXPECT_THROW(run_experiment(Method::PatternsManual, corpus, split, default_gazetteer(), ExperimentConfig{}),
               InputError);
  EXPECT_THROW(run_experiment(Method::DistantManual, corpus, split, default_gazetteer(), ExperimentConfig{}),
               InputError);
  split.test = {"nope"};
  EXPECT_THROW(run_experiment(Method::PatternsManual, corpus, split, default_gazetteer(), example_config()),
               InputError);
}

TEST(Experiment, OnlyLabeledTestReviewsAreScored) {
  auto corpus = example_corpus();
  corpus[0].labels.defect.reset();
  DatasetSplit split;
  for (const auto& ex : corpus) split.test.push_back(ex.document.review_id);
  const auto report = run_experiment(Method::PatternsManual, corpus, split, default_gazetteer(), example_config());
  const auto& m = row_for(report, FeedbackType::Defect).metrics;
  EXPECT_EQ(m.tp + m.fp + m.fn + m.tn, 7u);
  const auto& i = row_for(report, FeedbackType::Improvement).metrics;
  EXPECT_EQ(i.tp + i.fp + i.fn + i.tn, 8u);
}

class SyntheticExperiment : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new std::vector<LabeledExample>(synthetic_corpus());
    split_ = new DatasetSplit(split(*corpus_, 42));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete split_;
  }
  static std::vector<LabeledExample>* corpus_;
  static DatasetSplit* split_;
};
std::vector<LabeledExample>* SyntheticExperiment::corpus_ = nullptr;
DatasetSplit* SyntheticExperiment::split_ = nullptr;

TEST_F(SyntheticExperiment, GoldSvmLearnsThePlantedSignal) {
  const auto report = run_experiment(Method::SvmGold, *corpus_, *split_, default_gazetteer(), ExperimentConfig{});
  for (const auto& row : report.rows) EXPECT_GE(row.metrics.f1, 0.8) << to_string(row.task);
}

TEST_F(SyntheticExperiment, TestLabelsNeverReachTheLearner) {
  // Flipping every test label must not change a single prediction.
  ExperimentConfig config;
  config.gp.population_size = 60;
  config.gp.max_generations = 10;
  auto flipped = *corpus_;
  const std::set<std::string> test(split_->test.begin(), split_->test.end());
  for (auto& ex : flipped) {
    if (!test.count(ex.document.review_id)) continue;
    for (FeedbackType t : kFeedbackTypes)
      if (auto l = ex.labels.get(t)) ex.labels.set(t, !*l);
  }
  const auto a = run_experiment(Method::PatternsLearned, *corpus_, *split_, default_gazetteer(), config);
  const auto b = run_experiment(Method::PatternsLearned, flipped, *split_, default_gazetteer(), config);
  for (FeedbackType t : kFeedbackTypes) {
    const auto& ma = row_for(a, t).metrics;
    const auto& mb = row_for(b, t).metrics;
    EXPECT_EQ(ma.fp, mb.tp);  // same predictions, seen through flipped gold
    EXPECT_EQ(ma.tp, mb.fp);
  }
}

TEST_F(SyntheticExperiment, ReportsAndHash) {
  ExperimentConfig config;
  const auto report = run_experiment(Method::SvmGold, *corpus_, *split_, default_gazetteer(), config);
  const std::string csv = report_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,task,precision,recall,f1,tp,fp,fn,tn,seconds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\nsvm_gold,defect,"), std::string::npos);
  const std::string json = report_json(report);
  EXPECT_NE(json.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(json.find(report.config_hash), std::string::npos);
  EXPECT_NE(report_text(report).find("svm_gold"), std::string::npos);

  EXPECT_EQ(config_hash(config), config_hash(ExperimentConfig{}));
  EXPECT_EQ(config_hash(config).size(), 16u);
  ExperimentConfig other;
  other.svm.lambda = 1e-3;
  EXPECT_NE(config_hash(other), config_hash(config));
}

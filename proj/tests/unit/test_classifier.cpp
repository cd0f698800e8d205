#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "revpat/classifier.hpp"
#include "revpat/error.hpp"
#include "revpat/linguistics.hpp"

using namespace revpat;
using testing_support::default_gazetteer;

namespace {

Document text_doc(const std::string& text, const std::string& id = "d") {
  RawReview r;
  r.id = id;
  r.text = text;
  return annotate(r, default_gazetteer());
}

struct Toy {
  std::vector<Document> docs;
  std::vector<char> labels;  // vector<bool> has no contiguous storage
  std::span<const bool> span() const {
    return {reinterpret_cast<const bool*>(labels.data()), labels.size()};
  }
};

// Positives mention "crash" or "bug", negatives "great" or "love"; every
// document also carries shared filler so the classes overlap in vocabulary.
Toy separable() {
  const char* filler[] = {"the app", "this notes tool", "my phone", "the new version", "sync"};
  Toy t;
  for (int i = 0; i < 20; ++i) {
    const bool pos = i % 2 == 0;
    std::string text = std::string(filler[i % 5]) + (pos ? (i % 4 ? " has a bug" : " will crash") : (i % 4 == 1 ? " is great" : " i love it"));
    t.docs.push_back(text_doc(text, "t" + std::to_string(i)));
    t.labels.push_back(pos);
  }
  return t;
}

double dot(const SparseVector& x, const std::map<std::string, double>& w, const FeatureSpace& s) {
  double total = 0;
  for (const auto& [name, weight] : w) {
    const auto it = s.vocabulary.find(name);
    if (it == s.vocabulary.end()) continue;
    for (const auto& [i, v] : x)
      if (i == it->second) total += v * weight;
  }
  return total;
}

}  // namespace

TEST(Featurize, EmptyAndSingletonAndNorm) {
  const Toy t = separable();
  const FeatureSpace space = fit_feature_space(t.docs, 1);
  EXPECT_TRUE(featurize(text_doc(""), space).empty());
  EXPECT_TRUE(featurize(text_doc("zzzz qqqq"), space).empty());
  const SparseVector one = featurize(text_doc("crash"), space);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].second, 1.0);
  for (const auto& d : t.docs) {
    const SparseVector x = featurize(d, space);
    double n2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      n2 += x[i].second * x[i].second;
      if (i) EXPECT_LT(x[i - 1].first, x[i].first);
    }
    EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-12);
  }
}

TEST(Featurize, MultisetOfFeatures) {
  const Document d = text_doc("sync sync fails");
  auto f = extract_features(d);
  std::sort(f.begin(), f.end());
  const std::vector<std::string> expected{"b:sync fails", "b:sync sync", "p:" + d.tokens[0].pos + " " + d.tokens[1].pos,
                                          "p:" + d.tokens[1].pos + " " + d.tokens[2].pos, "w:fails", "w:sync",
                                          "w:sync"};
  auto e = expected;
  std::sort(e.begin(), e.end());
  EXPECT_EQ(f, e);
}

TEST(Featurize, TfIdfWeights) {
  const std::vector<Document> docs{text_doc("a b"), text_doc("a c"), text_doc("a a d")};
  const FeatureSpace space = fit_feature_space(docs, 1);
  const auto a = space.vocabulary.at("w:a");
  EXPECT_DOUBLE_EQ(space.idf[a], std::log(4.0 / 4.0) + 1.0);
  EXPECT_DOUBLE_EQ(space.idf[space.vocabulary.at("w:d")], std::log(4.0 / 2.0) + 1.0);
  EXPECT_EQ(fit_feature_space(docs).vocabulary.count("w:d"), 0u);  // min_df 2
  EXPECT_EQ(fit_feature_space(docs).vocabulary.count("w:a"), 1u);
}

TEST(Pegasos, SeparableToySetIsFitExactly) {
  const Toy t = separable();
  Hyperparameters h;
  h.lambda = 1e-3;
  h.epochs = 50;
  const LinearModel m = train(t.docs, t.span(), h);
  // Independent witness that the data is linearly separable in this space.
  const std::map<std::string, double> witness{{"w:bug", 1}, {"w:crash", 1}, {"w:great", -1}, {"w:love", -1}};
  for (std::size_t i = 0; i < t.docs.size(); ++i) {
    const double margin = dot(featurize(t.docs[i], m.space), witness, m.space);
    ASSERT_EQ(margin > 0, static_cast<bool>(t.labels[i]));
  }
  for (std::size_t i = 0; i < t.docs.size(); ++i) EXPECT_EQ(m.predict(t.docs[i]), static_cast<bool>(t.labels[i])) << i;
}

TEST(Pegasos, DeterministicForAFixedSeed) {
  const Toy t = separable();
  Hyperparameters h;
  h.seed = 9;
  EXPECT_EQ(model_to_json(train(t.docs, t.span(), h)), model_to_json(train(t.docs, t.span(), h)));
  Hyperparameters other = h;
  other.seed = 10;
  EXPECT_NE(model_to_json(train(t.docs, t.span(), h)), model_to_json(train(t.docs, t.span(), other)));
}

TEST(Pegasos, IdenticalDocumentsFollowTheMajorityClass) {
  const std::vector<Document> docs{text_doc("same words here", "a"), text_doc("same words here", "b"),
                                   text_doc("same words here", "c")};
  const std::vector<char> labels{1, 0, 0};
  const std::span<const bool> y{reinterpret_cast<const bool*>(labels.data()), labels.size()};
  // Unweighted: the optimum puts the shared score at -1.
  for (double lambda : {1e-4, 1e-2}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Hyperparameters h;
      h.lambda = lambda;
      h.seed = seed;
      h.class_weight_positive = 1.0;
      EXPECT_FALSE(train(docs, y, h).predict(docs[0])) << lambda << " " << seed;
    }
  }
  // Balanced weights make the loss flat on [-1, 1], so the optimum is a zero
  // score (false). SGD only approximates it; at the default lambda it lands
  // on the negative side for every seed tried.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Hyperparameters h;
    h.seed = seed;
    EXPECT_FALSE(train(docs, y, h).predict(docs[0])) << seed;
  }
}

TEST(Pegasos, ObjectiveIsNonIncreasingOnTheToySet) {
  const Toy t = separable();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Hyperparameters h;
    h.lambda = 1e-3;
    h.seed = seed;
    TrainingTrace trace;
    train(t.docs, t.span(), h, &trace);
    ASSERT_EQ(trace.objective.size(), h.epochs);
    for (std::size_t i = 1; i < trace.objective.size(); ++i) {
      EXPECT_LE(trace.objective[i], trace.objective[i - 1] + 1e-12) << "seed " << seed << " epoch " << i;
    }
  }
}

TEST(Pegasos, ObjectiveEndsFarBelowItsStart) {
  // Not strictly monotone in general: stochastic steps can bounce for one epoch.
  const Toy t = separable();
  for (double lambda : {1e-4, 1e-2, 1e-1}) {
    Hyperparameters h;
    h.lambda = lambda;
    TrainingTrace trace;
    train(t.docs, t.span(), h, &trace);
    EXPECT_LT(trace.objective.back(), trace.objective.front()) << lambda;
    for (double v : trace.objective) EXPECT_GE(v, 0.0);
  }
}

TEST(Pegasos, SingleClassIsRejected) {
  const Toy t = separable();
  const std::vector<char> all(t.docs.size(), 1);
  EXPECT_THROW(train(t.docs, {reinterpret_cast<const bool*>(all.data()), all.size()}, {}), TrainingError);
  const std::vector<char> short_labels{1};
  EXPECT_THROW(train(t.docs, {reinterpret_cast<const bool*>(short_labels.data()), 1}, {}), InputError);
}

TEST(Pegasos, ClassWeightDefaultsToNegativeOverPositive) {
  Toy t = separable();
  t.docs.push_back(text_doc("i love this", "x"));
  t.labels.push_back(0);
  const LinearModel m = train(t.docs, t.span(), {});
  ASSERT_TRUE(m.hyperparameters.class_weight_positive);
  EXPECT_DOUBLE_EQ(*m.hyperparameters.class_weight_positive, 11.0 / 10.0);
}

TEST(Pegasos, EmptyDocumentGetsTheSignOfTheBias) {
  const Toy t = separable();
  const LinearModel m = train(t.docs, t.span(), {});
  const Document empty = text_doc("");
  EXPECT_DOUBLE_EQ(m.decision_value(empty), m.bias);
  EXPECT_EQ(m.predict(empty), m.bias > 0);
}

TEST(DistantSupervision, EquivalentToTrainingOnPatternLabels) {
  const Toy t = separable();
  const PatternGroup g = group_from_dsl("SEQ(lit(bug|crash))\n");
  Hyperparameters h;
  h.seed = 4;
  std::vector<char> labels;
  for (const auto& d : t.docs) labels.push_back(group_label(g, d));
  EXPECT_EQ(model_to_json(distant_train(t.docs, g, h)),
            model_to_json(train(t.docs, {reinterpret_cast<const bool*>(labels.data()), labels.size()}, h)));
  EXPECT_THROW(distant_train(t.docs, group_from_dsl("SEQ(lit(zzz))\n"), h), TrainingError);
  EXPECT_THROW(distant_train(t.docs, group_from_dsl("SEQ(*)\n"), h), TrainingError);
}

TEST(ModelJson, RoundTripPreservesPredictions) {
  const Toy t = separable();
  Hyperparameters h;
  h.lambda = 0.01;
  const LinearModel m = train(t.docs, t.span(), h);
  const std::string text = model_to_json(m);
  const LinearModel back = model_from_json(text);
  EXPECT_EQ(model_to_json(back), text);
  for (const auto& d : t.docs) EXPECT_DOUBLE_EQ(back.decision_value(d), m.decision_value(d));
  EXPECT_DOUBLE_EQ(back.hyperparameters.lambda, 0.01);
  EXPECT_THROW(model_from_json("{}"), InputError);
  EXPECT_THROW(model_from_json("not json"), InputError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "oracle.hpp"
#include "revpat/corpus.hpp"
#include "revpat/rng.hpp"

using namespace revpat;

namespace {

std::vector<RawReview> jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

std::string error_of(const std::string& text, bool csv = false) {
  std::istringstream in(text);
  try {
    csv ? parse_csv(in) : parse_jsonl(in);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

std::vector<SplitItem> items(std::size_t n, std::size_t labeled) {
  std::vector<SplitItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"r" + std::to_string(i), i < labeled});
  return out;
}

bool disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  return std::none_of(b.begin(), b.end(), [&](const std::string& x) { return sa.count(x); });
}

}  // namespace

TEST(Ingest, ThreeJsonlRecords) {
  const auto r = jsonl(
      R"({"id":"r1","text":"Great app"})"
      "\n"
      R"({"id":"r2","text":"Crashes","labels":{"defect":true}})"
      "\n\n"
      R"({"id":"r3","text":"x","votes":{"defect":[true,false,true],"improvement":[false]}})"
      "\n");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1].labels.defect, std::optional<bool>(true));
  EXPECT_FALSE(r[1].labels.improvement.has_value());
  EXPECT_EQ(r[2].votes.size(), 4u);
  EXPECT_EQ(r[2].votes[1].annotator_id, "a1");
}

TEST(Ingest, DuplicateIdIsNamed) {
  const std::string e = error_of("{\"id\":\"r1\",\"text\":\"a\"}\n{\"id\":\"r1\",\"text\":\"b\"}\n");
  EXPECT_NE(e.find("duplicate"), std::string::npos);
  EXPECT_NE(e.find("r1"), std::string::npos);
}

TEST(Ingest, MalformedRecordNamesLine) {
  EXPECT_NE(error_of("{\"id\":\"r1\",\"text\":\"a\"}\n{oops\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("{\"id\":\"r1\"}\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("{\"id\":\"\",\"text\":\"a\"}\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("{\"id\":\"r\",\"text\":\"a\",\"labels\":{\"defect\":1}}\n").find("line 1"),
            std::string::npos);
}

TEST(Ingest, PreTaggedVariant) {
  const auto r = jsonl(R"({"id":"p","tokens":[{"surface":"Please","pos":"UH"},{"surface":"add","pos":"VB"}]})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].text, "Please add");
  ASSERT_EQ(r[0].tokens.size(), 2u);
  EXPECT_EQ(r[0].tokens[1].pos, "VB");
}

TEST(Ingest, CsvContract) {
  std::istringstream in(
      "id,text,defect_votes,improvement_votes\n"
      "r1,\"It crashes, often\",t;t;f,f;f;f\n"
      "r2,\"Say \"\"hi\"\"\",,\n");
  const auto r = parse_csv(in);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].text, "It crashes, often");
  EXPECT_EQ(r[0].votes.size(), 6u);
  EXPECT_EQ(resolve_labels(r[0]).labels.defect, std::optional<bool>(true));
  EXPECT_EQ(resolve_labels(r[0]).labels.improvement, std::optional<bool>(false));
  EXPECT_EQ(r[1].text, "Say \"hi\"");
  EXPECT_FALSE(resolve_labels(r[1]).labels.any());
}

TEST(Ingest, CsvErrors) {
  EXPECT_NE(error_of("id,text\n", true).find("header"), std::string::npos);
  EXPECT_NE(error_of("id,text,defect_votes,improvement_votes\nr1,a,x,\n", true).find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of("id,text,defect_votes,improvement_votes\nr1,a,t\n", true).find("line 2"),
            std::string::npos);
}

TEST(Ingest, JsonlWriterRoundTrips) {
  RawReview r;
  r.id = "x\"1";
  r.text = "Ünïcode \"quoted\"\ttext";
  r.labels.improvement = true;
  r.votes = {{FeedbackType::Defect, true, "a0"}, {FeedbackType::Defect, false, "a1"}};
  r.tokens = {{"Ünïcode", "NN"}};
  const std::vector<RawReview> in{r};
  std::ostringstream out;
  write_jsonl(in, out);
  const auto back = jsonl(out.str());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].id, r.id);
  EXPECT_EQ(back[0].text, r.text);
  EXPECT_EQ(back[0].labels, r.labels);
  EXPECT_EQ(back[0].votes.size(), 2u);
  EXPECT_EQ(back[0].tokens.size(), 1u);
}

TEST(MajorityVote, Examples) {
  const bool ttf[] = {true, true, false};
  const bool fff[] = {false, false, false};
  EXPECT_TRUE(majority_vote(ttf).value);
  EXPECT_FALSE(majority_vote(fff).value);
  EXPECT_THROW(majority_vote(std::span<const bool>()), InputError);
}

TEST(MajorityVote, AllTwoVoteCombinations) {
  for (int mask = 0; mask < 4; ++mask) {
    const bool v[] = {(mask & 1) != 0, (mask & 2) != 0};
    const MajorityVote m = majority_vote(v);
    EXPECT_EQ(m.value, mask == 3) << mask;
    EXPECT_EQ(m.tie, mask == 1 || mask == 2) << mask;
  }
}

TEST(MajorityVote, OrderInvariant) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    std::vector<char> v(1 + rng.uniform_index(7));
    for (auto& x : v) x = rng.bernoulli(0.5);
    auto a = std::make_unique<bool[]>(v.size());
    auto b = std::make_unique<bool[]>(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) a[k] = v[k];
    rng.shuffle(std::span<char>(v));
    for (std::size_t k = 0; k < v.size(); ++k) b[k] = v[k];
    const auto ma = majority_vote(std::span<const bool>(a.get(), v.size()));
    const auto mb = majority_vote(std::span<const bool>(b.get(), v.size()));
    ASSERT_EQ(ma.value, mb.value);
    ASSERT_EQ(ma.tie, mb.tie);
  }
}

TEST(MajorityVote, TieRecordedByResolution) {
  RawReview r;
  r.id = "r";
  r.text = "t";
  r.votes = {{FeedbackType::Defect, true, "a"}, {FeedbackType::Defect, false, "b"}};
  const auto res = resolve_labels(r);
  EXPECT_EQ(res.labels.defect, std::optional<bool>(false));
  ASSERT_EQ(res.ties.size(), 1u);
  r.labels.defect = true;  // explicit labels win
  EXPECT_EQ(resolve_labels(r).labels.defect, std::optional<bool>(true));
}

TEST(FleissKappa, MatchesDirectFormulaOnMixedTable) {
  // 10 reviews x 3 raters: positive vote counts.
  const int positives[] = {3, 0, 2, 1, 0, 3, 0, 1, 2, 0};
  std::vector<VoteTally> tallies;
  std::vector<std::vector<int>> table;
  for (int p : positives) {
    tallies.push_back({p, 3 - p});
    table.push_back({p, 3 - p});
  }
  const AgreementReport r = fleiss_kappa(tallies);
  EXPECT_NEAR(r.kappa, oracle::fleiss_kappa(table), 1e-12);
  // Hand evaluation: six unanimous rows (P_i = 1) and four 2-1 rows (P_i = 1/3)
  // give P-bar = 22/30; p_yes = 12/30 gives P-e = 0.52.
  EXPECT_NEAR(r.observed_agreement, 22.0 / 30.0, 1e-12);
  EXPECT_NEAR(r.expected_agreement, 0.52, 1e-12);
  EXPECT_NEAR(r.kappa, (22.0 / 30.0 - 0.52) / 0.48, 1e-12);
}

TEST(FleissKappa, TwoReviewsTwoRatersOppositeVotes) {
  // {T,F} and {F,T}: P_i = 0 each, P-e = 0.5, kappa = -1.
  const VoteTally t[] = {{1, 1}, {1, 1}};
  const AgreementReport r = fleiss_kappa(t);
  EXPECT_DOUBLE_EQ(r.observed_agreement, 0.0);
  EXPECT_DOUBLE_EQ(r.expected_agreement, 0.5);
  EXPECT_DOUBLE_EQ(r.kappa, -1.0);
}

TEST(FleissKappa, PerfectAgreement) {
  const VoteTally mixed[] = {{3, 0}, {0, 3}, {3, 0}};
  EXPECT_DOUBLE_EQ(fleiss_kappa(mixed).kappa, 1.0);
  const VoteTally one_category[] = {{0, 3}, {0, 3}};
  const AgreementReport r = fleiss_kappa(one_category);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.kappa, 1.0);
}

TEST(FleissKappa, ExcludesDeviatingRatingCounts) {
  const VoteTally t[] = {{3, 0}, {1, 2}, {2, 1}, {4, 1}};
  const AgreementReport r = fleiss_kappa(t);
  EXPECT_EQ(r.raters, 3);
  EXPECT_EQ(r.reviews_used, 3u);
  EXPECT_EQ(r.reviews_excluded, 1u);
}

TEST(FleissKappa, Errors) {
  const VoteTally one[] = {{2, 1}};
  EXPECT_THROW(fleiss_kappa(one), InputError);
  const VoteTally single_rater[] = {{1, 0}, {0, 1}};
  EXPECT_THROW(fleiss_kappa(single_rater), InputError);
}

TEST(FleissKappa, InvariantUnderCategorySwap) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    std::vector<VoteTally> a, b;
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    for (int k = 0; k < 2 + static_cast<int>(rng.uniform_index(10)); ++k) {
      const int p = static_cast<int>(rng.uniform_index(n + 1));
      a.push_back({p, n - p});
      b.push_back({n - p, p});
    }
    ASSERT_NEAR(fleiss_kappa(a).kappa, fleiss_kappa(b).kappa, 1e-12);
  }
}

TEST(Split, HundredReviewsSeedSeven) {
  const auto all = items(100, 46);
  const DatasetSplit s = split(all, 7);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.distant_train.size(), 80u);
  EXPECT_TRUE(disjoint(s.test, s.distant_train));
  EXPECT_TRUE(disjoint(s.test, s.gold_train));
  std::set<std::string> labeled;
  for (const auto& it : all) {
    if (it.labeled) labeled.insert(it.id);
  }
  std::size_t labeled_outside_test = 0;
  for (const auto& id : s.distant_train) labeled_outside_test += labeled.count(id);
  EXPECT_EQ(s.gold_train.size(), labeled_outside_test);
  for (const auto& id : s.gold_train) EXPECT_TRUE(labeled.count(id));
  std::set<std::string> cover(s.test.begin(), s.test.end());
  cover.insert(s.distant_train.begin(), s.distant_train.end());
  EXPECT_EQ(cover.size(), 100u);
}

TEST(Split, PublishedDatasetArithmetic) {
  const DatasetSplit s = split(items(4470, 2056), 1);
  EXPECT_EQ(s.test.size(), 894u);
  EXPECT_EQ(s.distant_train.size(), 3576u);
}

TEST(Split, DeterministicAndOrderIndependent) {
  auto all = items(57, 30);
  const DatasetSplit a = split(all, 3);
  EXPECT_EQ(a, split(all, 3));
  std::reverse(all.begin(), all.end());
  EXPECT_EQ(a, split(all, 3));
  EXPECT_NE(a.test, split(all, 4).test);
}

TEST(Split, JsonRoundTripAndValidation) {
  const DatasetSplit s = split(items(30, 10), 9);
  EXPECT_EQ(split_from_json(split_to_json(s)), s);
  EXPECT_THROW(split_from_json(R"({"seed":1,"test":["a"],"gold_train":[],"distant_train":["a"]})"),
               InputError);
}

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

namespace fs = std::filesystem;
using testing_support::read_text;

namespace {

const fs::path kData = testing_support::data_dir();

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("revpat_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `revpat <args>`; stdout and stderr land in the test dir.
  int run(const std::string& args) {
    const std::string cmd = std::string("\"") + REVPAT_CLI + "\" " + args + " > \"" + (dir_ / "stdout").string() +
                            "\" 2> \"" + (dir_ / "stderr").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read_text(dir_ / "stdout"); }
  std::string err() const { return read_text(dir_ / "stderr"); }
  std::string path(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }
  std::string read(const std::string& name) const { return read_text(dir_ / name); }

  static std::string synthetic() { return "\"" + (kData / "synthetic" / "corpus.jsonl").string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, IngestWritesPreprocessedCorpusAndSplit) {
  ASSERT_EQ(run("ingest --in " + synthetic() + " --out " + path("pre.jsonl") + " --split-out " + path("split.json") +
                " --seed 42"),
            0)
      << err();
  EXPECT_NE(read("pre.jsonl").find("\"tokens\""), std::string::npos);
  EXPECT_NE(read("split.json").find("\"gold_train\""), std::string::npos);
  EXPECT_NE(out().find("kappa"), std::string::npos) << out();
}

TEST_F(Cli, DuplicateIdsExitTwo) {
  write("dup.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
  EXPECT_EQ(run("ingest --in " + path("dup.jsonl") + " --out " + path("o.jsonl")), 2);
  EXPECT_NE(err().find("a"), std::string::npos);
}

TEST_F(Cli, UnknownMethodExitsTwo) {
  EXPECT_EQ(run("eval --method nonsense --corpus " + synthetic()), 2);
}

TEST_F(Cli, MissingPatternFileExitsTwo) {
  write("c.jsonl", "{\"id\":\"a\",\"text\":\"hello\"}\n");
  EXPECT_EQ(run("match --patterns " + path("absent.dsl") + " --in " + path("c.jsonl")), 2);
  EXPECT_EQ(run("eval --method patterns_manual --corpus " + synthetic()), 2);
}

TEST_F(Cli, MalformedArgumentsExitTwo) {
  EXPECT_EQ(run("learn --task nonsense --corpus " + synthetic() + " --out " + path("g.dsl")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, MatchOnEmptyCorpusWritesOnlyTheHeader) {
  write("empty.jsonl", "");
  ASSERT_EQ(run("match --patterns \"" + (kData / "patterns" / "examples.dsl").string() + "\" --in " +
                path("empty.jsonl") + " --out " + path("m.csv")),
            0)
      << err();
  EXPECT_EQ(read("m.csv"), "id,label\n");
}

TEST_F(Cli, ExampleSentencesAreAllMatchedByTheExamplePatterns) {
  std::ifstream in(kData / "fixtures" / "example_sentences.tsv");
  std::string line;
  std::getline(in, line);
  std::ostringstream jsonl;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    jsonl << "{\"id\":\"" << line.substr(0, tab) << "\",\"text\":\"" << line.substr(tab + 1) << "\"}\n";
  }
  write("examples.jsonl", jsonl.str());
  ASSERT_EQ(run("match --patterns \"" + (kData / "patterns" / "examples.dsl").string() + "\" --in " + path("examples.jsonl")),
            0)
      << err();
  EXPECT_EQ(out(), "id,label\nS1,true\nS2,true\nS3,true\nS4,true\nS5,true\nS6,true\nS7,true\nS8,true\n");
}

TEST_F(Cli, LearnIsByteIdenticalAcrossRunsAndJobCounts) {
  const std::string common = "learn --task improvement --corpus " + synthetic() +
                             " --seed 7 --population-size 60 --max-generations 10 ";
  ASSERT_EQ(run(common + "--out " + path("a.dsl") + " --log " + path("a.csv")), 0) << err();
  EXPECT_NE(out().find("held-out group F1"), std::string::npos);
  ASSERT_EQ(run(common + "--out " + path("b.dsl") + " --log " + path("b.csv")), 0) << err();
  ASSERT_EQ(run(common + "--jobs 3 --out " + path("c.dsl")), 0) << err();
  EXPECT_EQ(read("a.dsl"), read("b.dsl"));
  EXPECT_EQ(read("a.dsl"), read("c.dsl"));
  EXPECT_EQ(read("a.csv"), read("b.csv"));
  EXPECT_EQ(read("a.csv").substr(0, 21), "generation,best,mean\n");
  EXPECT_NE(read("a.dsl").find("@feedback improvement"), std::string::npos);

  // The learned group is a valid input for match.
  EXPECT_EQ(run("match --patterns " + path("a.dsl") + " --in " + synthetic()), 0) << err();
}

TEST_F(Cli, ZeroGenerationsStillProducesAGroup) {
  ASSERT_EQ(run("learn --task defect --corpus " + synthetic() + " --max-generations 0 --out " + path("g.json")), 0)
      << err();
  EXPECT_NE(read("g.json").find("\"patterns\""), std::string::npos);
}

TEST_F(Cli, TrainAndDistantTrainAreDeterministic) {
  ASSERT_EQ(run("train --task defect --corpus " + synthetic() + " --seed 3 --out " + path("a.json")), 0) << err();
  ASSERT_EQ(run("train --task defect --corpus " + synthetic() + " --seed 3 --out " + path("b.json")), 0) << err();
  EXPECT_EQ(read("a.json"), read("b.json"));
  EXPECT_NE(read("a.json").find("\"vocabulary\""), std::string::npos);

  const std::string manual = "\"" + (kData / "patterns" / "manual_defect.dsl").string() + "\"";
  ASSERT_EQ(run("distant-train --patterns " + manual + " --corpus " + synthetic() + " --out " + path("d1.json")), 0)
      << err();
  ASSERT_EQ(run("distant-train --patterns " + manual + " --corpus " + synthetic() + " --out " + path("d2.json")), 0);
  EXPECT_EQ(read("d1.json"), read("d2.json"));
}

TEST_F(Cli, EvalWritesReports) {
  ASSERT_EQ(run("eval --method svm_gold --corpus " + synthetic() + " --csv " + path("r.csv") + " --json " +
                path("r.json")),
            0)
      << err();
  const std::string csv = read("r.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,task,precision,recall,f1,tp,fp,fn,tn,seconds");
  EXPECT_NE(read("r.json").find("\"config_hash\""), std::string::npos);
  EXPECT_NE(out().find("svm_gold"), std::string::npos);
}

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --size 50 --out " + path("a.jsonl")), 0);
  ASSERT_EQ(run("synth --size 50 --out " + path("b.jsonl")), 0);
  EXPECT_EQ(read("a.jsonl"), read("b.jsonl"));
  std::istringstream lines(read("a.jsonl"));
  int n = 0;
  for (std::string l; std::getline(lines, l);) ++n;
  EXPECT_EQ(n, 50);
}

// revpat: command-line front end for the review-pattern toolkit.
//
//   ingest          validate a corpus, tag it, write a preprocessed JSONL file + split
//   learn           evolve a pattern group for one feedback type
//   match           label documents with a pattern group
//   train           linear classifier on gold labels
//   distant-train   linear classifier on pattern-generated labels
//   eval            run one or all experiment methods and report metrics
//   synth           write the synthetic planted-signal corpus
//
// Exit status: 0 success, 1 runtime failure, 2 usage or validation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revpat/classifier.hpp"
#include "revpat/corpus.hpp"
#include "revpat/error.hpp"
#include "revpat/eval.hpp"
#include "revpat/gazetteer.hpp"
#include "revpat/gp.hpp"
#include "revpat/linguistics.hpp"
#include "revpat/pattern.hpp"
#include "revpat/synthetic.hpp"

namespace {

using namespace revpat;

constexpr std::uint64_t kDefaultSeed = 42;

const std::vector<std::string> kGpKeys{
    "population_size", "max_generations", "max_group_stall", "max_depth", "max_children",
    "tournament_size", "elitism_count",   "crossover_rate",  "mutation_rate", "beta",
    "pool_top_k",      "cross_class_cutoff"};

std::string dashed(std::string key) {
  for (char& c : key) c = c == '_' ? '-' : c;
  return key;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

struct Common {
  std::string gazetteer;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;

  void add_to(CLI::App& cmd, bool with_jobs) {
    cmd.add_option("--gazetteer", gazetteer, "Gazetteer file (default: bundled)")->check(CLI::ExistingFile);
    cmd.add_option("--seed", seed, "Seed for every random choice");
    if (with_jobs) cmd.add_option("--jobs", jobs, "Fitness-evaluation threads")->check(CLI::PositiveNumber);
  }

  Gazetteer load_gazetteer() const {
    return revpat::load_gazetteer(gazetteer.empty() ? default_gazetteer_path() : std::filesystem::path(gazetteer));
  }
};

struct CorpusOptions {
  std::string corpus;
  std::string split_path;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--corpus", corpus, "Corpus file (.jsonl or .csv)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--split", split_path, "Split file written by `ingest` (default: recomputed from --seed)")
        ->check(CLI::ExistingFile);
  }

  std::vector<LabeledExample> load(const Gazetteer& gaz) const {
    const auto reviews = ingest(corpus, format_from_path(corpus));
    return annotate_all(reviews, gaz);
  }

  DatasetSplit split_for(std::span<const LabeledExample> examples, std::uint64_t seed) const {
    return split_path.empty() ? revpat::split(examples, seed) : load_split(split_path);
  }
};

struct GpOptions {
  std::string config;
  std::map<std::string, std::string> overrides;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config, "GP config file (key = value)")->check(CLI::ExistingFile);
    for (const auto& key : kGpKeys) {
      cmd.add_option_function<std::string>(
          "--" + dashed(key), [this, key](const std::string& v) { overrides[key] = v; },
          "Override " + key);
    }
  }

  GpConfig resolve(const std::optional<std::uint64_t>& seed) const {
    GpConfig gp = config.empty() ? GpConfig{} : load_gp_config(config);
    for (const auto& [key, value] : overrides) set_gp_option(gp, key, value);
    if (seed) gp.rng_seed = *seed;
    validate(gp);
    return gp;
  }
};

struct SvmOptions {
  std::optional<double> lambda;
  std::optional<std::size_t> epochs;
  std::optional<double> class_weight;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--lambda", lambda, "L2 regularization strength");
    cmd.add_option("--epochs", epochs, "Passes over the training data");
    cmd.add_option("--class-weight", class_weight, "Positive-class weight (default: #neg/#pos)");
  }

  Hyperparameters resolve(std::uint64_t seed) const {
    Hyperparameters h;
    if (lambda) h.lambda = *lambda;
    if (epochs) h.epochs = *epochs;
    h.class_weight_positive = class_weight;
    h.seed = seed;
    if (!(h.lambda > 0.0)) throw InputError("--lambda must be > 0");
    if (h.epochs == 0) throw InputError("--epochs must be >= 1");
    return h;
  }
};

FeedbackType task_from(const std::string& name) { return parse_feedback_type(name); }

// Gold-labeled documents of the given split portion, for one task.
void labeled_portion(std::span<const LabeledExample> examples, const std::vector<std::string>& ids,
                     FeedbackType task, std::vector<Document>& docs, std::vector<char>& labels) {
  std::map<std::string, const LabeledExample*> by_id;
  for (const auto& ex : examples) by_id.emplace(ex.document.review_id, &ex);
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("split id '" + id + "' is not in the corpus");
    if (const auto label = it->second->labels.get(task)) {
      docs.push_back(it->second->document);
      labels.push_back(*label);
    }
  }
}

std::unique_ptr<bool[]> to_bools(const std::vector<char>& v) {
  auto out = std::make_unique<bool[]>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] != 0;
  return out;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Learn lexico-semantic patterns and classifiers for app-review feedback"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "revpat 0.1.0");

  // ingest
  Common ingest_common;
  std::string ingest_in, ingest_out, ingest_split, ingest_format;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate, tag and split a corpus");
  ingest_cmd->add_option("--in", ingest_in, "Input corpus")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--format", ingest_format, "jsonl or csv (default: from extension)")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  ingest_cmd->add_option("--out", ingest_out, "Preprocessed JSONL output");
  ingest_cmd->add_option("--split-out", ingest_split, "Split JSON output");
  ingest_common.add_to(*ingest_cmd, false);

  // learn
  Common learn_common;
  CorpusOptions learn_corpus;
  GpOptions learn_gp;
  std::string learn_task, learn_out, learn_log;
  auto* learn_cmd = app.add_subcommand("learn", "Evolve a pattern group on the gold training portion");
  learn_cmd->add_option("--task", learn_task, "defect or improvement")->required()
      ->check(CLI::IsMember({"defect", "improvement"}));
  learn_cmd->add_option("--out", learn_out, "Group file (.dsl or .json)")->required();
  learn_cmd->add_option("--log", learn_log, "Fitness log CSV (generation,best,mean)");
  learn_corpus.add_to(*learn_cmd);
  learn_gp.add_to(*learn_cmd);
  learn_common.add_to(*learn_cmd, true);

  // match
  Common match_common;
  std::string match_patterns, match_in, match_out;
  auto* match_cmd = app.add_subcommand("match", "Label every document with a pattern group");
  match_cmd->add_option("--patterns", match_patterns, "Group file (.dsl or .json)")->required();
  match_cmd->add_option("--in", match_in, "Corpus file")->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--out", match_out, "CSV output (default: stdout)");
  match_common.add_to(*match_cmd, false);

  // train
  Common train_common;
  CorpusOptions train_corpus;
  SvmOptions train_svm;
  std::string train_task, train_out;
  auto* train_cmd = app.add_subcommand("train", "Train the classifier on gold labels");
  train_cmd->add_option("--task", train_task, "defect or improvement")->required()
      ->check(CLI::IsMember({"defect", "improvement"}));
  train_cmd->add_option("--out", train_out, "Model JSON output")->required();
  train_corpus.add_to(*train_cmd);
  train_svm.add_to(*train_cmd);
  train_common.add_to(*train_cmd, false);

  // distant-train
  Common distant_common;
  CorpusOptions distant_corpus;
  SvmOptions distant_svm;
  std::string distant_patterns, distant_out;
  auto* distant_cmd = app.add_subcommand("distant-train", "Train the classifier on pattern labels");
  distant_cmd->add_option("--patterns", distant_patterns, "Group file (.dsl or .json)")->required();
  distant_cmd->add_option("--out", distant_out, "Model JSON output")->required();
  distant_corpus.add_to(*distant_cmd);
  distant_svm.add_to(*distant_cmd);
  distant_common.add_to(*distant_cmd, false);

  // eval
  Common eval_common;
  CorpusOptions eval_corpus;
  GpOptions eval_gp;
  SvmOptions eval_svm;
  std::string eval_method = "all", eval_defect, eval_improvement, eval_csv, eval_json;
  auto* eval_cmd = app.add_subcommand("eval", "Run experiment methods and report metrics");
  eval_cmd->add_option("--method", eval_method,
                       "svm_gold, patterns_manual, patterns_learned, distant_manual, distant_learned or all");
  eval_cmd->add_option("--patterns-defect", eval_defect, "Manual defect group");
  eval_cmd->add_option("--patterns-improvement", eval_improvement, "Manual improvement group");
  eval_cmd->add_option("--csv", eval_csv, "CSV report output");
  eval_cmd->add_option("--json", eval_json, "JSON report output");
  eval_corpus.add_to(*eval_cmd);
  eval_gp.add_to(*eval_cmd);
  eval_svm.add_to(*eval_cmd);
  eval_common.add_to(*eval_cmd, true);

  // synth
  SyntheticSpec synth_spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic planted-signal corpus");
  synth_cmd->add_option("--out", synth_out, "JSONL output")->required();
  synth_cmd->add_option("--size", synth_spec.size, "Number of reviews")->capture_default_str();
  synth_cmd->add_option("--seed", synth_spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--labeled-fraction", synth_spec.labeled_fraction)->capture_default_str();
  synth_cmd->add_option("--defect-rate", synth_spec.defect_rate)->capture_default_str();
  synth_cmd->add_option("--improvement-rate", synth_spec.improvement_rate)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*ingest_cmd) {
    const InputFormat format = ingest_format.empty() ? format_from_path(ingest_in)
                               : ingest_format == "csv" ? InputFormat::Csv
                                                        : InputFormat::Jsonl;
    auto reviews = ingest(ingest_in, format);
    const Gazetteer gaz = ingest_common.load_gazetteer();
    std::size_t labeled = 0;
    std::size_t ties = 0;
    for (auto& review : reviews) {
      const Document doc = annotate(review, gaz);
      const LabelResolution resolution = resolve_labels(review);
      labeled += resolution.labels.any() ? 1 : 0;
      ties += resolution.ties.size();
      for (FeedbackType type : resolution.ties) {
        std::cerr << "tie: review " << review.id << " " << to_string(type) << " resolved to false\n";
      }
      review.labels = resolution.labels;
      review.tokens.clear();
      for (const auto& token : doc.tokens) review.tokens.push_back({token.surface, token.pos});
    }
    const DatasetSplit s = split(std::span<const RawReview>(reviews), ingest_common.seed.value_or(kDefaultSeed));
    std::cout << "ingested " << reviews.size() << " reviews (" << labeled << " labeled, " << ties
              << " tied votes)\n";
    std::cout << "split seed " << s.seed << ": " << s.test.size() << " test docs, " << s.gold_train.size()
              << " gold_train, " << s.distant_train.size() << " distant_train\n";
    for (FeedbackType type : kFeedbackTypes) {
      const auto tallies = tally_votes(reviews, type);
      if (tallies.size() < 2) continue;
      try {
        const AgreementReport r = fleiss_kappa(tallies);
        std::cout << "agreement " << to_string(type) << ": fleiss_kappa " << format_double(r.kappa)
                  << ", observed_agreement " << format_double(r.observed_agreement) << " ("
                  << r.reviews_used << " reviews x " << r.raters << " raters, " << r.reviews_excluded
                  << " excluded" << (r.degenerate ? ", degenerate" : "") << ")\n";
      } catch (const InputError& e) {
        std::cout << "agreement " << to_string(type) << ": n/a (" << e.what() << ")\n";
      }
    }
    if (!ingest_out.empty()) {
      std::ostringstream out;
      write_jsonl(reviews, out);
      write_file(ingest_out, out.str());
    }
    if (!ingest_split.empty()) save_split(s, ingest_split);
    return 0;
  }

  if (*learn_cmd) {
    const FeedbackType task = task_from(learn_task);
    const GpConfig gp = learn_gp.resolve(learn_common.seed);
    const Gazetteer gaz = learn_common.load_gazetteer();
    const auto examples = learn_corpus.load(gaz);
    const DatasetSplit s = learn_corpus.split_for(examples, learn_common.seed.value_or(gp.rng_seed));

    std::vector<Document> docs;
    std::vector<char> labels;
    labeled_portion(examples, s.gold_train, task, docs, labels);
    std::vector<Document> positives, negatives;
    for (std::size_t i = 0; i < docs.size(); ++i) (labels[i] ? positives : negatives).push_back(docs[i]);
    if (positives.empty()) {
      throw InputError("no positive " + learn_task + " examples in the gold training portion");
    }
    const TerminalPool pool = mine_terminal_pool(positives, negatives, gp, gaz);
    Rng rng(gp.rng_seed);
    const GroupLearningResult result = learn_group(positives, negatives, gp, pool, rng, task, learn_common.jobs);
    save_group(result.group, learn_out);
    if (!learn_log.empty()) write_file(learn_log, fitness_log_csv(result.log));

    std::cout << "learned " << result.group.patterns.size() << " " << learn_task << " patterns in "
              << result.attempts << " attempts (" << positives.size() << " positive, " << negatives.size()
              << " negative training docs)\n";
    for (const auto& step : result.accepted) {
      std::cout << "  attempt " << step.attempt << ": group F1 " << format_double(step.group_f1) << ", "
                << step.newly_covered << " newly covered\n";
    }
    std::cout << "training group F1 " << format_double(result.group_f1) << "\n";

    std::vector<Document> test_docs;
    std::vector<char> test_labels;
    labeled_portion(examples, s.test, task, test_docs, test_labels);
    if (!test_docs.empty()) {
      std::vector<char> predicted;
      for (const auto& doc : test_docs) predicted.push_back(group_label(result.group, doc));
      const auto p = to_bools(predicted);
      const auto g = to_bools(test_labels);
      const Confusion c = score(std::span<const bool>(p.get(), predicted.size()),
                                std::span<const bool>(g.get(), test_labels.size()));
      std::cout << "held-out group F1 " << format_double(c.f1) << " (precision "
                << format_double(c.precision) << ", recall " << format_double(c.recall) << ")\n";
    }
    return 0;
  }

  if (*match_cmd) {
    if (!std::filesystem::exists(match_patterns)) throw InputError("pattern file not found: " + match_patterns);
    const PatternGroup group = load_group(match_patterns);
    if (group.patterns.empty()) throw InputError("pattern file has no patterns: " + match_patterns);
    const Gazetteer gaz = match_common.load_gazetteer();
    const auto reviews = ingest(match_in, format_from_path(match_in));
    std::string out = "id,label\n";
    for (const auto& review : reviews) {
      out += review.id + "," + (group_label(group, annotate(review, gaz)) ? "true" : "false") + "\n";
    }
    if (match_out.empty()) {
      std::cout << out;
    } else {
      write_file(match_out, out);
    }
    return 0;
  }

  if (*train_cmd) {
    const FeedbackType task = task_from(train_task);
    const std::uint64_t seed = train_common.seed.value_or(kDefaultSeed);
    const Hyperparameters hyper = train_svm.resolve(seed);
    const Gazetteer gaz = train_common.load_gazetteer();
    const auto examples = train_corpus.load(gaz);
    const DatasetSplit s = train_corpus.split_for(examples, seed);
    std::vector<Document> docs;
    std::vector<char> labels;
    labeled_portion(examples, s.gold_train, task, docs, labels);
    const auto flags = to_bools(labels);
    const LinearModel model = train(docs, std::span<const bool>(flags.get(), labels.size()), hyper);
    save_model(model, train_out);
    std::cout << "trained " << train_task << " model on " << docs.size() << " gold documents ("
              << model.space.vocabulary.size() << " features)\n";
    return 0;
  }

  if (*distant_cmd) {
    if (!std::filesystem::exists(distant_patterns)) throw InputError("pattern file not found: " + distant_patterns);
    const PatternGroup group = load_group(distant_patterns);
    const std::uint64_t seed = distant_common.seed.value_or(kDefaultSeed);
    const Hyperparameters hyper = distant_svm.resolve(seed);
    const Gazetteer gaz = distant_common.load_gazetteer();
    const auto examples = distant_corpus.load(gaz);
    const DatasetSplit s = distant_corpus.split_for(examples, seed);
    std::map<std::string, const Document*> by_id;
    for (const auto& ex : examples) by_id.emplace(ex.document.review_id, &ex.document);
    std::vector<Document> docs;
    for (const auto& id : s.distant_train) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw InputError("split id '" + id + "' is not in the corpus");
      docs.push_back(*it->second);
    }
    const LinearModel model = distant_train(docs, group, hyper);
    save_model(model, distant_out);
    std::cout << "trained " << to_string(group.feedback_type) << " model on " << docs.size()
              << " pattern-labeled documents (" << model.space.vocabulary.size() << " features)\n";
    return 0;
  }

  if (*eval_cmd) {
    std::vector<Method> methods;
    if (eval_method == "all") {
      methods.assign(kAllMethods.begin(), kAllMethods.end());
    } else if (const auto m = method_from_string(eval_method)) {
      methods.push_back(*m);
    } else {
      throw InputError("unknown method '" + eval_method + "'");
    }
    ExperimentConfig config;
    config.gp = eval_gp.resolve(eval_common.seed);
    config.svm = eval_svm.resolve(eval_common.seed.value_or(kDefaultSeed));
    config.jobs = eval_common.jobs;
    if (!eval_defect.empty()) config.manual_defect = load_group(eval_defect, FeedbackType::Defect);
    if (!eval_improvement.empty()) {
      config.manual_improvement = load_group(eval_improvement, FeedbackType::Improvement);
    }
    const Gazetteer gaz = eval_common.load_gazetteer();
    const auto examples = eval_corpus.load(gaz);
    const DatasetSplit s = eval_corpus.split_for(examples, eval_common.seed.value_or(config.gp.rng_seed));

    MetricsReport report;
    for (Method method : methods) {
      const bool needs_manual = method == Method::PatternsManual || method == Method::DistantManual;
      if (needs_manual && (!config.manual_defect || !config.manual_improvement)) {
        if (eval_method != "all") {
          throw InputError(std::string(to_string(method)) +
                           " needs --patterns-defect and --patterns-improvement");
        }
        std::cerr << "skipping " << to_string(method) << ": no manual pattern files given\n";
        continue;
      }
      MetricsReport one = run_experiment(method, examples, s, gaz, config);
      report.seed = one.seed;
      report.config_hash = one.config_hash;
      report.rows.insert(report.rows.end(), one.rows.begin(), one.rows.end());
    }
    std::cout << report_text(report);
    if (!eval_csv.empty()) write_file(eval_csv, report_csv(report));
    if (!eval_json.empty()) write_file(eval_json, report_json(report));
    return 0;
  }

  if (*synth_cmd) {
    const auto reviews = generate_synthetic_corpus(synth_spec);
    std::ostringstream out;
    write_jsonl(reviews, out);
    write_file(synth_out, out.str());
    std::cout << "wrote " << reviews.size() << " reviews to " << synth_out << "\n";
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const revpat::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "revpat/document.hpp"
#include "revpat/pattern.hpp"
#include "revpat/rng.hpp"

namespace revpat {

class Gazetteer;

struct GpConfig {
  std::size_t population_size = 200;
  std::size_t max_generations = 50;
  std::size_t max_group_stall = 3;
  std::size_t max_depth = 5;
  std::size_t max_children = 4;
  std::size_t tournament_size = 5;
  std::size_t elitism_count = 2;
  double crossover_rate = 0.8;
  double mutation_rate = 0.2;
  double beta = 0.3;
  std::size_t pool_top_k = 200;
  std::size_t cross_class_cutoff = 100;
  std::uint64_t rng_seed = 42;

  TreeLimits limits() const { return {max_depth, max_children}; }
};

/// Throws InputError describing the first violated constraint.
void validate(const GpConfig& config);
/// `key = value` lines, '#' comments; keys are the field names above.
GpConfig parse_gp_config(std::istream& in, GpConfig base = {});
GpConfig load_gp_config(const std::filesystem::path& path, GpConfig base = {});
/// Sets one field by name. Throws InputError for unknown keys or bad values.
void set_gp_option(GpConfig& config, const std::string& key, const std::string& value);
/// Canonical text form (all keys, fixed order); parse_gp_config round-trips it.
std::string to_text(const GpConfig& config);

struct TerminalPool {
  std::vector<PatternNode> unigrams;          // Literal / Pos terminals
  std::vector<PatternNode> bigrams;           // two-terminal Sequences
  std::vector<PatternNode> entity_terminals;  // one per gazetteer key
  PatternNode wildcard = make_wildcard();

  /// Every single-token terminal: unigrams, entity terminals, wildcard.
  std::vector<PatternNode> token_terminals() const;
};

/// Ranks Literal/Pos unigrams and the four bigram shapes by document frequency
/// in `positives`, drops anything among the `cross_class_cutoff` most frequent
/// candidates of `negatives`, keeps the `pool_top_k` best, and adds every
/// entity type plus the wildcard. Throws TrainingError if no mined candidate
/// survives.
TerminalPool mine_terminal_pool(std::span<const Document> positives,
                                std::span<const Document> negatives, const GpConfig& config,
                                const Gazetteer& gazetteer);

enum class InitMethod { Full, Grow };

/// Random tree rooted at a Sequence. Full: every leaf sits at depth
/// `depth_limit`. Grow: children drawn from functions and terminals, depth at
/// most `depth_limit`. depth_limit must be >= 2.
PatternNode generate_individual(InitMethod method, std::size_t depth_limit,
                                const TerminalPool& pool, std::size_t max_children, Rng& rng);

struct RampSlot {
  InitMethod method;
  std::size_t depth;
};

/// Ramped half-and-half plan: floor(N/2) grow trees then the rest full, each
/// half cycling depths over [2, max_depth].
std::vector<RampSlot> ramp_schedule(std::size_t population_size, std::size_t max_depth);

struct FitnessScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
};

/// (1 + b^2) P R / (b^2 P + R); 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

struct Individual {
  PatternNode tree;
  double fitness = 0.0;  // F_beta(precision, recall)
  double precision = 0.0;
  double recall = 0.0;
  bool duplicate = false;  // structurally equal to an earlier member of its population

  // Fitness used for selection: duplicates lose 1%.
  double selection_fitness() const { return duplicate ? fitness * 0.99 : fitness; }
};

/// Reference fitness evaluated with doc_match.
FitnessScore fitness(const PatternNode& tree, std::span<const Document> positives,
                     std::span<const Document> negatives, double beta);

// Evaluates patterns against a fixed training collection. Documents are
// encoded once; results are cached by canonical DSL text. Evaluation of a
// population may use `jobs` threads; results do not depend on `jobs`.
class FitnessEvaluator {
 public:
  FitnessEvaluator(std::span<const Document> positives, std::span<const Document> negatives,
                   double beta, std::size_t jobs = 1);
  ~FitnessEvaluator();
  FitnessEvaluator(const FitnessEvaluator&) = delete;
  FitnessEvaluator& operator=(const FitnessEvaluator&) = delete;

  /// Restricts the positive set to the given indices (into the constructor's
  /// `positives`). Clears the cache.
  void set_active_positives(std::vector<std::size_t> indices);

  FitnessScore evaluate(const PatternNode& tree);
  /// Fills fitness fields and duplicate flags.
  void evaluate(std::vector<Individual>& population);

  /// Match vector over all positives (constructor order).
  std::vector<bool> match_positives(const PatternNode& tree) const;
  std::vector<bool> match_negatives(const PatternNode& tree) const;

  double beta() const { return beta_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double beta_;
};

std::vector<Individual> init_population(const GpConfig& config, const TerminalPool& pool,
                                        Rng& rng);

/// Fittest of `k` distinct uniformly sampled individuals; ties go to the
/// smaller tree, then to a random pick. Returns an index into `population`.
std::size_t tournament_select(std::span<const Individual> population, std::size_t k, Rng& rng);

/// Type-compatible subtree crossover producing one child of `first`.
/// Offspring deeper than the limit are retried up to 3 times, then `first`
/// is returned unchanged.
PatternNode crossover(const PatternNode& first, const PatternNode& second,
                      const TerminalPool& pool, const TreeLimits& limits, Rng& rng);
/// Subtree replacement by a grown tree, or a point mutation of one terminal.
PatternNode mutate(const PatternNode& tree, const TerminalPool& pool, const TreeLimits& limits,
                   Rng& rng);

struct GenerationStats {
  std::size_t attempt = 0;     // pattern attempt within learn_group
  std::size_t generation = 0;  // 0 = initial population
  double best = 0.0;
  double mean = 0.0;
};

struct EvolutionResult {
  Individual best;
  std::vector<GenerationStats> generations;
};

/// Runs at most max_generations generations (stopping early once a perfect
/// individual appears) and returns the best individual ever seen.
EvolutionResult evolve_one_pattern(FitnessEvaluator& evaluator, const GpConfig& config,
                                   const TerminalPool& pool, Rng& rng);
EvolutionResult evolve_one_pattern(std::span<const Document> positives,
                                   std::span<const Document> negatives, const GpConfig& config,
                                   const TerminalPool& pool, Rng& rng, std::size_t jobs = 1);

struct AcceptanceStep {
  std::size_t attempt = 0;
  double group_f1 = 0.0;          // on the full training set, after acceptance
  std::size_t newly_covered = 0;  // positives not covered before this pattern
};

struct GroupLearningResult {
  PatternGroup group;
  std::vector<AcceptanceStep> accepted;
  std::size_t attempts = 0;
  std::size_t final_stall = 0;  // consecutive rejected attempts at termination
  double group_f1 = 0.0;
  std::vector<GenerationStats> log;
};

/// Sequential covering: evolve a pattern on the uncovered positives (all
/// negatives kept), accept it iff it strictly raises the group's F1 on the full
/// training set, drop the positives it covers. Stops after max_group_stall
/// consecutive rejections or when every positive is covered.
GroupLearningResult learn_group(std::span<const Document> positives,
                                std::span<const Document> negatives, const GpConfig& config,
                                const TerminalPool& pool, Rng& rng,
                                FeedbackType feedback_type = FeedbackType::Defect,
                                std::size_t jobs = 1);

/// CSV "generation,best,mean" rows for every generation of every attempt.
std::string fitness_log_csv(std::span<const GenerationStats> log);

}  // namespace revpat

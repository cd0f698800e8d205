#include "revpat/gp.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "revpat/compiled_pattern.hpp"
#include "revpat/error.hpp"
#include "revpat/gazetteer.hpp"

namespace revpat {
namespace {

// ---------------------------------------------------------------------------
// Terminal pool mining

// Candidate keys: shape tag, then the values separated by a byte that cannot
// appear in a token.
constexpr char kSep = '\x1f';

void doc_candidates(const Document& doc, std::set<std::string>& out) {
  out.clear();
  const auto& t = doc.tokens;
  for (const auto& token : t) {
    out.insert("L" + std::string(1, kSep) + token.norm);
    out.insert("P" + std::string(1, kSep) + token.pos);
  }
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const std::string s(1, kSep);
    out.insert("LL" + s + t[i].norm + s + t[i + 1].norm);
    out.insert("PL" + s + t[i].pos + s + t[i + 1].norm);
    out.insert("LP" + s + t[i].norm + s + t[i + 1].pos);
    out.insert("PP" + s + t[i].pos + s + t[i + 1].pos);
  }
}

std::vector<std::pair<std::string, std::size_t>> rank_candidates(std::span<const Document> docs) {
  std::unordered_map<std::string, std::size_t> df;
  std::set<std::string> seen;
  for (const auto& doc : docs) {
    doc_candidates(doc, seen);
    for (const auto& key : seen) ++df[key];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return ranked;
}

PatternNode terminal_from(char shape, const std::string& value) {
  return shape == 'L' ? make_literal({value}) : make_pos(value);
}

PatternNode candidate_node(const std::string& key) {
  const auto first = key.find(kSep);
  const std::string shape = key.substr(0, first);
  if (shape.size() == 1) return terminal_from(shape[0], key.substr(first + 1));
  const auto second = key.find(kSep, first + 1);
  return make_sequence({terminal_from(shape[0], key.substr(first + 1, second - first - 1)),
                        terminal_from(shape[1], key.substr(second + 1))});
}

// ---------------------------------------------------------------------------
// Tree generation

enum class Context { Sequence, Token };

struct Generator {
  const TerminalPool& pool;
  const std::vector<PatternNode>& terminals;
  std::size_t max_children;
  Rng& rng;

  PatternNode terminal() { return terminals[rng.uniform_index(terminals.size())]; }

  PatternNode bigram() { return pool.bigrams[rng.uniform_index(pool.bigrams.size())]; }

  std::vector<NodeKind> functions(Context ctx) const {
    if (ctx == Context::Token) return {NodeKind::And, NodeKind::Or, NodeKind::Not};
    return {NodeKind::Sequence, NodeKind::And, NodeKind::Or, NodeKind::Not, NodeKind::Repetition};
  }

  std::size_t arity(NodeKind kind) {
    switch (kind) {
      case NodeKind::Sequence: return static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_children)));
      case NodeKind::And:
      case NodeKind::Or: return static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_children)));
      case NodeKind::Not: return static_cast<std::size_t>(rng.uniform_int(1, 2));
      default: return 1;
    }
  }

  PatternNode function(NodeKind kind, InitMethod method, std::size_t level, std::size_t limit) {
    PatternNode node;
    node.kind = kind;
    const Context child_ctx = kind == NodeKind::Sequence ? Context::Sequence : Context::Token;
    const std::size_t n = arity(kind);
    for (std::size_t i = 0; i < n; ++i) node.children.push_back(make(method, level + 1, limit, child_ctx));
    return node;
  }

  // Builds the node at `level` (root = 1) of a tree limited to `limit` levels.
  PatternNode make(InitMethod method, std::size_t level, std::size_t limit, Context ctx) {
    if (level >= limit) return terminal();
    const bool bigram_fits = ctx == Context::Sequence && !pool.bigrams.empty() && level + 1 == limit;
    const auto kinds = functions(ctx);
    if (method == InitMethod::Full) {
      // A bigram is a Sequence whose leaves land exactly on the limit.
      if (bigram_fits && rng.uniform_index(kinds.size() + 1) == kinds.size()) return bigram();
      return function(kinds[rng.uniform_index(kinds.size())], method, level, limit);
    }
    if (rng.bernoulli(0.5)) {
      const bool use_bigram = ctx == Context::Sequence && !pool.bigrams.empty() && level + 1 <= limit &&
                              rng.uniform_index(terminals.size() + pool.bigrams.size()) >= terminals.size();
      return use_bigram ? bigram() : terminal();
    }
    return function(kinds[rng.uniform_index(kinds.size())], method, level, limit);
  }
};

// Pre-order node addresses.
struct NodeRef {
  std::vector<std::size_t> path;
  std::size_t level;
  Context ctx;
  bool token_level;
};

void collect(const PatternNode& node, std::vector<std::size_t>& path, std::size_t level, Context ctx,
             std::vector<NodeRef>& out) {
  out.push_back({path, level, ctx, is_token_level(node)});
  const Context child_ctx = node.kind == NodeKind::Sequence ? Context::Sequence : Context::Token;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    collect(node.children[i], path, level + 1, child_ctx, out);
    path.pop_back();
  }
}

std::vector<NodeRef> collect(const PatternNode& root) {
  std::vector<NodeRef> out;
  std::vector<std::size_t> path;
  collect(root, path, 1, Context::Sequence, out);
  return out;
}

PatternNode& at(PatternNode& root, const std::vector<std::size_t>& path) {
  PatternNode* node = &root;
  for (std::size_t i : path) node = &node->children[i];
  return *node;
}

const PatternNode& at(const PatternNode& root, const std::vector<std::size_t>& path) {
  const PatternNode* node = &root;
  for (std::size_t i : path) node = &node->children[i];
  return *node;
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t positives) {
  const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = positives == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(positives);
  return f_beta(precision, recall, 1.0);
}

bool better(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return node_count(a.tree) < node_count(b.tree);
}

}  // namespace

std::vector<PatternNode> TerminalPool::token_terminals() const {
  std::vector<PatternNode> out = unigrams;
  out.insert(out.end(), entity_terminals.begin(), entity_terminals.end());
  out.push_back(wildcard);
  return out;
}

TerminalPool mine_terminal_pool(std::span<const Document> positives,
                                std::span<const Document> negatives, const GpConfig& config,
                                const Gazetteer& gazetteer) {
  if (positives.empty()) throw TrainingError("mine_terminal_pool: no positive documents");
  const auto ranked = rank_candidates(positives);
  std::unordered_set<std::string> excluded;
  const auto negative_ranked = rank_candidates(negatives);
  for (std::size_t i = 0; i < negative_ranked.size() && i < config.cross_class_cutoff; ++i) {
    excluded.insert(negative_ranked[i].first);
  }
  TerminalPool pool;
  std::size_t kept = 0;
  for (const auto& [key, df] : ranked) {
    if (kept >= config.pool_top_k) break;
    if (excluded.count(key)) continue;
    PatternNode node = candidate_node(key);
    if (find_violation(node, config.limits())) continue;
    (node.kind == NodeKind::Sequence ? pool.bigrams : pool.unigrams).push_back(std::move(node));
    ++kept;
  }
  if (kept == 0) {
    throw TrainingError("terminal pool is empty after removing the " +
                        std::to_string(config.cross_class_cutoff) +
                        " most frequent negative-class candidates; lower cross_class_cutoff");
  }
  for (const auto& key : gazetteer.keys()) pool.entity_terminals.push_back(make_entity(key));
  return pool;
}

PatternNode generate_individual(InitMethod method, std::size_t depth_limit, const TerminalPool& pool,
                                std::size_t max_children, Rng& rng) {
  if (depth_limit < 2) throw std::invalid_argument("generate_individual: depth_limit must be >= 2");
  const auto terminals = pool.token_terminals();
  Generator gen{pool, terminals, max_children, rng};
  return gen.function(NodeKind::Sequence, method, 1, depth_limit);
}

std::vector<RampSlot> ramp_schedule(std::size_t population_size, std::size_t max_depth) {
  const std::size_t grow = population_size / 2;
  const std::size_t span = max_depth >= 2 ? max_depth - 1 : 1;
  std::vector<RampSlot> slots;
  slots.reserve(population_size);
  for (std::size_t i = 0; i < population_size; ++i) {
    const bool is_grow = i < grow;
    const std::size_t k = is_grow ? i : i - grow;
    slots.push_back({is_grow ? InitMethod::Grow : InitMethod::Full, 2 + k % span});
  }
  return slots;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denominator = b2 * precision + recall;
  if (denominator <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denominator;
}

FitnessScore fitness(const PatternNode& tree, std::span<const Document> positives,
                     std::span<const Document> negatives, double beta) {
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& doc : positives) tp += doc_match(tree, doc) ? 1 : 0;
  for (const auto& doc : negatives) fp += doc_match(tree, doc) ? 1 : 0;
  FitnessScore score;
  score.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  score.recall = positives.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(positives.size());
  score.f_beta = f_beta(score.precision, score.recall, beta);
  return score;
}

// ---------------------------------------------------------------------------
// FitnessEvaluator

struct FitnessEvaluator::Impl {
  EncodedCorpus corpus;
  std::size_t positives;
  std::size_t negatives;
  std::vector<std::size_t> active;
  std::size_t jobs;
  std::unordered_map<std::string, FitnessScore> cache;

  Impl(std::vector<Document> docs, std::size_t p, std::size_t n, std::size_t j)
      : corpus(docs), positives(p), negatives(n), jobs(j) {
    active.resize(p);
    std::iota(active.begin(), active.end(), 0);
  }

  FitnessScore score(const PatternNode& tree, double beta) const {
    const CompiledPattern compiled(tree, corpus);
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i : active) tp += compiled.matches(i) ? 1 : 0;
    for (std::size_t i = 0; i < negatives; ++i) fp += compiled.matches(positives + i) ? 1 : 0;
    FitnessScore s;
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = active.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(active.size());
    s.f_beta = f_beta(s.precision, s.recall, beta);
    return s;
  }
};

namespace {
std::vector<Document> concat(std::span<const Document> a, std::span<const Document> b) {
  std::vector<Document> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}
}  // namespace

FitnessEvaluator::FitnessEvaluator(std::span<const Document> positives,
                                   std::span<const Document> negatives, double beta, std::size_t jobs)
    : impl_(std::make_unique<Impl>(concat(positives, negatives), positives.size(), negatives.size(),
                                   std::max<std::size_t>(jobs, 1))),
      beta_(beta) {}

FitnessEvaluator::~FitnessEvaluator() = default;

void FitnessEvaluator::set_active_positives(std::vector<std::size_t> indices) {
  for (std::size_t i : indices) {
    if (i >= impl_->positives) throw std::out_of_range("set_active_positives: index out of range");
  }
  impl_->active = std::move(indices);
  impl_->cache.clear();
}

FitnessScore FitnessEvaluator::evaluate(const PatternNode& tree) {
  const std::string key = print_dsl(tree);
  if (auto it = impl_->cache.find(key); it != impl_->cache.end()) return it->second;
  const FitnessScore s = impl_->score(tree, beta_);
  impl_->cache.emplace(key, s);
  return s;
}

void FitnessEvaluator::evaluate(std::vector<Individual>& population) {
  std::vector<std::string> keys;
  keys.reserve(population.size());
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> pending;  // first occurrence of each uncached key
  for (std::size_t i = 0; i < population.size(); ++i) {
    keys.push_back(print_dsl(population[i].tree));
    population[i].duplicate = !seen.insert(keys.back()).second;
    if (!population[i].duplicate && !impl_->cache.count(keys.back())) pending.push_back(i);
  }

  std::vector<FitnessScore> scores(pending.size());
  const std::size_t workers = std::min(impl_->jobs, pending.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < pending.size(); ++k) scores[k] = impl_->score(population[pending[k]].tree, beta_);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t k = w; k < pending.size(); k += workers) {
          scores[k] = impl_->score(population[pending[k]].tree, beta_);
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  for (std::size_t k = 0; k < pending.size(); ++k) impl_->cache.emplace(keys[pending[k]], scores[k]);

  for (std::size_t i = 0; i < population.size(); ++i) {
    const FitnessScore& s = impl_->cache.at(keys[i]);
    population[i].precision = s.precision;
    population[i].recall = s.recall;
    population[i].fitness = s.f_beta;
  }
}

std::vector<bool> FitnessEvaluator::match_positives(const PatternNode& tree) const {
  const CompiledPattern compiled(tree, impl_->corpus);
  std::vector<bool> out(impl_->positives);
  for (std::size_t i = 0; i < impl_->positives; ++i) out[i] = compiled.matches(i);
  return out;
}

std::vector<bool> FitnessEvaluator::match_negatives(const PatternNode& tree) const {
  const CompiledPattern compiled(tree, impl_->corpus);
  std::vector<bool> out(impl_->negatives);
  for (std::size_t i = 0; i < impl_->negatives; ++i) out[i] = compiled.matches(impl_->positives + i);
  return out;
}

// ---------------------------------------------------------------------------
// Population and operators

std::vector<Individual> init_population(const GpConfig& config, const TerminalPool& pool, Rng& rng) {
  std::vector<Individual> population;
  population.reserve(config.population_size);
  for (const auto& slot : ramp_schedule(config.population_size, config.max_depth)) {
    Individual ind;
    ind.tree = generate_individual(slot.method, slot.depth, pool, config.max_children, rng);
    population.push_back(std::move(ind));
  }
  return population;
}

std::size_t tournament_select(std::span<const Individual> population, std::size_t k, Rng& rng) {
  if (population.empty()) throw std::invalid_argument("tournament_select: empty population");
  k = std::clamp<std::size_t>(k, 1, population.size());
  std::vector<std::size_t> index(population.size());
  std::iota(index.begin(), index.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(index.size() - i));
    std::swap(index[i], index[j]);
  }
  std::vector<std::size_t> tied{index[0]};
  for (std::size_t i = 1; i < k; ++i) {
    const Individual& cand = population[index[i]];
    const Individual& best = population[tied.front()];
    const double cf = cand.selection_fitness();
    const double bf = best.selection_fitness();
    if (cf > bf || (cf == bf && node_count(cand.tree) < node_count(best.tree))) {
      tied.assign(1, index[i]);
    } else if (cf == bf && node_count(cand.tree) == node_count(best.tree)) {
      tied.push_back(index[i]);
    }
  }
  if (tied.size() == 1) return tied.front();
  return tied[rng.uniform_index(tied.size())];
}

PatternNode crossover(const PatternNode& first, const PatternNode& second, const TerminalPool& pool,
                      const TreeLimits& limits, Rng& rng) {
  (void)pool;
  const auto first_nodes = collect(first);
  const auto second_nodes = collect(second);
  if (first_nodes.size() < 2) return first;
  for (int attempt = 0; attempt < 4; ++attempt) {
    // Never the root: offspring stay Sequence-rooted.
    const NodeRef& target = first_nodes[1 + rng.uniform_index(first_nodes.size() - 1)];
    std::vector<const NodeRef*> donors;
    for (const auto& ref : second_nodes) {
      if (ref.token_level == target.token_level) donors.push_back(&ref);
    }
    if (donors.empty()) continue;
    const NodeRef& donor = *donors[rng.uniform_index(donors.size())];
    PatternNode child = first;
    at(child, target.path) = at(second, donor.path);
    if (!find_violation(child, limits)) return child;
  }
  return first;
}

PatternNode mutate(const PatternNode& tree, const TerminalPool& pool, const TreeLimits& limits, Rng& rng) {
  const auto terminals = pool.token_terminals();
  Generator gen{pool, terminals, limits.max_children, rng};
  const auto nodes = collect(tree);
  if (rng.bernoulli(0.5)) {
    const NodeRef& target = nodes[rng.uniform_index(nodes.size())];
    if (target.path.empty()) {
      return generate_individual(InitMethod::Grow, limits.max_depth, pool, limits.max_children, rng);
    }
    PatternNode child = tree;
    const std::size_t room = limits.max_depth - target.level + 1;
    at(child, target.path) = gen.make(InitMethod::Grow, 1, room, target.ctx);
    if (!find_violation(child, limits)) return child;
    return tree;
  }
  std::vector<const NodeRef*> leaves;
  for (const auto& ref : nodes) {
    if (is_terminal(at(tree, ref.path).kind)) leaves.push_back(&ref);
  }
  if (leaves.empty()) return tree;
  PatternNode child = tree;
  at(child, leaves[rng.uniform_index(leaves.size())]->path) = gen.terminal();
  return child;
}

// ---------------------------------------------------------------------------
// Evolution

EvolutionResult evolve_one_pattern(FitnessEvaluator& evaluator, const GpConfig& config,
                                   const TerminalPool& pool, Rng& rng) {
  validate(config);
  const TreeLimits limits = config.limits();
  EvolutionResult result;

  auto record = [&](std::size_t generation, const std::vector<Individual>& population) {
    double best = 0.0;
    double sum = 0.0;
    for (const auto& ind : population) {
      best = std::max(best, ind.fitness);
      sum += ind.fitness;
      if (better(ind, result.best)) result.best = ind;
    }
    result.generations.push_back({0, generation, best, sum / static_cast<double>(population.size())});
  };

  std::vector<Individual> population = init_population(config, pool, rng);
  evaluator.evaluate(population);
  result.best = population.front();
  record(0, population);

  std::vector<std::size_t> order(population.size());
  for (std::size_t generation = 1; generation <= config.max_generations; ++generation) {
    if (result.best.fitness >= 1.0) break;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double fa = population[a].selection_fitness();
      const double fb = population[b].selection_fitness();
      if (fa != fb) return fa > fb;
      return node_count(population[a].tree) < node_count(population[b].tree);
    });

    std::vector<Individual> next;
    next.reserve(config.population_size);
    for (std::size_t i = 0; i < config.elitism_count; ++i) next.push_back(population[order[i]]);
    while (next.size() < config.population_size) {
      PatternNode child = population[tournament_select(population, config.tournament_size, rng)].tree;
      if (rng.bernoulli(config.crossover_rate)) {
        const auto& mate = population[tournament_select(population, config.tournament_size, rng)].tree;
        child = crossover(child, mate, pool, limits, rng);
      }
      if (rng.bernoulli(config.mutation_rate)) child = mutate(child, pool, limits, rng);
      Individual ind;
      ind.tree = std::move(child);
      next.push_back(std::move(ind));
    }
    evaluator.evaluate(next);
    population = std::move(next);
    record(generation, population);
  }
  return result;
}

EvolutionResult evolve_one_pattern(std::span<const Document> positives,
                                   std::span<const Document> negatives, const GpConfig& config,
                                   const TerminalPool& pool, Rng& rng, std::size_t jobs) {
  if (positives.empty()) throw TrainingError("evolve_one_pattern: no positive documents");
  FitnessEvaluator evaluator(positives, negatives, config.beta, jobs);
  return evolve_one_pattern(evaluator, config, pool, rng);
}

GroupLearningResult learn_group(std::span<const Document> positives,
                                std::span<const Document> negatives, const GpConfig& config,
                                const TerminalPool& pool, Rng& rng, FeedbackType feedback_type,
                                std::size_t jobs) {
  if (positives.empty()) throw TrainingError("learn_group: no positive documents");
  validate(config);
  FitnessEvaluator evaluator(positives, negatives, config.beta, jobs);

  GroupLearningResult result;
  result.group.feedback_type = feedback_type;
  result.group.provenance = Provenance::Learned;

  std::vector<bool> covered(positives.size(), false);
  std::vector<bool> flagged(negatives.size(), false);
  std::size_t stall = 0;
  while (stall < config.max_group_stall) {
    std::vector<std::size_t> working;
    for (std::size_t i = 0; i < covered.size(); ++i) {
      if (!covered[i]) working.push_back(i);
    }
    if (working.empty()) break;
    evaluator.set_active_positives(std::move(working));

    EvolutionResult evolved = evolve_one_pattern(evaluator, config, pool, rng);
    for (auto& g : evolved.generations) {
      g.attempt = result.attempts;
      result.log.push_back(g);
    }

    const auto pos_match = evaluator.match_positives(evolved.best.tree);
    const auto neg_match = evaluator.match_negatives(evolved.best.tree);
    std::size_t tp = 0;
    std::size_t newly = 0;
    for (std::size_t i = 0; i < covered.size(); ++i) {
      tp += covered[i] || pos_match[i] ? 1 : 0;
      newly += !covered[i] && pos_match[i] ? 1 : 0;
    }
    std::size_t fp = 0;
    for (std::size_t i = 0; i < flagged.size(); ++i) fp += flagged[i] || neg_match[i] ? 1 : 0;
    const double candidate_f1 = f1_from_counts(tp, fp, positives.size());

    if (candidate_f1 > result.group_f1 && newly > 0) {
      for (std::size_t i = 0; i < covered.size(); ++i) covered[i] = covered[i] || pos_match[i];
      for (std::size_t i = 0; i < flagged.size(); ++i) flagged[i] = flagged[i] || neg_match[i];
      result.group.patterns.push_back(evolved.best.tree);
      result.accepted.push_back({result.attempts, candidate_f1, newly});
      result.group_f1 = candidate_f1;
      stall = 0;
    } else {
      ++stall;
    }
    ++result.attempts;
  }
  result.final_stall = stall;
  return result;
}

std::string fitness_log_csv(std::span<const GenerationStats> log) {
  std::string out = "generation,best,mean\n";
  char line[96];
  for (const auto& g : log) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", g.generation, g.best, g.mean);
    out += line;
  }
  return out;
}

}  // namespace revpat

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genap/fitness.hpp"
#include "genap/operators.hpp"
#include "genap/prompt.hpp"
#include "genap/rng.hpp"

namespace genap {

enum class InitMode { Random, User, Hybrid };

struct EvolutionConfig {
  std::size_t population_size = 20;
  std::size_t max_generations = 30;
  OperatorConfig operators{};
  InitMode init_mode = InitMode::Random;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::size_t max_label_words = 3;
};

struct Population {
  std::vector<Individual> individuals;
  std::size_t generation = 0;
};

/// Memoizes fitness by canonical prompt key. A key is never rewritten with a
/// different value within a run.
class FitnessCache {
 public:
  std::optional<double> lookup(const std::string& key) const;
  void store(const std::string& key, double fitness);
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, double>& entries() const { return entries_; }
  void restore(std::map<std::string, double> entries) {
    entries_ = std::move(entries);
  }

 private:
  std::map<std::string, double> entries_;
};

struct GenerationRecord {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::string best_key;
  std::size_t evaluations = 0;  // evaluator calls made this generation
  std::size_t cache_hits = 0;
};

struct RunHistory {
  std::vector<GenerationRecord> records;
};

struct EngineState {
  EvolutionConfig config;
  Population population;
  WordPool pool;
  FitnessCache cache;
  Rng rng;
  RunHistory history;
};

using CheckpointSink = std::function<void(const EngineState&)>;

Population initialize_population(const EvolutionConfig& cfg, const WordPool& pool,
                                 const std::vector<Prompt>& user_prompts,
                                 Rng& rng);

/// Fills in missing fitness values, consulting and feeding the cache.
/// Returns (evaluator calls, cache hits).
std::pair<std::size_t, std::size_t> evaluate_population(Population& pop,
                                                        Evaluator& evaluator,
                                                        FitnessCache& cache,
                                                        const EvolutionConfig& cfg);

/// Elitist truncation over parents ∪ offspring, preferring distinct keys.
Population environmental_selection(const Population& parents,
                                   const Population& offspring,
                                   const EvolutionConfig& cfg);

struct EvolveResult {
  Individual best;
  RunHistory history;
};

EvolveResult evolve(const EvolutionConfig& cfg, Evaluator& evaluator,
                    const WordPool& pool,
                    const std::vector<Prompt>& user_prompts = {},
                    const CheckpointSink& checkpoint_sink = {});

/// Continues a checkpointed run for extra_generations more generations.
EvolveResult resume(EngineState state, Evaluator& evaluator,
                    std::size_t extra_generations,
                    const CheckpointSink& checkpoint_sink = {});

const Individual& best_individual(const Population& pop);

/// Versioned single-document checkpoint serialization.
std::string save_checkpoint(const EngineState& state);
EngineState load_checkpoint(const std::string& bytes);

/// History export: delimiter-separated values with a header row.
std::string history_to_csv(const RunHistory& history);
RunHistory history_from_csv(const std::string& csv);

}  // namespace genap

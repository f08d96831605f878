#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "genap/prompt.hpp"
#include "genap/rng.hpp"

namespace genap {

enum class TaskKind { Classification, Generation };

struct OperatorConfig {
  double crossover_prob = 0.9;
  double mutation_prob = 0.4;
  std::size_t max_prompt_length = 5;
  TaskKind task_kind = TaskKind::Classification;
  int max_retries = 8;
};

/// Binary-tournament parent selection. All individuals must carry fitness.
std::pair<const Individual*, const Individual*> select_parents(
    const std::vector<Individual>& population, Rng& rng);

struct CrossoverResult {
  Prompt first;
  Prompt second;
  int applied_type = 0;  // 0 = no crossover happened
};

/// Applies one of the crossover types (1/3 for generation tasks, 1/2/3 for
/// classification) with probability crossover_prob, else returns the parents.
CrossoverResult crossover(const Prompt& p1, const Prompt& p2,
                          const OperatorConfig& cfg, Rng& rng);

std::pair<Prompt, Prompt> crossover_type1(const Prompt& p1, const Prompt& p2,
                                          Rng& rng);
std::pair<Prompt, Prompt> crossover_type2(const Prompt& p1, const Prompt& p2,
                                          Rng& rng);
std::pair<Prompt, Prompt> crossover_type3(const Prompt& p1, const Prompt& p2);

struct MutationResult {
  Prompt prompt;
  WordPool pool;
  int applied_type = 0;  // 0 = no mutation happened
};

/// Applies one mutation type (1/2/3 for generation tasks, 1..5 for
/// classification) with probability mutation_prob. Inapplicable draws are
/// resampled up to cfg.max_retries, then the prompt is returned unchanged.
MutationResult mutate(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng);

/// Removes a random word subset from Str1/Str2/both, depositing each
/// segment's removed run as a new pool entry.
MutationResult mutation_type1(const Prompt& p, const WordPool& pool, Rng& rng);

/// Inserts one pool entry contiguously into Str1 or Str2, honoring the cap.
Prompt mutation_type2(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng);

/// Replaces the segment order with a different uniform permutation.
Prompt mutation_type3(const Prompt& p, const OperatorConfig& cfg, Rng& rng);

/// Removes one word from a verbalizer class, never emptying it.
Prompt mutation_type4(const Prompt& p, Rng& rng);

/// Inserts a pool word into a verbalizer class, keeping classes disjoint.
Prompt mutation_type5(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng);

}  // namespace genap

#include "genap/operators.hpp"

#include <algorithm>
#include <set>

#include "genap/errors.hpp"

namespace genap {

namespace {

const Individual* tournament(const std::vector<Individual>& population,
                             Rng& rng) {
  const std::size_t n = population.size();
  std::size_t a = rng.uniform_index(n);
  std::size_t b = rng.uniform_index(n - 1);
  if (b >= a) ++b;
  const double fa = *population[a].fitness;
  const double fb = *population[b].fitness;
  if (fa > fb) return &population[a];
  if (fb > fa) return &population[b];
  return rng.bernoulli(0.5) ? &population[a] : &population[b];
}

bool word_in_verbalizer(const Verbalizer& v, const std::string& w) {
  return std::find(v.positive.begin(), v.positive.end(), w) != v.positive.end() ||
         std::find(v.negative.begin(), v.negative.end(), w) != v.negative.end();
}

}  // namespace

std::pair<const Individual*, const Individual*> select_parents(
    const std::vector<Individual>& population, Rng& rng) {
  if (population.size() < 2)
    throw PopulationTooSmallError("parent selection needs >= 2 individuals");
  for (const auto& ind : population) {
    if (!ind.fitness)
      throw UnevaluatedIndividualError("individual has no fitness");
  }
  const Individual* first = tournament(population, rng);
  const Individual* second = tournament(population, rng);
  return {first, second};
}

CrossoverResult crossover(const Prompt& p1, const Prompt& p2,
                          const OperatorConfig& cfg, Rng& rng) {
  if (!rng.bernoulli(cfg.crossover_prob)) return {p1, p2, 0};

  // Type 2 is deactivated when the task carries no verbalizer.
  const bool with_verbalizer = cfg.task_kind == TaskKind::Classification;
  static const int kClassTypes[] = {1, 2, 3};
  static const int kGenTypes[] = {1, 3};
  const int type = with_verbalizer ? kClassTypes[rng.uniform_index(3)]
                                   : kGenTypes[rng.uniform_index(2)];
  std::pair<Prompt, Prompt> out;
  switch (type) {
    case 1: out = crossover_type1(p1, p2, rng); break;
    case 2: out = crossover_type2(p1, p2, rng); break;
    default: out = crossover_type3(p1, p2); break;
  }
  return {std::move(out.first), std::move(out.second), type};
}

std::pair<Prompt, Prompt> crossover_type1(const Prompt& p1, const Prompt& p2,
                                          Rng& rng) {
  Prompt a = p1, b = p2;
  if (rng.bernoulli(0.5)) {
    std::swap(a.tmpl.str1, b.tmpl.str1);
  } else {
    std::swap(a.tmpl.str2, b.tmpl.str2);
  }
  return {a, b};
}

std::pair<Prompt, Prompt> crossover_type2(const Prompt& p1, const Prompt& p2,
                                          Rng& rng) {
  if (!p1.verbalizer || !p2.verbalizer)
    throw NoVerbalizerError("crossover type 2 needs verbalizers on both parents");
  Prompt a = p1, b = p2;
  if (rng.bernoulli(0.5)) {
    std::swap(a.verbalizer->positive, b.verbalizer->positive);
  } else {
    std::swap(a.verbalizer->negative, b.verbalizer->negative);
  }
  if (!verbalizer_disjoint(*a.verbalizer) || !verbalizer_disjoint(*b.verbalizer))
    return {p1, p2};  // swap would break class disjointness; undo
  return {a, b};
}

std::pair<Prompt, Prompt> crossover_type3(const Prompt& p1, const Prompt& p2) {
  Prompt a = p1, b = p2;
  std::swap(a.tmpl, b.tmpl);
  return {a, b};
}

MutationResult mutate(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng) {
  if (!rng.bernoulli(cfg.mutation_prob)) return {p, pool, 0};

  const bool with_verbalizer = cfg.task_kind == TaskKind::Classification;
  const int num_types = with_verbalizer ? 5 : 3;

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    const int type = static_cast<int>(rng.uniform_index(num_types)) + 1;
    switch (type) {
      case 1:
        if (p.tmpl.word_count() == 0) continue;
        {
          MutationResult r = mutation_type1(p, pool, rng);
          r.applied_type = 1;
          return r;
        }
      case 2:
        if (pool.template_entries.empty()) continue;
        return {mutation_type2(p, pool, cfg, rng), pool, 2};
      case 3:
        return {mutation_type3(p, cfg, rng), pool, 3};
      case 4: {
        if (!p.verbalizer) continue;
        if (p.verbalizer->positive.size() < 2 && p.verbalizer->negative.size() < 2)
          continue;
        return {mutation_type4(p, rng), pool, 4};
      }
      default: {
        if (!p.verbalizer || pool.verbalizer_entries.empty()) continue;
        return {mutation_type5(p, pool, cfg, rng), pool, 5};
      }
    }
  }
  return {p, pool, 0};
}

MutationResult mutation_type1(const Prompt& p, const WordPool& pool, Rng& rng) {
  if (p.tmpl.word_count() == 0)
    throw EmptyTemplateError("mutation type 1 needs a non-empty template");

  // Applicable targets: 0 = Str1, 1 = Str2, 2 = both.
  std::vector<int> targets;
  if (!p.tmpl.str1.empty()) targets.push_back(0);
  if (!p.tmpl.str2.empty()) targets.push_back(1);
  if (!p.tmpl.str1.empty() && !p.tmpl.str2.empty()) targets.push_back(2);
  const int target = targets[rng.uniform_index(targets.size())];

  MutationResult out{p, pool, 1};
  auto strip = [&rng, &out](WordList& segment) {
    const std::size_t k = rng.uniform_range(1, segment.size());
    const auto removed_at = rng.sample_indices(segment.size(), k);
    WordList kept, removed;
    std::size_t ri = 0;
    for (std::size_t i = 0; i < segment.size(); ++i) {
      if (ri < removed_at.size() && removed_at[ri] == i) {
        removed.push_back(segment[i]);
        ++ri;
      } else {
        kept.push_back(segment[i]);
      }
    }
    segment = std::move(kept);
    out.pool.template_entries.push_back(std::move(removed));
  };
  if (target == 0 || target == 2) strip(out.prompt.tmpl.str1);
  if (target == 1 || target == 2) strip(out.prompt.tmpl.str2);
  return out;
}

Prompt mutation_type2(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng) {
  if (pool.template_entries.empty())
    throw EmptyPoolError("mutation type 2 needs a non-empty template pool");

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    const WordList& entry =
        pool.template_entries[rng.uniform_index(pool.template_entries.size())];
    if (p.tmpl.word_count() + entry.size() > cfg.max_prompt_length) continue;
    Prompt out = p;
    WordList& segment = rng.bernoulli(0.5) ? out.tmpl.str1 : out.tmpl.str2;
    const std::size_t pos = rng.uniform_range(0, segment.size());
    segment.insert(segment.begin() + static_cast<std::ptrdiff_t>(pos),
                   entry.begin(), entry.end());
    return out;
  }
  return p;
}

Prompt mutation_type3(const Prompt& p, const OperatorConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    SegmentOrder candidate = kAllSegments;
    std::vector<SegmentId> perm(candidate.begin(), candidate.end());
    rng.shuffle(perm);
    std::copy(perm.begin(), perm.end(), candidate.begin());
    if (candidate != p.tmpl.order) {
      Prompt out = p;
      out.tmpl.order = candidate;
      return out;
    }
  }
  return p;
}

Prompt mutation_type4(const Prompt& p, Rng& rng) {
  if (!p.verbalizer)
    throw NoVerbalizerError("mutation type 4 needs a verbalizer");
  // A class is removable only while it keeps >= 1 word afterwards.
  std::vector<int> classes;
  if (p.verbalizer->positive.size() >= 2) classes.push_back(0);
  if (p.verbalizer->negative.size() >= 2) classes.push_back(1);
  if (classes.empty()) return p;

  Prompt out = p;
  WordList& words = classes[rng.uniform_index(classes.size())] == 0
                        ? out.verbalizer->positive
                        : out.verbalizer->negative;
  words.erase(words.begin() +
              static_cast<std::ptrdiff_t>(rng.uniform_index(words.size())));
  return out;
}

Prompt mutation_type5(const Prompt& p, const WordPool& pool,
                      const OperatorConfig& cfg, Rng& rng) {
  if (!p.verbalizer)
    throw NoVerbalizerError("mutation type 5 needs a verbalizer");
  if (pool.verbalizer_entries.empty())
    throw EmptyPoolError("mutation type 5 needs a non-empty verbalizer pool");

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    const std::string& word =
        pool.verbalizer_entries[rng.uniform_index(pool.verbalizer_entries.size())];
    const bool into_positive = rng.bernoulli(0.5);
    if (word_in_verbalizer(*p.verbalizer, word)) continue;
    Prompt out = p;
    (into_positive ? out.verbalizer->positive : out.verbalizer->negative)
        .push_back(word);
    return out;
  }
  return p;
}

}  // namespace genap

#include "genap/engine.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <future>
#include <set>
#include <sstream>

#include "genap/errors.hpp"

#include <nlohmann/json.hpp>

namespace genap {

namespace {

constexpr int kCheckpointVersion = 1;

Verbalizer random_verbalizer(const EvolutionConfig& cfg, const WordPool& pool,
                             Rng& rng) {
  std::vector<std::string> distinct;
  {
    std::set<std::string> seen;
    for (const auto& w : pool.verbalizer_entries)
      if (seen.insert(w).second) distinct.push_back(w);
  }
  if (distinct.size() < 2)
    throw InfeasibleVerbalizerError(
        "classification tasks need >= 2 distinct verbalizer pool words");

  const std::size_t d = distinct.size();
  const std::size_t kp =
      rng.uniform_range(1, std::min(cfg.max_label_words, d - 1));
  const std::size_t kn =
      rng.uniform_range(1, std::min(cfg.max_label_words, d - kp));
  rng.shuffle(distinct);
  Verbalizer v;
  v.positive.assign(distinct.begin(), distinct.begin() + static_cast<std::ptrdiff_t>(kp));
  v.negative.assign(distinct.begin() + static_cast<std::ptrdiff_t>(kp),
                    distinct.begin() + static_cast<std::ptrdiff_t>(kp + kn));
  return v;
}

Prompt random_prompt(const EvolutionConfig& cfg, const WordPool& pool, Rng& rng) {
  const WordList flat = pool.flattened_template_words();
  if (flat.empty())
    throw EmptyPoolError("random initialization needs a non-empty template pool");

  Prompt p;
  const std::size_t total = rng.uniform_range(0, cfg.operators.max_prompt_length);
  const std::size_t n1 = rng.uniform_range(0, total);
  for (std::size_t i = 0; i < total; ++i) {
    const std::string& w = flat[rng.uniform_index(flat.size())];
    (i < n1 ? p.tmpl.str1 : p.tmpl.str2).push_back(w);
  }
  std::vector<SegmentId> perm(kAllSegments.begin(), kAllSegments.end());
  rng.shuffle(perm);
  std::copy(perm.begin(), perm.end(), p.tmpl.order.begin());

  if (cfg.operators.task_kind == TaskKind::Classification)
    p.verbalizer = random_verbalizer(cfg, pool, rng);
  return p;
}

std::vector<Individual> make_offspring(EngineState& state) {
  const EvolutionConfig& cfg = state.config;
  std::vector<Individual> offspring;
  offspring.reserve(cfg.population_size);
  while (offspring.size() < cfg.population_size) {
    auto [pa, pb] = select_parents(state.population.individuals, state.rng);
    const CrossoverResult crossed =
        crossover(pa->prompt, pb->prompt, cfg.operators, state.rng);
    for (const Prompt* child : {&crossed.first, &crossed.second}) {
      MutationResult mutated = mutate(*child, state.pool, cfg.operators, state.rng);
      state.pool = std::move(mutated.pool);  // pool updates are serialized here
      offspring.push_back({std::move(mutated.prompt), std::nullopt});
      if (offspring.size() == cfg.population_size) break;  // drop odd surplus
    }
  }
  return offspring;
}

GenerationRecord make_record(const Population& pop, std::size_t evaluations,
                             std::size_t cache_hits) {
  GenerationRecord rec;
  rec.generation = pop.generation;
  rec.evaluations = evaluations;
  rec.cache_hits = cache_hits;
  const Individual& best = best_individual(pop);
  rec.best_fitness = *best.fitness;
  rec.best_key = canonical_key(best.prompt);
  double sum = 0.0;
  for (const auto& ind : pop.individuals) sum += *ind.fitness;
  rec.mean_fitness = sum / static_cast<double>(pop.individuals.size());
  return rec;
}

void append_record(EngineState& state, const GenerationRecord& rec) {
  if (!state.history.records.empty() &&
      rec.best_fitness < state.history.records.back().best_fitness)
    throw Error("elitism violated: best fitness decreased");
  state.history.records.push_back(rec);
}

EvolveResult run_loop(EngineState& state, Evaluator& evaluator,
                      std::size_t generations, const CheckpointSink& sink) {
  for (std::size_t g = 0; g < generations; ++g) {
    const auto [e1, h1] =
        evaluate_population(state.population, evaluator, state.cache, state.config);

    Population offspring;
    offspring.individuals = make_offspring(state);
    offspring.generation = state.population.generation;
    const auto [e2, h2] =
        evaluate_population(offspring, evaluator, state.cache, state.config);

    state.population =
        environmental_selection(state.population, offspring, state.config);
    append_record(state, make_record(state.population, e1 + e2, h1 + h2));
    if (sink) sink(state);
  }
  return {best_individual(state.population), state.history};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json template_to_json(const PromptTemplate& t) {
  nlohmann::json j;
  j["str1"] = t.str1;
  j["str2"] = t.str2;
  std::array<int, 4> ord;
  for (std::size_t i = 0; i < 4; ++i) ord[i] = static_cast<int>(t.order[i]);
  j["order"] = ord;
  return j;
}

PromptTemplate template_from_json(const nlohmann::json& j) {
  PromptTemplate t;
  t.str1 = j.at("str1").get<WordList>();
  t.str2 = j.at("str2").get<WordList>();
  const auto ord = j.at("order").get<std::array<int, 4>>();
  for (std::size_t i = 0; i < 4; ++i) t.order[i] = static_cast<SegmentId>(ord[i]);
  if (!is_valid_order(t.order))
    throw CorruptCheckpointError("checkpoint template order is not a permutation");
  return t;
}

nlohmann::json prompt_to_json(const Prompt& p) {
  nlohmann::json j;
  j["template"] = template_to_json(p.tmpl);
  if (p.verbalizer) {
    j["verbalizer"] = {{"positive", p.verbalizer->positive},
                       {"negative", p.verbalizer->negative}};
  }
  return j;
}

Prompt prompt_from_json(const nlohmann::json& j) {
  Prompt p;
  p.tmpl = template_from_json(j.at("template"));
  if (j.contains("verbalizer")) {
    Verbalizer v;
    v.positive = j["verbalizer"].at("positive").get<WordList>();
    v.negative = j["verbalizer"].at("negative").get<WordList>();
    p.verbalizer = std::move(v);
  }
  return p;
}

}  // namespace

std::optional<double> FitnessCache::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FitnessCache::store(const std::string& key, double fitness) {
  auto [it, inserted] = entries_.emplace(key, fitness);
  if (!inserted && it->second != fitness)
    throw Error("fitness cache key rewritten with a different value");
}

Population initialize_population(const EvolutionConfig& cfg, const WordPool& pool,
                                 const std::vector<Prompt>& user_prompts,
                                 Rng& rng) {
  if ((cfg.init_mode == InitMode::User || cfg.init_mode == InitMode::Hybrid) &&
      user_prompts.empty())
    throw NoUserPromptsError("init mode needs at least one user prompt");

  Population pop;
  pop.generation = 0;
  pop.individuals.reserve(cfg.population_size);
  switch (cfg.init_mode) {
    case InitMode::Random:
      for (std::size_t i = 0; i < cfg.population_size; ++i)
        pop.individuals.push_back({random_prompt(cfg, pool, rng), std::nullopt});
      break;
    case InitMode::User:
      for (std::size_t i = 0; i < cfg.population_size; ++i)
        pop.individuals.push_back(
            {user_prompts[i % user_prompts.size()], std::nullopt});
      break;
    case InitMode::Hybrid:
      for (std::size_t i = 0;
           i < std::min(user_prompts.size(), cfg.population_size); ++i)
        pop.individuals.push_back({user_prompts[i], std::nullopt});
      while (pop.individuals.size() < cfg.population_size)
        pop.individuals.push_back({random_prompt(cfg, pool, rng), std::nullopt});
      break;
  }
  return pop;
}

std::pair<std::size_t, std::size_t> evaluate_population(
    Population& pop, Evaluator& evaluator, FitnessCache& cache,
    const EvolutionConfig& cfg) {
  std::size_t calls = 0, hits = 0;

  std::vector<std::string> keys(pop.individuals.size());
  for (std::size_t i = 0; i < pop.individuals.size(); ++i)
    keys[i] = canonical_key(pop.individuals[i].prompt);

  if (cfg.parallelism > 1) {
    // Pre-compute distinct uncached keys and fan their evaluations out.
    // Fitness is a pure function of the prompt, so completion order is
    // irrelevant to the result.
    std::vector<std::pair<std::string, const Prompt*>> todo;
    std::set<std::string> scheduled;
    for (std::size_t i = 0; i < pop.individuals.size(); ++i) {
      if (pop.individuals[i].fitness || cache.lookup(keys[i])) continue;
      if (scheduled.insert(keys[i]).second)
        todo.emplace_back(keys[i], &pop.individuals[i].prompt);
    }
    for (std::size_t start = 0; start < todo.size(); start += cfg.parallelism) {
      const std::size_t end = std::min(todo.size(), start + cfg.parallelism);
      std::vector<std::future<double>> futures;
      for (std::size_t i = start; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          return evaluator.evaluate(*todo[i].second);
        }));
      }
      for (std::size_t i = start; i < end; ++i) {
        try {
          cache.store(todo[i].first, futures[i - start].get());
        } catch (const EvaluationFailedError&) {
          throw;
        } catch (const Error& e) {
          throw EvaluationFailedError(std::string(e.what()) + " [prompt " +
                                      todo[i].first + "]");
        }
        ++calls;
      }
    }
  }

  for (std::size_t i = 0; i < pop.individuals.size(); ++i) {
    Individual& ind = pop.individuals[i];
    if (ind.fitness) {
      cache.store(keys[i], *ind.fitness);
      continue;
    }
    if (auto cached = cache.lookup(keys[i])) {
      ind.fitness = *cached;
      ++hits;
      continue;
    }
    double fitness;
    try {
      fitness = evaluator.evaluate(ind.prompt);
    } catch (const EvaluationFailedError&) {
      throw;
    } catch (const Error& e) {
      throw EvaluationFailedError(std::string(e.what()) + " [prompt " +
                                  keys[i] + "]");
    }
    ++calls;
    cache.store(keys[i], fitness);
    ind.fitness = fitness;
  }
  return {calls, hits};
}

Population environmental_selection(const Population& parents,
                                   const Population& offspring,
                                   const EvolutionConfig& cfg) {
  std::vector<const Individual*> combined;
  combined.reserve(parents.individuals.size() + offspring.individuals.size());
  for (const auto& ind : parents.individuals) combined.push_back(&ind);
  for (const auto& ind : offspring.individuals) combined.push_back(&ind);
  for (const Individual* ind : combined) {
    if (!ind->fitness)
      throw UnevaluatedIndividualError("environmental selection needs fitness");
  }
  // Stable sort keeps parents ahead of offspring and earlier indices first
  // on ties.
  std::stable_sort(combined.begin(), combined.end(),
                   [](const Individual* a, const Individual* b) {
                     return *a->fitness > *b->fitness;
                   });

  Population next;
  next.generation = parents.generation + 1;
  next.individuals.reserve(cfg.population_size);
  std::set<std::string> taken;
  std::vector<const Individual*> skipped;
  for (const Individual* ind : combined) {
    if (next.individuals.size() == cfg.population_size) break;
    if (taken.insert(canonical_key(ind->prompt)).second) {
      next.individuals.push_back(*ind);
    } else {
      skipped.push_back(ind);
    }
  }
  // Duplicates are admitted only once distinct keys run out.
  for (const Individual* ind : skipped) {
    if (next.individuals.size() == cfg.population_size) break;
    next.individuals.push_back(*ind);
  }
  return next;
}

const Individual& best_individual(const Population& pop) {
  if (pop.individuals.empty()) throw Error("empty population has no best");
  const Individual* best = nullptr;
  for (const auto& ind : pop.individuals) {
    if (!ind.fitness)
      throw UnevaluatedIndividualError("best_individual needs fitness");
    if (!best || *ind.fitness > *best->fitness) best = &ind;
  }
  return *best;
}

EvolveResult evolve(const EvolutionConfig& cfg, Evaluator& evaluator,
                    const WordPool& pool,
                    const std::vector<Prompt>& user_prompts,
                    const CheckpointSink& sink) {
  if (cfg.population_size < 2)
    throw PopulationTooSmallError("population size must be >= 2");

  EngineState state;
  state.config = cfg;
  state.pool = pool;
  state.rng = Rng(cfg.seed);
  state.population = initialize_population(cfg, pool, user_prompts, state.rng);

  const auto [e0, h0] =
      evaluate_population(state.population, evaluator, state.cache, cfg);
  append_record(state, make_record(state.population, e0, h0));
  if (sink) sink(state);

  return run_loop(state, evaluator, cfg.max_generations, sink);
}

EvolveResult resume(EngineState state, Evaluator& evaluator,
                    std::size_t extra_generations, const CheckpointSink& sink) {
  return run_loop(state, evaluator, extra_generations, sink);
}

std::string save_checkpoint(const EngineState& state) {
  nlohmann::json j;
  j["format"] = "genap-checkpoint";
  j["version"] = kCheckpointVersion;

  nlohmann::json cfg;
  cfg["population_size"] = state.config.population_size;
  cfg["max_generations"] = state.config.max_generations;
  cfg["init_mode"] = static_cast<int>(state.config.init_mode);
  cfg["seed"] = state.config.seed;
  cfg["parallelism"] = state.config.parallelism;
  cfg["max_label_words"] = state.config.max_label_words;
  cfg["crossover_prob"] = state.config.operators.crossover_prob;
  cfg["mutation_prob"] = state.config.operators.mutation_prob;
  cfg["max_prompt_length"] = state.config.operators.max_prompt_length;
  cfg["task_kind"] =
      state.config.operators.task_kind == TaskKind::Classification
          ? "classification"
          : "generation";
  cfg["max_retries"] = state.config.operators.max_retries;
  j["config"] = cfg;

  nlohmann::json inds = nlohmann::json::array();
  for (const auto& ind : state.population.individuals) {
    nlohmann::json ji;
    ji["prompt"] = prompt_to_json(ind.prompt);
    if (ind.fitness) ji["fitness"] = *ind.fitness;
    inds.push_back(std::move(ji));
  }
  j["population"] = {{"generation", state.population.generation},
                     {"individuals", std::move(inds)}};

  j["pool"] = {{"template_entries", state.pool.template_entries},
               {"verbalizer_entries", state.pool.verbalizer_entries}};
  j["cache"] = state.cache.entries();

  std::ostringstream rng_stream;
  rng_stream << state.rng.engine();
  j["rng"] = rng_stream.str();

  nlohmann::json hist = nlohmann::json::array();
  for (const auto& rec : state.history.records) {
    hist.push_back({{"generation", rec.generation},
                    {"best_fitness", rec.best_fitness},
                    {"mean_fitness", rec.mean_fitness},
                    {"best_key", rec.best_key},
                    {"evaluations", rec.evaluations},
                    {"cache_hits", rec.cache_hits}});
  }
  j["history"] = std::move(hist);
  return j.dump(2);
}

EngineState load_checkpoint(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpointError(std::string("unparseable checkpoint: ") +
                                 e.what());
  }
  try {
    if (j.value("format", "") != "genap-checkpoint")
      throw CorruptCheckpointError("not a checkpoint document");
    const int version = j.at("version").get<int>();
    if (version > kCheckpointVersion)
      throw VersionMismatchError("checkpoint version " +
                                 std::to_string(version) +
                                 " is newer than supported " +
                                 std::to_string(kCheckpointVersion));

    EngineState state;
    const auto& cfg = j.at("config");
    state.config.population_size = cfg.at("population_size").get<std::size_t>();
    state.config.max_generations = cfg.at("max_generations").get<std::size_t>();
    state.config.init_mode =
        static_cast<InitMode>(cfg.at("init_mode").get<int>());
    state.config.seed = cfg.at("seed").get<std::uint64_t>();
    state.config.parallelism = cfg.at("parallelism").get<std::size_t>();
    state.config.max_label_words = cfg.at("max_label_words").get<std::size_t>();
    state.config.operators.crossover_prob = cfg.at("crossover_prob").get<double>();
    state.config.operators.mutation_prob = cfg.at("mutation_prob").get<double>();
    state.config.operators.max_prompt_length =
        cfg.at("max_prompt_length").get<std::size_t>();
    state.config.operators.task_kind =
        cfg.at("task_kind").get<std::string>() == "classification"
            ? TaskKind::Classification
            : TaskKind::Generation;
    state.config.operators.max_retries = cfg.at("max_retries").get<int>();

    state.population.generation =
        j.at("population").at("generation").get<std::size_t>();
    for (const auto& ji : j.at("population").at("individuals")) {
      Individual ind;
      ind.prompt = prompt_from_json(ji.at("prompt"));
      if (ji.contains("fitness")) ind.fitness = ji["fitness"].get<double>();
      state.population.individuals.push_back(std::move(ind));
    }

    state.pool.template_entries =
        j.at("pool").at("template_entries").get<std::vector<WordList>>();
    state.pool.verbalizer_entries =
        j.at("pool").at("verbalizer_entries").get<WordList>();
    state.cache.restore(j.at("cache").get<std::map<std::string, double>>());

    std::istringstream rng_stream(j.at("rng").get<std::string>());
    rng_stream >> state.rng.engine();
    if (rng_stream.fail())
      throw CorruptCheckpointError("unreadable rng state");

    for (const auto& jr : j.at("history")) {
      GenerationRecord rec;
      rec.generation = jr.at("generation").get<std::size_t>();
      rec.best_fitness = jr.at("best_fitness").get<double>();
      rec.mean_fitness = jr.at("mean_fitness").get<double>();
      rec.best_key = jr.at("best_key").get<std::string>();
      rec.evaluations = jr.at("evaluations").get<std::size_t>();
      rec.cache_hits = jr.at("cache_hits").get<std::size_t>();
      state.history.records.push_back(std::move(rec));
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpointError(std::string("malformed checkpoint: ") +
                                 e.what());
  }
}

std::string history_to_csv(const RunHistory& history) {
  std::string out =
      "generation\tbest_fitness\tmean_fitness\tevaluations\tcache_hits\tbest_key\n";
  for (const auto& rec : history.records) {
    out += std::to_string(rec.generation);
    out += '\t';
    out += format_double(rec.best_fitness);
    out += '\t';
    out += format_double(rec.mean_fitness);
    out += '\t';
    out += std::to_string(rec.evaluations);
    out += '\t';
    out += std::to_string(rec.cache_hits);
    out += '\t';
    out += rec.best_key;  // JSON; contains no tabs or newlines
    out += '\n';
  }
  return out;
}

RunHistory history_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("generation\t", 0) != 0)
    throw Error("history export lacks the expected header row");
  RunHistory history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos)
        throw Error("history row has too few fields: " + line);
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    GenerationRecord rec;
    rec.generation = std::stoull(fields[0]);
    rec.best_fitness = std::stod(fields[1]);
    rec.mean_fitness = std::stod(fields[2]);
    rec.evaluations = std::stoull(fields[3]);
    rec.cache_hits = std::stoull(fields[4]);
    rec.best_key = fields[5];
    history.records.push_back(std::move(rec));
  }
  return history;
}

}  // namespace genap

#include "genap/config.hpp"

#include <filesystem>

#include "genap/dataset.hpp"
#include "genap/errors.hpp"

#include <nlohmann/json.hpp>

namespace genap {

namespace {

namespace fs = std::filesystem;

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return path.string();
  return (base / path).lexically_normal().string();
}

void require_exists(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw ConfigError(std::string(what) + " path does not exist: " + path);
}

Verbalizer verbalizer_from_json(const nlohmann::json& j) {
  Verbalizer v;
  v.positive = j.at("positive").get<WordList>();
  v.negative = j.at("negative").get<WordList>();
  validate_verbalizer(v);
  return v;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();

  RunConfig cfg;
  try {
    const auto& task = j.at("task");
    const std::string kind = task.at("kind").get<std::string>();
    if (kind == "classification") {
      cfg.evolution.operators.task_kind = TaskKind::Classification;
    } else if (kind == "generation") {
      cfg.evolution.operators.task_kind = TaskKind::Generation;
    } else {
      throw ConfigError("task.kind must be classification or generation");
    }
    const std::string metric = task.value("metric", kind == "classification"
                                                        ? "accuracy"
                                                        : "bleu");
    if (metric == "codebleu") {
      cfg.metric = GenerationMetric::CodeBleu;
    } else if (metric == "bleu" || metric == "accuracy") {
      cfg.metric = GenerationMetric::Bleu;
    } else {
      throw ConfigError("unknown metric: " + metric);
    }

    if (j.contains("evolution")) {
      const auto& e = j["evolution"];
      cfg.evolution.population_size =
          e.value("population_size", cfg.evolution.population_size);
      cfg.evolution.max_generations =
          e.value("max_generations", cfg.evolution.max_generations);
      cfg.evolution.seed = e.value("seed", cfg.evolution.seed);
      cfg.evolution.parallelism =
          e.value("parallelism", cfg.evolution.parallelism);
      cfg.evolution.max_label_words =
          e.value("max_label_words", cfg.evolution.max_label_words);
      const std::string mode = e.value("init_mode", "random");
      if (mode == "random") {
        cfg.evolution.init_mode = InitMode::Random;
      } else if (mode == "user") {
        cfg.evolution.init_mode = InitMode::User;
      } else if (mode == "hybrid") {
        cfg.evolution.init_mode = InitMode::Hybrid;
      } else {
        throw ConfigError("init_mode must be random, user or hybrid");
      }
    }
    if (cfg.evolution.population_size < 2)
      throw ConfigError("population_size must be >= 2");

    if (j.contains("operators")) {
      const auto& o = j["operators"];
      auto& ops = cfg.evolution.operators;
      ops.crossover_prob = o.value("crossover_prob", ops.crossover_prob);
      ops.mutation_prob = o.value("mutation_prob", ops.mutation_prob);
      ops.max_prompt_length = o.value("max_prompt_length", ops.max_prompt_length);
      ops.max_retries = o.value("max_retries", ops.max_retries);
      if (ops.crossover_prob < 0 || ops.crossover_prob > 1 ||
          ops.mutation_prob < 0 || ops.mutation_prob > 1)
        throw ConfigError("operator probabilities must lie in [0,1]");
      if (ops.max_prompt_length < 1)
        throw ConfigError("max_prompt_length must be >= 1");
    }

    if (j.contains("markers")) {
      cfg.code_marker = j["markers"].value("code", cfg.code_marker);
      cfg.mask_marker = j["markers"].value("mask", cfg.mask_marker);
    }

    const bool has_gateway = j.contains("gateway");
    const bool has_oracle = j.contains("synthetic_oracle");
    if (has_gateway == has_oracle)
      throw ConfigError("exactly one of gateway / synthetic_oracle is required");

    if (has_gateway) {
      const auto& g = j["gateway"];
      HttpGatewayConfig gw;
      gw.base_url = g.at("base_url").get<std::string>();
      gw.timeout = std::chrono::milliseconds(g.value("timeout_ms", 30000));
      gw.max_attempts = g.value("max_attempts", 3);
      gw.backoff_base =
          std::chrono::milliseconds(g.value("backoff_base_ms", 250));
      gw.bearer_token = g.value("token", std::string());
      gw.token_env_variable = g.value("token_env", std::string());
      gw.max_new_tokens = g.value("max_new_tokens", std::size_t{128});
      cfg.gateway = std::move(gw);
    } else {
      const auto& s = j["synthetic_oracle"];
      SyntheticOracleSpec spec;
      spec.target_template =
          parse_template(s.at("target_template").get<std::string>(),
                         cfg.code_marker, cfg.mask_marker);
      if (s.contains("target_verbalizer"))
        spec.target_verbalizer = verbalizer_from_json(s["target_verbalizer"]);
      cfg.synthetic_oracle = std::move(spec);
    }

    cfg.dataset_path = resolve(base, j.value("dataset", std::string()));
    cfg.template_pool_path =
        resolve(base, j.value("template_pool", std::string()));
    cfg.verbalizer_pool_path =
        resolve(base, j.value("verbalizer_pool", std::string()));
    cfg.keywords_path = resolve(base, j.value("keywords", std::string()));
    cfg.keyword_weight = j.value("keyword_weight", 1.0);
    cfg.output_dir = resolve(base, j.value("output_dir", std::string("out")));

    if (j.contains("user_prompts")) {
      for (const auto& up : j["user_prompts"]) {
        Prompt p;
        p.tmpl = parse_template(up.at("template").get<std::string>(),
                                cfg.code_marker, cfg.mask_marker,
                                cfg.evolution.operators.max_prompt_length);
        if (up.contains("verbalizer"))
          p.verbalizer = verbalizer_from_json(up["verbalizer"]);
        if (cfg.evolution.operators.task_kind == TaskKind::Classification &&
            !p.verbalizer)
          throw ConfigError("classification user prompts need a verbalizer");
        if (cfg.evolution.operators.task_kind == TaskKind::Generation &&
            p.verbalizer)
          throw ConfigError("generation user prompts must not carry a verbalizer");
        cfg.user_prompts.push_back(std::move(p));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }

  if (cfg.gateway && cfg.dataset_path.empty())
    throw ConfigError("gateway runs need a dataset");
  if (!cfg.dataset_path.empty()) require_exists(cfg.dataset_path, "dataset");
  if (!cfg.template_pool_path.empty())
    require_exists(cfg.template_pool_path, "template_pool");
  if (!cfg.verbalizer_pool_path.empty())
    require_exists(cfg.verbalizer_pool_path, "verbalizer_pool");
  if (!cfg.keywords_path.empty()) require_exists(cfg.keywords_path, "keywords");
  if (cfg.evolution.init_mode != InitMode::User &&
      cfg.template_pool_path.empty())
    throw ConfigError("random/hybrid initialization needs a template_pool");
  if (cfg.evolution.operators.task_kind == TaskKind::Classification &&
      cfg.evolution.init_mode != InitMode::User &&
      cfg.verbalizer_pool_path.empty())
    throw ConfigError("classification runs need a verbalizer_pool");
  return cfg;
}

WordPool load_word_pool(const RunConfig& cfg) {
  WordPool pool;
  if (!cfg.template_pool_path.empty())
    pool.template_entries = load_template_pool(cfg.template_pool_path);
  if (!cfg.verbalizer_pool_path.empty())
    pool.verbalizer_entries = load_word_list(cfg.verbalizer_pool_path);
  return pool;
}

FitnessOptions make_fitness_options(const RunConfig& cfg) {
  FitnessOptions opts;
  opts.code_marker = cfg.code_marker;
  opts.mask_marker = cfg.mask_marker;
  opts.metric = cfg.metric;
  opts.keyword_weight = cfg.keyword_weight;
  if (cfg.gateway) opts.max_new_tokens = cfg.gateway->max_new_tokens;
  if (!cfg.keywords_path.empty()) {
    const WordList words = load_word_list(cfg.keywords_path);
    opts.keywords.insert(words.begin(), words.end());
  }
  return opts;
}

std::unique_ptr<Evaluator> make_evaluator(const RunConfig& cfg) {
  if (cfg.synthetic_oracle)
    return make_synthetic_evaluator(*cfg.synthetic_oracle);

  std::shared_ptr<ModelGateway> gateway = make_http_gateway(*cfg.gateway);
  const FitnessOptions opts = make_fitness_options(cfg);
  if (cfg.evolution.operators.task_kind == TaskKind::Classification) {
    return make_classification_evaluator(
        load_classification_dataset(cfg.dataset_path), std::move(gateway), opts);
  }
  return make_generation_evaluator(load_generation_dataset(cfg.dataset_path),
                                   std::move(gateway), opts);
}

Verbalizer parse_verbalizer_spec(const std::string& spec) {
  Verbalizer v;
  std::size_t start = 0;
  while (start < spec.size()) {
    std::size_t end = spec.find(';', start);
    if (end == std::string::npos) end = spec.size();
    const std::string part = spec.substr(start, end - start);
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw ConfigError("verbalizer spec part lacks a class prefix: " + part);
    const std::string cls = part.substr(0, colon);
    WordList* target = nullptr;
    if (cls == "positive") {
      target = &v.positive;
    } else if (cls == "negative") {
      target = &v.negative;
    } else {
      throw ConfigError("verbalizer class must be positive or negative: " + cls);
    }
    std::size_t wstart = colon + 1;
    while (wstart <= part.size()) {
      std::size_t wend = part.find(',', wstart);
      if (wend == std::string::npos) wend = part.size();
      const std::string word = part.substr(wstart, wend - wstart);
      if (!word.empty()) target->push_back(word);
      wstart = wend + 1;
    }
    start = end + 1;
  }
  validate_verbalizer(v);
  return v;
}

}  // namespace genap

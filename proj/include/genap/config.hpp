#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genap/engine.hpp"
#include "genap/fitness.hpp"
#include "genap/gateway.hpp"

namespace genap {

/// Parsed run configuration. Exactly one of gateway / synthetic_oracle is
/// set; all referenced paths were checked to exist at load time.
struct RunConfig {
  EvolutionConfig evolution{};
  std::string code_marker = "<code>";
  std::string mask_marker = "<mask>";
  GenerationMetric metric = GenerationMetric::Bleu;

  std::optional<HttpGatewayConfig> gateway;
  std::optional<SyntheticOracleSpec> synthetic_oracle;

  std::string dataset_path;          // empty for synthetic runs
  std::string template_pool_path;
  std::string verbalizer_pool_path;  // classification only
  std::string keywords_path;         // optional, codebleu weighted term
  double keyword_weight = 1.0;
  std::vector<Prompt> user_prompts;
  std::string output_dir = "out";
};

/// Loads and validates a JSON run config; relative paths are resolved
/// against the config file's directory. Throws ConfigError.
RunConfig load_run_config(const std::string& path);

/// Builds the word pool named by the config.
WordPool load_word_pool(const RunConfig& cfg);

/// Builds the fitness evaluator (synthetic oracle or gateway-backed).
std::unique_ptr<Evaluator> make_evaluator(const RunConfig& cfg);

FitnessOptions make_fitness_options(const RunConfig& cfg);

/// Parses the inline "positive:w1,w2;negative:w3" verbalizer syntax.
Verbalizer parse_verbalizer_spec(const std::string& spec);

}  // namespace genap

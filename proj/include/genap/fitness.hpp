#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "genap/gateway.hpp"
#include "genap/metrics.hpp"
#include "genap/prompt.hpp"

namespace genap {

/// Fitness function boundary for the evolution engine.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  /// Fitness of one prompt; finite, >= 0, higher is better.
  virtual double evaluate(const Prompt& prompt) = 0;
};

enum class GenerationMetric { Bleu, CodeBleu };

struct FitnessOptions {
  std::string code_marker = "<code>";
  std::string mask_marker = "<mask>";
  std::size_t max_new_tokens = 128;
  GenerationMetric metric = GenerationMetric::Bleu;
  std::set<std::string> keywords;   // for the weighted n-gram term
  double keyword_weight = 1.0;
  CodeBleuWeights codebleu_weights{};
};

/// Accuracy of verbalizer-projected predictions over the dataset.
double classification_fitness(const Prompt& prompt,
                              const std::vector<ClassificationExample>& dataset,
                              ModelGateway& gateway,
                              const FitnessOptions& opts = {});

/// Mean per-example BLEU or CodeBLEU of gateway generations.
double generation_fitness(const Prompt& prompt,
                          const std::vector<GenerationExample>& dataset,
                          ModelGateway& gateway,
                          const FitnessOptions& opts = {});

/// Evaluator adapters.
std::unique_ptr<Evaluator> make_classification_evaluator(
    std::vector<ClassificationExample> dataset,
    std::shared_ptr<ModelGateway> gateway, FitnessOptions opts = {});
std::unique_ptr<Evaluator> make_generation_evaluator(
    std::vector<GenerationExample> dataset,
    std::shared_ptr<ModelGateway> gateway, FitnessOptions opts = {});
std::unique_ptr<Evaluator> make_synthetic_evaluator(SyntheticOracleSpec spec);

}  // namespace genap

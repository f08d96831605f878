#include "genap/fitness.hpp"

#include "genap/errors.hpp"

namespace genap {

namespace {

std::vector<std::string> all_label_words(const Verbalizer& v) {
  std::vector<std::string> words = v.positive;
  words.insert(words.end(), v.negative.begin(), v.negative.end());
  return words;
}

double example_metric(const std::string& candidate, const std::string& reference,
                      const FitnessOptions& opts) {
  const double bleu = smoothed_bleu4(candidate, reference).score;
  if (opts.metric == GenerationMetric::Bleu) return bleu;
  const double weighted = weighted_ngram_bleu(candidate, reference,
                                              opts.keywords, opts.keyword_weight);
  // AST and dataflow matches come from external tooling; absent here, the
  // combiner renormalizes over the two BLEU terms.
  return codebleu(bleu, weighted, std::nullopt, std::nullopt,
                  opts.codebleu_weights);
}

class ClassificationEvaluator final : public Evaluator {
 public:
  ClassificationEvaluator(std::vector<ClassificationExample> dataset,
                          std::shared_ptr<ModelGateway> gateway,
                          FitnessOptions opts)
      : dataset_(std::move(dataset)),
        gateway_(std::move(gateway)),
        opts_(std::move(opts)) {}

  double evaluate(const Prompt& prompt) override {
    return classification_fitness(prompt, dataset_, *gateway_, opts_);
  }

 private:
  std::vector<ClassificationExample> dataset_;
  std::shared_ptr<ModelGateway> gateway_;
  FitnessOptions opts_;
};

class GenerationEvaluator final : public Evaluator {
 public:
  GenerationEvaluator(std::vector<GenerationExample> dataset,
                      std::shared_ptr<ModelGateway> gateway, FitnessOptions opts)
      : dataset_(std::move(dataset)),
        gateway_(std::move(gateway)),
        opts_(std::move(opts)) {}

  double evaluate(const Prompt& prompt) override {
    return generation_fitness(prompt, dataset_, *gateway_, opts_);
  }

 private:
  std::vector<GenerationExample> dataset_;
  std::shared_ptr<ModelGateway> gateway_;
  FitnessOptions opts_;
};

class SyntheticEvaluator final : public Evaluator {
 public:
  explicit SyntheticEvaluator(SyntheticOracleSpec spec) : spec_(std::move(spec)) {}
  double evaluate(const Prompt& prompt) override {
    return synthetic_fitness(prompt, spec_);
  }

 private:
  SyntheticOracleSpec spec_;
};

}  // namespace

double classification_fitness(const Prompt& prompt,
                              const std::vector<ClassificationExample>& dataset,
                              ModelGateway& gateway, const FitnessOptions& opts) {
  if (!prompt.verbalizer)
    throw NoVerbalizerError("classification fitness needs a verbalizer");
  if (dataset.empty()) throw EmptyDatasetError("classification dataset is empty");

  const auto label_words = all_label_words(*prompt.verbalizer);
  std::vector<ClassLabel> predictions, truths;
  predictions.reserve(dataset.size());
  truths.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string text =
        render(prompt.tmpl, dataset[i].code, opts.mask_marker);
    try {
      const auto scores = gateway.score_label_words(text, label_words);
      predictions.push_back(project_label(scores, *prompt.verbalizer));
    } catch (const Error& e) {
      throw EvaluationFailedError("example " + std::to_string(i) + ": " + e.what());
    }
    truths.push_back(dataset[i].label);
  }
  return accuracy(predictions, truths);
}

double generation_fitness(const Prompt& prompt,
                          const std::vector<GenerationExample>& dataset,
                          ModelGateway& gateway, const FitnessOptions& opts) {
  if (prompt.verbalizer)
    throw Error("generation fitness takes a prompt without a verbalizer");
  if (dataset.empty()) throw EmptyDatasetError("generation dataset is empty");

  double sum = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string text =
        render(prompt.tmpl, dataset[i].code, opts.mask_marker);
    std::string generated;
    try {
      generated = gateway.generate(text, opts.max_new_tokens);
    } catch (const Error& e) {
      throw EvaluationFailedError("example " + std::to_string(i) + ": " + e.what());
    }
    sum += example_metric(generated, dataset[i].reference, opts);
  }
  return sum / static_cast<double>(dataset.size());
}

std::unique_ptr<Evaluator> make_classification_evaluator(
    std::vector<ClassificationExample> dataset,
    std::shared_ptr<ModelGateway> gateway, FitnessOptions opts) {
  return std::make_unique<ClassificationEvaluator>(std::move(dataset),
                                                   std::move(gateway),
                                                   std::move(opts));
}

std::unique_ptr<Evaluator> make_generation_evaluator(
    std::vector<GenerationExample> dataset,
    std::shared_ptr<ModelGateway> gateway, FitnessOptions opts) {
  return std::make_unique<GenerationEvaluator>(std::move(dataset),
                                               std::move(gateway),
                                               std::move(opts));
}

std::unique_ptr<Evaluator> make_synthetic_evaluator(SyntheticOracleSpec spec) {
  return std::make_unique<SyntheticEvaluator>(std::move(spec));
}

}  // namespace genap

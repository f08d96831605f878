#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genap/prompt.hpp"

namespace genap {

/// Scoring backend boundary. Implementations must be safe for concurrent
/// calls up to the engine's parallelism and idempotent per request.
class ModelGateway {
 public:
  virtual ~ModelGateway() = default;

  /// Non-negative score per requested label word. Scores need not sum to 1.
  virtual std::map<std::string, double> score_label_words(
      const std::string& text, const std::vector<std::string>& label_words) = 0;

  /// Generated continuation for the given text; may be empty.
  virtual std::string generate(const std::string& text,
                               std::size_t max_new_tokens) = 0;
};

struct HttpGatewayConfig {
  std::string base_url;  // e.g. "http://localhost:8080"
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;  // total tries for transport failures
  std::chrono::milliseconds backoff_base{250};  // doubles per retry
  std::string bearer_token;        // optional
  std::string token_env_variable;  // read at construction if token empty
  std::size_t max_new_tokens = 128;
};

/// JSON-over-HTTP client for the /v1/score_labels and /v1/generate endpoints.
/// Connection failures and 5xx responses raise TransportError and are retried
/// with exponential backoff; malformed responses raise ProtocolError and 4xx
/// responses raise RemoteError, neither retried.
std::unique_ptr<ModelGateway> make_http_gateway(const HttpGatewayConfig& cfg);

/// Deterministic prompt-similarity oracle for desk-scale runs: rewards word
/// overlap with a planted target template, matching segment order, and
/// verbalizer overlap.
struct SyntheticOracleSpec {
  PromptTemplate target_template;
  std::optional<Verbalizer> target_verbalizer;
  double w_words = 0.5;
  double w_order = 0.25;
  double w_verb = 0.25;
};

/// Similarity in [0,1]; 1.0 exactly at prompts matching the target's word
/// sets, order and verbalizer. When either side lacks a verbalizer the word
/// and order weights are renormalized (2/3, 1/3 at the defaults).
double synthetic_fitness(const Prompt& prompt, const SyntheticOracleSpec& spec);

}  // namespace genap

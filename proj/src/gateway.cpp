#include "genap/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include "genap/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace genap {

namespace {

class HttpGateway final : public ModelGateway {
 public:
  explicit HttpGateway(HttpGatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.bearer_token.empty() && !cfg_.token_env_variable.empty()) {
      if (const char* tok = std::getenv(cfg_.token_env_variable.c_str()))
        cfg_.bearer_token = tok;
    }
  }

  std::map<std::string, double> score_label_words(
      const std::string& text,
      const std::vector<std::string>& label_words) override {
    nlohmann::json body;
    body["text"] = text;
    body["label_words"] = label_words;
    const nlohmann::json resp = post_json("/v1/score_labels", body);
    if (!resp.contains("scores") || !resp["scores"].is_object())
      throw ProtocolError("score_labels response lacks a 'scores' object");
    std::map<std::string, double> scores;
    for (const auto& word : label_words) {
      if (!resp["scores"].contains(word))
        throw ProtocolError("score_labels response missing word '" + word + "'");
      if (!resp["scores"][word].is_number())
        throw ProtocolError("non-numeric score for word '" + word + "'");
      scores[word] = resp["scores"][word].get<double>();
    }
    return scores;
  }

  std::string generate(const std::string& text,
                       std::size_t max_new_tokens) override {
    nlohmann::json body;
    body["text"] = text;
    body["max_new_tokens"] = std::min(max_new_tokens, cfg_.max_new_tokens);
    const nlohmann::json resp = post_json("/v1/generate", body);
    if (!resp.contains("text") || !resp["text"].is_string())
      throw ProtocolError("generate response lacks a 'text' string");
    return resp["text"].get<std::string>();
  }

 private:
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body) {
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    if (!cfg_.bearer_token.empty())
      client.set_bearer_token_auth(cfg_.bearer_token);

    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(cfg_.backoff_base * (1 << (attempt - 2)));
      }
      auto res = client.Post(path, payload, "application/json");
      if (!res) {
        last_error = "no response (" + httplib::to_string(res.error()) + ")";
        continue;  // transport failure, retryable
      }
      if (res->status >= 500) {
        last_error = "server status " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status < 200 || res->status >= 300) {
        std::string message = res->body;
        try {
          const auto err = nlohmann::json::parse(res->body);
          if (err.contains("error")) message = err["error"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
        }
        throw RemoteError("server rejected " + path + " with status " +
                          std::to_string(res->status) + ": " + message);
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ProtocolError("malformed JSON from " + path + ": " + e.what());
      }
    }
    throw TransportError("POST " + cfg_.base_url + path + " failed after " +
                         std::to_string(cfg_.max_attempts) + " attempts: " +
                         last_error);
  }

  HttpGatewayConfig cfg_;
};

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : a)
    if (b.count(w)) ++inter;
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<std::string> template_word_set(const PromptTemplate& t) {
  std::set<std::string> s(t.str1.begin(), t.str1.end());
  s.insert(t.str2.begin(), t.str2.end());
  return s;
}

}  // namespace

std::unique_ptr<ModelGateway> make_http_gateway(const HttpGatewayConfig& cfg) {
  return std::make_unique<HttpGateway>(cfg);
}

double synthetic_fitness(const Prompt& prompt, const SyntheticOracleSpec& spec) {
  const double words_term =
      jaccard(template_word_set(prompt.tmpl), template_word_set(spec.target_template));
  const double order_term =
      prompt.tmpl.order == spec.target_template.order ? 1.0 : 0.0;

  const bool use_verbalizer =
      spec.target_verbalizer.has_value() && prompt.verbalizer.has_value();
  if (!use_verbalizer) {
    const double total = spec.w_words + spec.w_order;
    return (spec.w_words * words_term + spec.w_order * order_term) / total;
  }

  auto to_set = [](const WordList& ws) {
    return std::set<std::string>(ws.begin(), ws.end());
  };
  const double verb_term =
      0.5 * jaccard(to_set(prompt.verbalizer->positive),
                    to_set(spec.target_verbalizer->positive)) +
      0.5 * jaccard(to_set(prompt.verbalizer->negative),
                    to_set(spec.target_verbalizer->negative));
  const double total = spec.w_words + spec.w_order + spec.w_verb;
  return (spec.w_words * words_term + spec.w_order * order_term +
          spec.w_verb * verb_term) /
         total;
}

}  // namespace genap

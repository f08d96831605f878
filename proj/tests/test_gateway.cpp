#include <doctest.h>

#include <atomic>
#include <thread>

#include "genap/errors.hpp"
#include "genap/fitness.hpp"
#include "genap/gateway.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

using namespace genap;

namespace {

// In-process stub model server for protocol conformance tests.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/score_labels", [this](const httplib::Request& req,
                                            httplib::Response& res) {
      ++score_requests;
      if (fail_next_with_5xx.load() > 0) {
        --fail_next_with_5xx;
        res.status = 503;
        res.set_content("{\"error\":\"overloaded\"}", "application/json");
        return;
      }
      if (respond_malformed) {
        res.set_content("{not json", "application/json");
        return;
      }
      if (respond_4xx) {
        res.status = 400;
        res.set_content("{\"error\":\"bad request\"}", "application/json");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json scores = nlohmann::json::object();
      for (const auto& w : body.at("label_words")) {
        const std::string word = w.get<std::string>();
        if (drop_word == word) continue;
        scores[word] = 0.1 * static_cast<double>(word.size());
      }
      res.set_content(nlohmann::json{{"scores", scores}}.dump(),
                      "application/json");
    });
    server_.Post("/v1/generate", [this](const httplib::Request& req,
                                        httplib::Response& res) {
      ++generate_requests;
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["text"] = echo_prefix + body.at("text").get<std::string>();
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  HttpGatewayConfig client_config() const {
    HttpGatewayConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port_);
    cfg.max_attempts = 3;
    cfg.backoff_base = std::chrono::milliseconds(1);
    return cfg;
  }

  std::atomic<int> score_requests{0};
  std::atomic<int> generate_requests{0};
  std::atomic<int> fail_next_with_5xx{0};
  bool respond_malformed = false;
  bool respond_4xx = false;
  std::string drop_word;
  std::string echo_prefix;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("http gateway round-trips the documented JSON schema") {
  StubServer server;
  auto gateway = make_http_gateway(server.client_config());

  const auto scores = gateway->score_label_words("text", {"bad", "good"});
  CHECK(scores.size() == 2);
  CHECK(scores.at("bad") == doctest::Approx(0.3));
  CHECK(scores.at("good") == doctest::Approx(0.4));

  CHECK(gateway->generate("hello", 16) == "hello");
}

TEST_CASE("http gateway retries transport failures then succeeds") {
  StubServer server;
  server.fail_next_with_5xx = 2;
  auto gateway = make_http_gateway(server.client_config());
  const auto scores = gateway->score_label_words("t", {"w"});
  CHECK(scores.at("w") == doctest::Approx(0.1));
  CHECK(server.score_requests == 3);
}

TEST_CASE("http gateway gives up after the configured attempt count") {
  StubServer server;
  server.fail_next_with_5xx = 100;
  auto gateway = make_http_gateway(server.client_config());
  CHECK_THROWS_AS(gateway->score_label_words("t", {"w"}), TransportError);
  CHECK(server.score_requests == 3);  // exactly max_attempts, no more
}

TEST_CASE("http gateway treats missing words as protocol errors, unretried") {
  StubServer server;
  server.drop_word = "good";
  auto gateway = make_http_gateway(server.client_config());
  CHECK_THROWS_AS(gateway->score_label_words("t", {"bad", "good"}),
                  ProtocolError);
  CHECK(server.score_requests == 1);
}

TEST_CASE("http gateway flags malformed JSON without retrying") {
  StubServer server;
  server.respond_malformed = true;
  auto gateway = make_http_gateway(server.client_config());
  CHECK_THROWS_AS(gateway->score_label_words("t", {"w"}), ProtocolError);
  CHECK(server.score_requests == 1);
}

TEST_CASE("http gateway surfaces 4xx as remote errors without retrying") {
  StubServer server;
  server.respond_4xx = true;
  auto gateway = make_http_gateway(server.client_config());
  CHECK_THROWS_AS(gateway->score_label_words("t", {"w"}), RemoteError);
  CHECK(server.score_requests == 1);
}

TEST_CASE("http gateway raises transport error when nothing listens") {
  HttpGatewayConfig cfg;
  cfg.base_url = "http://127.0.0.1:9";  // discard port, nothing listens
  cfg.max_attempts = 2;
  cfg.backoff_base = std::chrono::milliseconds(1);
  cfg.timeout = std::chrono::milliseconds(200);
  auto gateway = make_http_gateway(cfg);
  CHECK_THROWS_AS(gateway->generate("x", 4), TransportError);
}

TEST_CASE("synthetic fitness scores word, order and verbalizer similarity") {
  SyntheticOracleSpec spec;
  spec.target_template = parse_template("this code <code> works <mask>");

  Prompt exact;
  exact.tmpl = spec.target_template;
  CHECK(synthetic_fitness(exact, spec) == doctest::Approx(1.0));

  Prompt empty;
  empty.tmpl.order = {SegmentId::MaskSlot, SegmentId::CodeSlot, SegmentId::Str1,
                      SegmentId::Str2};
  CHECK(synthetic_fitness(empty, spec) == doctest::Approx(0.0));

  // 2 of 3 distinct target words shared plus one stray word: jaccard 2/4,
  // order matches: 2/3 * 0.5 + 1/3 * 1 = 2/3
  Prompt partial;
  partial.tmpl.str1 = {"this", "code", "stray"};
  partial.tmpl.str2 = {};
  partial.tmpl.order = spec.target_template.order;
  CHECK(synthetic_fitness(partial, spec) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("synthetic fitness includes verbalizer overlap when both sides carry one") {
  SyntheticOracleSpec spec;
  spec.target_template = parse_template("good <code> <mask>");
  spec.target_verbalizer = Verbalizer{{"bad", "buggy"}, {"clean"}};

  Prompt exact;
  exact.tmpl = spec.target_template;
  exact.verbalizer = Verbalizer{{"buggy", "bad"}, {"clean"}};  // order-free
  CHECK(synthetic_fitness(exact, spec) == doctest::Approx(1.0));

  Prompt half = exact;
  half.verbalizer = Verbalizer{{"bad"}, {"clean"}};  // pos jaccard 1/2
  CHECK(synthetic_fitness(half, spec) ==
        doctest::Approx(0.5 + 0.25 + 0.25 * (0.5 * 0.5 + 0.5 * 1.0)));

  // prompt without a verbalizer renormalizes to the 2/3, 1/3 split
  Prompt bare;
  bare.tmpl = spec.target_template;
  CHECK(synthetic_fitness(bare, spec) == doctest::Approx(1.0));
}

TEST_CASE("classification fitness traces the scripted gateway") {
  // gateway scores each word 0.1 * strlen; with verbalizer
  // {pos:[bad], neg:[clean]} mean(neg)=0.5 > mean(pos)=0.3 -> all negative
  StubServer server;
  auto gateway = make_http_gateway(server.client_config());
  Prompt prompt;
  prompt.tmpl = parse_template("check <code> <mask>");
  prompt.verbalizer = Verbalizer{{"bad"}, {"clean"}};
  const std::vector<ClassificationExample> dataset = {
      {"int a;", ClassLabel::Negative},
      {"int b;", ClassLabel::Negative},
      {"int c;", ClassLabel::Positive},
      {"int d;", ClassLabel::Negative},
  };
  CHECK(classification_fitness(prompt, dataset, *gateway) ==
        doctest::Approx(0.75));
}

TEST_CASE("generation fitness is the mean per-example metric") {
  StubServer server;
  auto gateway = make_http_gateway(server.client_config());
  Prompt prompt;  // empty template renders to "<code text> <mask>"

  // echo gateway: generated text is the rendered prompt; craft references
  // equal to the rendered text for a perfect score
  std::vector<GenerationExample> dataset = {
      {"x = 1", "x = 1 <mask>"},
      {"y = 2", "y = 2 <mask>"},
  };
  CHECK(generation_fitness(prompt, dataset, *gateway) == doctest::Approx(1.0));

  // mismatched references lower the mean; cross-check one example by hand
  std::vector<GenerationExample> mixed = {
      {"x = 1", "x = 1 <mask>"},
      {"y = 2", "totally different words here"},
  };
  const double mixed_score = generation_fitness(prompt, mixed, *gateway);
  CHECK(mixed_score < 1.0);
  CHECK(mixed_score > 0.0);
}

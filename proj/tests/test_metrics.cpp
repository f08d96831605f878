#include <doctest.h>

#include <cmath>

#include "bleu_oracle.hpp"
#include "genap/errors.hpp"
#include "genap/metrics.hpp"
#include "genap/rng.hpp"

using namespace genap;

namespace {

std::string random_sentence(Rng& rng, std::size_t min_len, std::size_t max_len) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e",
                                                 "f", "g", "h"};
  const std::size_t len = rng.uniform_range(min_len, max_len);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (!out.empty()) out += ' ';
    out += vocab[rng.uniform_index(vocab.size())];
  }
  return out;
}

}  // namespace

TEST_CASE("accuracy counts exact matches") {
  using L = ClassLabel;
  CHECK(accuracy({L::Positive, L::Negative}, {L::Positive, L::Negative}) == 1.0);
  CHECK(accuracy({L::Positive, L::Negative, L::Positive},
                 {L::Positive, L::Positive, L::Positive}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  // Devign-test-sized vectors with a planted match count.
  std::vector<L> truths(2732, L::Negative), preds(2732, L::Negative);
  for (std::size_t i = 1536; i < truths.size(); ++i) preds[i] = L::Positive;
  CHECK(accuracy(preds, truths) == doctest::Approx(1536.0 / 2732.0).epsilon(1e-15));
}

TEST_CASE("accuracy rejects empty and mismatched inputs") {
  using L = ClassLabel;
  CHECK_THROWS_AS(accuracy({}, {}), EmptyDatasetError);
  CHECK_THROWS_AS(accuracy({L::Positive}, {L::Positive, L::Negative}),
                  LengthMismatchError);
}

TEST_CASE("accuracy is equivariant under joint reordering") {
  using L = ClassLabel;
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<L> preds, truths;
    for (int i = 0; i < 30; ++i) {
      preds.push_back(rng.bernoulli(0.5) ? L::Positive : L::Negative);
      truths.push_back(rng.bernoulli(0.5) ? L::Positive : L::Negative);
    }
    const double base = accuracy(preds, truths);
    std::vector<std::size_t> idx(preds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    std::vector<L> p2, t2;
    for (std::size_t i : idx) {
      p2.push_back(preds[i]);
      t2.push_back(truths[i]);
    }
    CHECK(accuracy(p2, t2) == base);
  }
}

TEST_CASE("smoothed BLEU-4 matches the hand-computed fixture") {
  const auto b = smoothed_bleu4("a b c d", "a b c d e");
  CHECK(b.p_n[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.p_n[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.p_n[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.p_n[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.bp == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  CHECK(b.score == doctest::Approx(std::exp(-0.25)).epsilon(1e-9));
}

TEST_CASE("smoothed BLEU-4 edge behavior") {
  CHECK(smoothed_bleu4("x y z w q", "x y z w q").score ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(smoothed_bleu4("", "a b c").score == 0.0);
  CHECK_THROWS_AS(smoothed_bleu4("a", "   "), EmptyReferenceError);

  // zero 4-gram overlap still yields a positive score via smoothing
  const auto b = smoothed_bleu4("a b c d", "a c b d");
  CHECK(b.score > 0.0);
  CHECK(b.p_n[3] == doctest::Approx(1.0 / 2.0).epsilon(1e-12));  // (0+1)/(1+1)
}

TEST_CASE("smoothed BLEU-4 score is 1 only for identical token streams") {
  Rng rng(19);
  for (int i = 0; i < 300; ++i) {
    const std::string cand = random_sentence(rng, 1, 10);
    const std::string ref = random_sentence(rng, 1, 10);
    const double s = smoothed_bleu4(cand, ref).score;
    CHECK(s >= 0.0);
    CHECK(s <= 1.0 + 1e-12);
    if (bleu_oracle::toks(cand) == bleu_oracle::toks(ref)) {
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(s < 1.0);
    }
  }
}

TEST_CASE("brevity penalty grows as a short candidate lengthens") {
  const std::string ref = "a b c d e f g h";
  double prev = smoothed_bleu4("a b", ref).bp;
  for (int len = 3; len <= 8; ++len) {
    std::string cand = "a";
    for (int i = 1; i < len; ++i) cand += " " + std::string(1, char('a' + i));
    const double bp = smoothed_bleu4(cand, ref).bp;
    CHECK(bp >= prev);
    prev = bp;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smoothed BLEU-4 agrees with the brute-force oracle") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    const std::string cand = random_sentence(rng, 0, 12);
    const std::string ref = random_sentence(rng, 1, 12);
    const double got = smoothed_bleu4(cand, ref).score;
    const double want = bleu_oracle::score(cand, ref);
    CHECK(std::fabs(got - want) < 1e-9);
  }
}

TEST_CASE("weighted n-gram BLEU degenerates to plain BLEU") {
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    const std::string cand = random_sentence(rng, 1, 10);
    const std::string ref = random_sentence(rng, 1, 10);
    const double plain = smoothed_bleu4(cand, ref).score;
    CHECK(std::fabs(weighted_ngram_bleu(cand, ref, {}, 1.0) - plain) < 1e-12);
    CHECK(std::fabs(weighted_ngram_bleu(cand, ref, {"a", "b"}, 1.0) - plain) <
          1e-12);
  }
}

TEST_CASE("weighted n-gram BLEU weights keyword unigrams") {
  // all unigrams match -> precision stays 1 regardless of the weight
  CHECK(weighted_ngram_bleu("a b c d", "a b c d", {"a"}, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // one keyword matched, one missed, weight 2: cross-checked by the oracle
  const std::string cand = "while x loop end";
  const std::string ref = "while y loop end";
  const double got = weighted_ngram_bleu(cand, ref, {"while", "x"}, 2.0);
  const double want = bleu_oracle::score(cand, ref, {"while", "x"}, 2.0);
  CHECK(std::fabs(got - want) < 1e-12);
  CHECK(got != weighted_ngram_bleu(cand, ref, {}, 1.0));
}

TEST_CASE("codebleu combines and renormalizes") {
  CHECK(codebleu(1.0, 1.0, 1.0, 1.0) == 1.0);
  CHECK(codebleu(0.8, 0.6, 0.9, 0.7) == 0.75);
  CHECK(codebleu(0.8, 0.6, std::nullopt, std::nullopt) == 0.7);

  // equal weights and equal components return that component exactly
  for (double c : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(codebleu(c, c, c, c) == c);
    CHECK(codebleu(c, c, std::nullopt, std::nullopt) == c);
  }
  CHECK_THROWS_AS(codebleu(1.2, 0.5, std::nullopt, std::nullopt),
                  OutOfRangeComponentError);
  CHECK_THROWS_AS(codebleu(0.5, 0.5, -0.1, std::nullopt),
                  OutOfRangeComponentError);
}

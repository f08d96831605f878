#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "genap/prompt.hpp"

namespace genap {

struct ClassificationExample {
  std::string code;
  ClassLabel label = ClassLabel::Negative;
};

struct GenerationExample {
  std::string code;
  std::string reference;
};

/// Per-component view of a smoothed BLEU-4 evaluation.
struct BleuBreakdown {
  std::array<double, 4> p_n{};   // modified n-gram precisions, smoothed
  std::array<double, 4> w_n{0.25, 0.25, 0.25, 0.25};
  double bp = 1.0;               // brevity penalty
  std::size_t candidate_len = 0;
  std::size_t reference_len = 0;
  double score = 0.0;
};

struct CodeBleuWeights {
  double alpha = 0.25;  // BLEU
  double beta = 0.25;   // weighted n-gram
  double gamma = 0.25;  // AST match
  double delta = 0.25;  // dataflow match
};

/// Exact fraction of matching positions. Throws on length mismatch / empty.
double accuracy(const std::vector<ClassLabel>& predictions,
                const std::vector<ClassLabel>& truths);

/// Smoothed BLEU-4 over whitespace tokens. Zero-count precisions get +1 on
/// numerator and denominator. Empty candidate scores 0.
BleuBreakdown smoothed_bleu4(const std::string& candidate,
                             const std::string& reference);

/// BLEU-4 where unigrams in `keywords` weigh `keyword_weight` in both the
/// clipped numerator and the denominator. Degenerates to smoothed_bleu4 for
/// an empty keyword set or weight 1.
double weighted_ngram_bleu(const std::string& candidate,
                           const std::string& reference,
                           const std::set<std::string>& keywords,
                           double keyword_weight);

/// Weighted combination of BLEU-family and structural match scores; weights
/// are renormalized over the components actually supplied.
double codebleu(double bleu, double bleu_weight,
                std::optional<double> match_ast, std::optional<double> match_df,
                const CodeBleuWeights& w = {});

}  // namespace genap

#include "genap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "genap/errors.hpp"

namespace genap {

namespace {

std::vector<std::string> tokenize(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    counts[{tokens.begin() + static_cast<std::ptrdiff_t>(i),
            tokens.begin() + static_cast<std::ptrdiff_t>(i + n)}]++;
  }
  return counts;
}

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c > r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

// Shared BLEU core; the weight function maps a unigram to its multiplier
// (always 1 for n >= 2).
BleuBreakdown bleu_core(const std::vector<std::string>& cand,
                        const std::vector<std::string>& ref,
                        const std::set<std::string>& keywords,
                        double keyword_weight) {
  BleuBreakdown out;
  out.candidate_len = cand.size();
  out.reference_len = ref.size();
  if (cand.empty()) return out;  // score 0 by convention

  auto unigram_weight = [&](const std::vector<std::string>& gram) {
    if (gram.size() == 1 && keywords.count(gram[0])) return keyword_weight;
    return 1.0;
  };

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand_counts = count_ngrams(cand, n);
    const auto ref_counts = count_ngrams(ref, n);
    double num = 0.0, den = 0.0;
    for (const auto& [gram, count] : cand_counts) {
      const double w = n == 1 ? unigram_weight(gram) : 1.0;
      den += w * static_cast<double>(count);
      auto it = ref_counts.find(gram);
      const std::size_t clipped = it == ref_counts.end()
                                      ? 0
                                      : std::min(count, it->second);
      num += w * static_cast<double>(clipped);
    }
    if (num == 0.0) {  // smoothing: lift zero-count precisions
      num += 1.0;
      den += 1.0;
    }
    out.p_n[n - 1] = num / den;
    log_sum += out.w_n[n - 1] * std::log(out.p_n[n - 1]);
  }
  out.bp = brevity_penalty(cand.size(), ref.size());
  out.score = out.bp * std::exp(log_sum);
  return out;
}

}  // namespace

double accuracy(const std::vector<ClassLabel>& predictions,
                const std::vector<ClassLabel>& truths) {
  if (predictions.empty())
    throw EmptyDatasetError("accuracy over an empty dataset is undefined");
  if (predictions.size() != truths.size())
    throw LengthMismatchError("prediction/truth lengths differ: " +
                              std::to_string(predictions.size()) + " vs " +
                              std::to_string(truths.size()));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

BleuBreakdown smoothed_bleu4(const std::string& candidate,
                             const std::string& reference) {
  const auto ref = tokenize(reference);
  if (ref.empty()) throw EmptyReferenceError("reference must be non-empty");
  return bleu_core(tokenize(candidate), ref, {}, 1.0);
}

double weighted_ngram_bleu(const std::string& candidate,
                           const std::string& reference,
                           const std::set<std::string>& keywords,
                           double keyword_weight) {
  const auto ref = tokenize(reference);
  if (ref.empty()) throw EmptyReferenceError("reference must be non-empty");
  return bleu_core(tokenize(candidate), ref, keywords, keyword_weight).score;
}

double codebleu(double bleu, double bleu_weight,
                std::optional<double> match_ast, std::optional<double> match_df,
                const CodeBleuWeights& w) {
  auto check = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0)
      throw OutOfRangeComponentError(std::string(name) + " outside [0,1]");
  };
  check(bleu, "bleu");
  check(bleu_weight, "bleu_weight");
  if (match_ast) check(*match_ast, "match_ast");
  if (match_df) check(*match_df, "match_df");

  double sum = w.alpha * bleu + w.beta * bleu_weight;
  double weight_sum = w.alpha + w.beta;
  if (match_ast) {
    sum += w.gamma * *match_ast;
    weight_sum += w.gamma;
  }
  if (match_df) {
    sum += w.delta * *match_df;
    weight_sum += w.delta;
  }
  return sum / weight_sum;
}

}  // namespace genap

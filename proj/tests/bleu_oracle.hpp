#pragma once

// Brute-force BLEU reference, written independently of the library's metric
// code on purpose: n-grams are joined into delimiter-separated strings and
// counted with plain loops.

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace bleu_oracle {

inline std::vector<std::string> toks(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline std::map<std::string, int> grams(const std::vector<std::string>& t,
                                        std::size_t n) {
  std::map<std::string, int> m;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string g;
    for (std::size_t k = 0; k < n; ++k) g += t[i + k] + "\x1f";
    m[g] += 1;
  }
  return m;
}

// keyword_weight applies to unigrams whose token is in `keywords`.
inline double score(const std::string& cand_s, const std::string& ref_s,
                    const std::vector<std::string>& keywords = {},
                    double keyword_weight = 1.0) {
  const auto cand = toks(cand_s);
  const auto ref = toks(ref_s);
  if (cand.empty()) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cg = grams(cand, n);
    const auto rg = grams(ref, n);
    double num = 0, den = 0;
    for (const auto& [g, c] : cg) {
      double w = 1.0;
      if (n == 1) {
        for (const auto& kw : keywords)
          if (g == kw + "\x1f") w = keyword_weight;
      }
      den += w * c;
      int matched = 0;
      auto it = rg.find(g);
      if (it != rg.end()) matched = c < it->second ? c : it->second;
      num += w * matched;
    }
    if (num == 0) {
      num += 1;
      den += 1;
    }
    log_sum += 0.25 * std::log(num / den);
  }
  double bp = 1.0;
  if (cand.size() <= ref.size())
    bp = std::exp(1.0 - static_cast<double>(ref.size()) /
                            static_cast<double>(cand.size()));
  return bp * std::exp(log_sum);
}

}  // namespace bleu_oracle

#include "genap/prompt.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "genap/errors.hpp"

#include <nlohmann/json.hpp>

namespace genap {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

WordList WordPool::flattened_template_words() const {
  WordList out;
  for (const auto& entry : template_entries)
    out.insert(out.end(), entry.begin(), entry.end());
  return out;
}

bool is_valid_order(const SegmentOrder& order) {
  for (SegmentId id : kAllSegments) {
    if (std::count(order.begin(), order.end(), id) != 1) return false;
  }
  return true;
}

void validate_template(const PromptTemplate& t, std::size_t max_words) {
  if (!is_valid_order(t.order))
    throw Error("template order is not a permutation of the four segments");
  if (t.word_count() > max_words)
    throw OverLengthError("template holds " + std::to_string(t.word_count()) +
                          " words, cap is " + std::to_string(max_words));
  auto check_words = [](const WordList& ws) {
    for (const auto& w : ws) {
      if (w.empty() || w.find_first_of(" \t\n\r") != std::string::npos)
        throw Error("template word must be non-empty and whitespace-free: '" + w + "'");
    }
  };
  check_words(t.str1);
  check_words(t.str2);
}

bool verbalizer_disjoint(const Verbalizer& v) {
  std::set<std::string> pos(v.positive.begin(), v.positive.end());
  for (const auto& w : v.negative)
    if (pos.count(w)) return false;
  return true;
}

void validate_verbalizer(const Verbalizer& v) {
  if (v.positive.empty() || v.negative.empty())
    throw Error("verbalizer classes must be non-empty");
  if (!verbalizer_disjoint(v))
    throw Error("verbalizer classes must be disjoint");
}

PromptTemplate parse_template(const std::string& raw,
                              const std::string& code_marker,
                              const std::string& mask_marker,
                              std::size_t max_words) {
  const auto tokens = split_ws(raw);
  std::ptrdiff_t code_pos = -1, mask_pos = -1;
  int code_count = 0, mask_count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == code_marker) {
      ++code_count;
      code_pos = static_cast<std::ptrdiff_t>(i);
    } else if (tokens[i] == mask_marker) {
      ++mask_count;
      mask_pos = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (code_count != 1)
    throw MissingMarkerError("expected exactly one '" + code_marker +
                             "', found " + std::to_string(code_count));
  if (mask_count != 1)
    throw MissingMarkerError("expected exactly one '" + mask_marker +
                             "', found " + std::to_string(mask_count));

  PromptTemplate t;
  // The mask must not interrupt a word run on its side of the code marker.
  auto check_side = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    // words in (lo, hi) exclusive of markers; mask_pos inside splits them if
    // words exist both before and after it
    bool before = false, after = false;
    for (std::ptrdiff_t i = lo + 1; i < hi; ++i) {
      if (i == mask_pos) continue;
      if (i < mask_pos) before = true;
      if (i > mask_pos) after = true;
    }
    if (mask_pos > lo && mask_pos < hi && before && after)
      throw SplitSegmentError("mask marker interrupts a word run");
  };
  check_side(-1, code_pos);
  check_side(code_pos, static_cast<std::ptrdiff_t>(tokens.size()));

  std::ptrdiff_t str1_first = -1, str2_first = -1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tokens.size()); ++i) {
    if (i == code_pos || i == mask_pos) continue;
    if (i < code_pos) {
      if (str1_first < 0) str1_first = i;
      t.str1.push_back(tokens[i]);
    } else {
      if (str2_first < 0) str2_first = i;
      t.str2.push_back(tokens[i]);
    }
  }
  if (t.word_count() > max_words)
    throw OverLengthError("template holds " + std::to_string(t.word_count()) +
                          " words, cap is " + std::to_string(max_words));

  // Sort segments by their position in the raw string; empty segments take
  // the canonical slot adjacent to the code marker.
  const double k1 = str1_first >= 0 ? static_cast<double>(str1_first)
                                    : static_cast<double>(code_pos) - 0.5;
  const double k2 = str2_first >= 0 ? static_cast<double>(str2_first)
                                    : static_cast<double>(code_pos) + 0.5;
  std::array<std::pair<double, SegmentId>, 4> keyed = {{
      {k1, SegmentId::Str1},
      {k2, SegmentId::Str2},
      {static_cast<double>(code_pos), SegmentId::CodeSlot},
      {static_cast<double>(mask_pos), SegmentId::MaskSlot},
  }};
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < 4; ++i) t.order[i] = keyed[i].second;
  return t;
}

std::string render(const PromptTemplate& t, const std::string& code_text,
                   const std::string& mask_marker) {
  std::string out;
  auto append = [&out](const std::string& piece) {
    if (piece.empty()) return;
    if (!out.empty()) out += ' ';
    out += piece;
  };
  auto join = [](const WordList& ws) {
    std::string s;
    for (const auto& w : ws) {
      if (!s.empty()) s += ' ';
      s += w;
    }
    return s;
  };
  for (SegmentId id : t.order) {
    switch (id) {
      case SegmentId::Str1: append(join(t.str1)); break;
      case SegmentId::Str2: append(join(t.str2)); break;
      case SegmentId::CodeSlot: append(code_text); break;
      case SegmentId::MaskSlot: append(mask_marker); break;
    }
  }
  return out;
}

std::string canonical_key(const Prompt& p) {
  // Structural JSON encoding; rendered text alone is ambiguous because empty
  // segments are invisible in it.
  nlohmann::json j;
  j["s1"] = p.tmpl.str1;
  j["s2"] = p.tmpl.str2;
  std::array<int, 4> ord;
  for (std::size_t i = 0; i < 4; ++i) ord[i] = static_cast<int>(p.tmpl.order[i]);
  j["ord"] = ord;
  if (p.verbalizer) {
    auto sorted = [](WordList ws) {
      std::sort(ws.begin(), ws.end());
      return ws;
    };
    j["pos"] = sorted(p.verbalizer->positive);
    j["neg"] = sorted(p.verbalizer->negative);
  }
  return j.dump();
}

ClassLabel project_label(const std::map<std::string, double>& scores,
                         const Verbalizer& v) {
  auto class_mean = [&scores](const WordList& words) {
    double sum = 0.0;
    for (const auto& w : words) {
      auto it = scores.find(w);
      if (it == scores.end())
        throw MissingScoreError("no score for verbalizer word '" + w + "'");
      sum += it->second;
    }
    return sum / static_cast<double>(words.size());
  };
  const double pos = class_mean(v.positive);
  const double neg = class_mean(v.negative);
  return pos > neg ? ClassLabel::Positive : ClassLabel::Negative;
}

const char* to_string(SegmentId id) {
  switch (id) {
    case SegmentId::Str1: return "str1";
    case SegmentId::Str2: return "str2";
    case SegmentId::CodeSlot: return "code";
    case SegmentId::MaskSlot: return "mask";
  }
  return "?";
}

const char* to_string(ClassLabel label) {
  return label == ClassLabel::Positive ? "positive" : "negative";
}

}  // namespace genap

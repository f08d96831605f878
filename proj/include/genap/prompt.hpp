#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace genap {

/// The four segments of the fixed-shape prompt encoding.
enum class SegmentId { Str1, Str2, CodeSlot, MaskSlot };

constexpr std::array<SegmentId, 4> kAllSegments = {
    SegmentId::Str1, SegmentId::Str2, SegmentId::CodeSlot, SegmentId::MaskSlot};

/// Canonical segment order: Str1 <code> Str2 <mask>.
constexpr std::array<SegmentId, 4> kCanonicalOrder = {
    SegmentId::Str1, SegmentId::CodeSlot, SegmentId::Str2, SegmentId::MaskSlot};

using WordList = std::vector<std::string>;
using SegmentOrder = std::array<SegmentId, 4>;

/// Variable-length prompt template: the word runs before and after the code
/// slot plus the permutation placing the four segments.
struct PromptTemplate {
  WordList str1;
  WordList str2;
  SegmentOrder order = kCanonicalOrder;

  std::size_t word_count() const { return str1.size() + str2.size(); }
  bool operator==(const PromptTemplate&) const = default;
};

/// Label words projecting mask predictions onto the binary classes.
struct Verbalizer {
  WordList positive;
  WordList negative;

  bool operator==(const Verbalizer&) const = default;
};

struct Prompt {
  PromptTemplate tmpl;
  std::optional<Verbalizer> verbalizer;  // absent for generation tasks

  bool operator==(const Prompt&) const = default;
};

/// A prompt with its (lazily computed) fitness. Higher fitness is better.
struct Individual {
  Prompt prompt;
  std::optional<double> fitness;
};

/// Candidate entries for template insertion and verbalizer words.
/// template_entries are word groups; removal mutations deposit whole groups.
struct WordPool {
  std::vector<WordList> template_entries;
  WordList verbalizer_entries;

  /// All template-pool words as a flat list.
  WordList flattened_template_words() const;
};

enum class ClassLabel { Positive, Negative };

/// Validates the permutation / word / cap invariants of a template.
bool is_valid_order(const SegmentOrder& order);
void validate_template(const PromptTemplate& t,
                       std::size_t max_words = std::numeric_limits<std::size_t>::max());
void validate_verbalizer(const Verbalizer& v);
bool verbalizer_disjoint(const Verbalizer& v);

/// Splits a raw template string (e.g. "This <code> is <mask>") into the
/// fixed-shape representation. Throws MissingMarkerError, SplitSegmentError
/// or OverLengthError.
PromptTemplate parse_template(
    const std::string& raw, const std::string& code_marker = "<code>",
    const std::string& mask_marker = "<mask>",
    std::size_t max_words = std::numeric_limits<std::size_t>::max());

/// Renders the template around a code sample, leaving mask_marker in place.
std::string render(const PromptTemplate& t, const std::string& code_text,
                   const std::string& mask_marker = "<mask>");

/// Deterministic, injective identity of a prompt; cache and dedup key.
std::string canonical_key(const Prompt& p);

/// Argmax-of-means projection of per-word scores onto a class label.
/// Exact tie returns Negative. Throws MissingScoreError.
ClassLabel project_label(const std::map<std::string, double>& scores,
                         const Verbalizer& v);

const char* to_string(SegmentId id);
const char* to_string(ClassLabel label);

}  // namespace genap

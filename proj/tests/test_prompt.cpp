#include <doctest.h>

#include <set>

#include "genap/errors.hpp"
#include "genap/prompt.hpp"
#include "genap/rng.hpp"

using namespace genap;

namespace {

PromptTemplate random_template(Rng& rng, std::size_t cap = 5) {
  static const WordList vocab = {"this", "code", "is", "works", "the",
                                 "good", "check", "snippet"};
  PromptTemplate t;
  const std::size_t total = rng.uniform_range(0, cap);
  const std::size_t n1 = rng.uniform_range(0, total);
  for (std::size_t i = 0; i < total; ++i)
    (i < n1 ? t.str1 : t.str2).push_back(vocab[rng.uniform_index(vocab.size())]);
  std::vector<SegmentId> perm(kAllSegments.begin(), kAllSegments.end());
  rng.shuffle(perm);
  std::copy(perm.begin(), perm.end(), t.order.begin());
  return t;
}

// Orders whose rendered text survives parse_template: str1 must sit on the
// left of the code slot and str2 on the right (or be empty), and the mask
// must not split a word run.
bool round_trippable(const PromptTemplate& t) {
  auto pos = [&t](SegmentId id) {
    for (std::size_t i = 0; i < 4; ++i)
      if (t.order[i] == id) return i;
    return std::size_t{4};
  };
  const std::size_t c = pos(SegmentId::CodeSlot);
  const std::size_t m = pos(SegmentId::MaskSlot);
  const std::size_t s1 = pos(SegmentId::Str1);
  const std::size_t s2 = pos(SegmentId::Str2);
  if (!t.str1.empty() && s1 > c) return false;
  if (!t.str2.empty() && s2 < c) return false;
  if (t.str1.empty() && s1 != c - 1) return false;
  if (t.str2.empty() && s2 != c + 1) return false;
  // both word segments on one side of the code slot with the mask between
  // them would merge into a single run and re-parse differently
  if (!t.str1.empty() && !t.str2.empty() && s1 < c && s2 < c) return false;
  if (!t.str1.empty() && !t.str2.empty() && s1 > c && s2 > c) return false;
  return true;
}

}  // namespace

TEST_CASE("parse_template splits around the division marker") {
  const auto t = parse_template("This <code> is <mask>");
  CHECK(t.str1 == WordList{"This"});
  CHECK(t.str2 == WordList{"is"});
  CHECK(t.order == kCanonicalOrder);
}

TEST_CASE("parse_template assigns empty segments canonically") {
  const auto t = parse_template("<code> <mask>");
  CHECK(t.str1.empty());
  CHECK(t.str2.empty());
  CHECK(t.order == kCanonicalOrder);
}

TEST_CASE("parse_template keeps all words on one side when str2 is empty") {
  const auto t = parse_template("This is <code> <mask>");
  CHECK(t.str1 == WordList{"This", "is"});
  CHECK(t.str2.empty());
  CHECK(t.order == kCanonicalOrder);
}

TEST_CASE("parse_template records a mask before the code slot") {
  const auto t = parse_template("This <mask> <code> after");
  CHECK(t.str1 == WordList{"This"});
  CHECK(t.str2 == WordList{"after"});
  const SegmentOrder expected = {SegmentId::Str1, SegmentId::MaskSlot,
                                 SegmentId::CodeSlot, SegmentId::Str2};
  CHECK(t.order == expected);
}

TEST_CASE("parse_template rejects bad marker counts") {
  CHECK_THROWS_AS(parse_template("no markers here"), MissingMarkerError);
  CHECK_THROWS_AS(parse_template("<code> <mask> <mask>"), MissingMarkerError);
  CHECK_THROWS_AS(parse_template("<code> <code> <mask>"), MissingMarkerError);
}

TEST_CASE("parse_template rejects a mask splitting a word run") {
  CHECK_THROWS_AS(parse_template("This <code> is <mask> here"),
                  SplitSegmentError);
  CHECK_THROWS_AS(parse_template("a <mask> b <code>"), SplitSegmentError);
}

TEST_CASE("parse_template enforces the word cap") {
  CHECK_THROWS_AS(parse_template("a b c <code> d e f <mask>", "<code>",
                                 "<mask>", 5),
                  OverLengthError);
  CHECK_NOTHROW(parse_template("a b <code> c d e <mask>", "<code>", "<mask>", 5));
}

TEST_CASE("render wraps code and keeps single spacing") {
  PromptTemplate t;
  t.str1 = {"This", "code"};
  t.str2 = {"is"};
  CHECK(render(t, "def f(): pass") == "This code def f(): pass is <mask>");

  PromptTemplate empty;
  CHECK(render(empty, "x") == "x <mask>");

  PromptTemplate works;
  works.str1 = {"The", "code"};
  works.str2 = {"works"};
  CHECK(render(works, "c") == "The code c works <mask>");
}

TEST_CASE("render emits no double spaces or segment names") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_template(rng);
    const std::string s = render(t, "<code>");
    CHECK(s.find("  ") == std::string::npos);
    CHECK(s.find("str1") == std::string::npos);
    CHECK(s.find("str2") == std::string::npos);
    CHECK_FALSE(s.empty());
  }
}

TEST_CASE("parse_template inverts render on round-trippable templates") {
  Rng rng(42);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto t = random_template(rng);
    if (!round_trippable(t)) continue;
    ++checked;
    const auto back = parse_template(render(t, "<code>"));
    CHECK(back == t);
  }
  CHECK(checked > 200);
}

TEST_CASE("canonical_key equality matches structural equality") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Prompt a{random_template(rng), std::nullopt};
    Prompt b{random_template(rng), std::nullopt};
    if (rng.bernoulli(0.3)) b = a;
    CHECK((canonical_key(a) == canonical_key(b)) == (a == b));
  }
}

TEST_CASE("canonical_key distinguishes verbalizer and order changes") {
  Prompt a;
  a.tmpl.str1 = {"This"};
  a.verbalizer = Verbalizer{{"bad"}, {"good"}};
  Prompt b = a;
  CHECK(canonical_key(a) == canonical_key(b));

  b.verbalizer->positive = {"buggy"};
  CHECK(canonical_key(a) != canonical_key(b));

  Prompt c = a;
  std::swap(c.tmpl.order[0], c.tmpl.order[1]);
  CHECK(canonical_key(a) != canonical_key(c));

  // empty segments must stay distinguishable despite identical rendering
  Prompt d, e;
  d.tmpl.str1 = {"a"};
  e.tmpl.str2 = {"a"};
  e.tmpl.order = {SegmentId::Str1, SegmentId::Str2, SegmentId::CodeSlot,
                  SegmentId::MaskSlot};
  CHECK(canonical_key(d) != canonical_key(e));
}

TEST_CASE("project_label takes the argmax of class means") {
  const Verbalizer v{{"Defective"}, {"Perfect"}};
  CHECK(project_label({{"Defective", 0.2}, {"Perfect", 0.5}}, v) ==
        ClassLabel::Negative);
  CHECK(project_label({{"Defective", 0.5}, {"Perfect", 0.5}}, v) ==
        ClassLabel::Negative);  // tie-break

  const Verbalizer multi{{"a", "b"}, {"c"}};
  CHECK(project_label({{"a", 0.9}, {"b", 0.1}, {"c", 0.4}}, multi) ==
        ClassLabel::Positive);
}

TEST_CASE("project_label raises on missing scores") {
  const Verbalizer v{{"bad"}, {"good"}};
  CHECK_THROWS_AS(project_label({{"bad", 0.2}}, v), MissingScoreError);
}

TEST_CASE("project_label is invariant under positive rescaling") {
  Rng rng(3);
  const Verbalizer v{{"a", "b"}, {"c", "d", "e"}};
  for (int i = 0; i < 300; ++i) {
    std::map<std::string, double> scores;
    for (const auto& w : {"a", "b", "c", "d", "e"})
      scores[w] = rng.uniform01();
    const auto base = project_label(scores, v);
    const double scale = 0.001 + rng.uniform01() * 100.0;
    std::map<std::string, double> scaled;
    for (auto& [k, s] : scores) scaled[k] = s * scale;
    CHECK(project_label(scaled, v) == base);
  }
}

TEST_CASE("verbalizer validation rejects shared and empty classes") {
  CHECK_THROWS_AS(validate_verbalizer(Verbalizer{{}, {"good"}}), Error);
  CHECK_THROWS_AS(validate_verbalizer(Verbalizer{{"same"}, {"same"}}), Error);
  CHECK_NOTHROW(validate_verbalizer(Verbalizer{{"bad"}, {"good"}}));
}

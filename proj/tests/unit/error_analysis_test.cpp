#include <random>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "errata/error.hpp"
#include "errata/error_analysis.hpp"
#include "errata/unicode.hpp"

using namespace errata;

namespace {

struct Expected {
  ErrorType type;
  std::size_t position;
  std::string expected;
  std::string written;
};

void check_instances(const ErrorAnnotation& ann, const std::vector<Expected>& want) {
  REQUIRE(ann.instances.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    CAPTURE(k);
    CHECK(ann.instances[k].type == want[k].type);
    CHECK(ann.instances[k].position == want[k].position);
    CHECK(ann.instances[k].expected == want[k].expected);
    CHECK(ann.instances[k].written == want[k].written);
  }
  CHECK(ann.error_count == want.size());
  CHECK(count_errors(ann) == want.size());
}

}  // namespace

TEST_CASE("damerau_distance basics") {
  CHECK(damerau_distance("casa", "casa") == 0);
  CHECK(damerau_distance("ab", "ba") == 1);
  CHECK(damerau_distance("litel", "little") == 2);
  CHECK(damerau_distance("", "abc") == 3);
  CHECK(damerau_distance("árbol", "arbol") == 1);
  // the restricted variant never edits a letter twice: "ca" -> "abc" needs 3
  CHECK(damerau_distance("ca", "abc") == 3);
}

TEST_CASE("damerau_distance of probley/probably agrees with both search oracles") {
  const std::u32string a = U"probley";
  const std::u32string b = U"probably";
  // Frozen from oracle::restricted_distance and oracle::bfs_distance.
  CHECK(oracle::restricted_distance(a, b) == 3);
  CHECK(oracle::bfs_distance(a, b, U"abelopry") == 3);
  CHECK(damerau_distance(a, b) == 3);
}

TEST_CASE("damerau_distance equals the restricted search oracle on short strings") {
  const auto strings = oracle::all_strings(U"abc", 3);
  for (const auto& a : strings) {
    for (const auto& b : strings) {
      const auto d = damerau_distance(a, b);
      CHECK(d == oracle::restricted_distance(a, b));
      CHECK(d == damerau_distance(b, a));
      CHECK(d <= a.size() + b.size());
    }
    CHECK(damerau_distance(a, a) == 0);
  }
}

TEST_CASE("align produces the canonical scripts") {
  CHECK(align("littel", "little") ==
        std::vector<EditOp>{{EditKind::Transpose, 4, "le", "el"}});
  CHECK(align("emty", "empty") == std::vector<EditOp>{{EditKind::Insert, 2, "p", ""}});
  CHECK(align("x", "x").empty());
  CHECK(align("arround", "around") == std::vector<EditOp>{{EditKind::Delete, 1, "", "r"}});
  CHECK(align("scholl", "school") == std::vector<EditOp>{{EditKind::Substitute, 4, "o", "l"}});
}

TEST_CASE("align scripts replay to the correct form with minimal length") {
  std::mt19937_64 rng(11);
  const std::u32string alphabet = U"abcdeñáo";
  const std::vector<std::u32string> seeds = {U"casa", U"pájaro", U"perro", U"escuela", U"tremendous",
                                             U"mañana", U"little", U"a", U"aaaa"};
  for (int round = 0; round < 2000; ++round) {
    auto correct = seeds[rng() % seeds.size()];
    auto wrong = correct;
    const auto edits = rng() % 4;
    for (std::size_t e = 0; e < edits; ++e) {
      const auto kind = rng() % 4;
      const auto pos = wrong.empty() ? 0 : rng() % wrong.size();
      if (kind == 0) wrong.insert(wrong.begin() + pos, alphabet[rng() % alphabet.size()]);
      if (kind == 1 && !wrong.empty()) wrong.erase(pos, 1);
      if (kind == 2 && !wrong.empty()) wrong[pos] = alphabet[rng() % alphabet.size()];
      if (kind == 3 && pos + 1 < wrong.size()) std::swap(wrong[pos], wrong[pos + 1]);
    }
    const auto ops = align(wrong, correct);
    CAPTURE(unicode::encode(wrong));
    CAPTURE(unicode::encode(correct));
    CHECK(apply_edits(wrong, ops) == correct);
    CHECK(ops.size() == damerau_distance(wrong, correct));
    for (const auto& op : ops) {
      if (op.kind == EditKind::Insert) CHECK(op.written.empty());
      if (op.kind == EditKind::Delete) CHECK(op.expected.empty());
      if (op.kind == EditKind::Transpose) CHECK(unicode::length(op.expected) == 2);
    }
  }
}

TEST_CASE("classify_pair on the canonical fixtures") {
  check_instances(classify_pair("arround", "around", Language::en),
                  {{ErrorType::Insertion, 1, "", "r"}});
  check_instances(classify_pair("emty", "empty", Language::en), {{ErrorType::Omission, 2, "p", ""}});
  check_instances(classify_pair("scholl", "school", Language::en),
                  {{ErrorType::Substitution, 4, "o", "l"}});
  check_instances(classify_pair("littel", "little", Language::en),
                  {{ErrorType::Transposition, 4, "le", "el"}});
  check_instances(classify_pair("alot", "a lot", Language::en),
                  {{ErrorType::Boundary, 1, "a lot", "alot"}});
  check_instances(classify_pair("mis understanding", "misunderstanding", Language::en),
                  {{ErrorType::Boundary, 3, "misunderstanding", "mis understanding"}});
  check_instances(classify_pair("warnment", "warning", Language::en),
                  {{ErrorType::Morphology, 4, "ing", "ment"}});
  check_instances(classify_pair("litel", "little", Language::en),
                  {{ErrorType::Omission, 2, "t", ""}, {ErrorType::Transposition, 4, "le", "el"}});
  CHECK(count_errors(classify_pair("casa", "casa", Language::es)) == 0);
}

TEST_CASE("classify_pair handles Spanish and mixed errors") {
  check_instances(classify_pair("baca", "vaca", Language::es), {{ErrorType::Substitution, 0, "v", "b"}});
  check_instances(classify_pair("pajaro", "pájaro", Language::es),
                  {{ErrorType::Substitution, 1, "á", "a"}});
  check_instances(classify_pair("aora", "ahora", Language::es), {{ErrorType::Omission, 1, "h", ""}});
  check_instances(classify_pair("pensación", "pensamiento", Language::es),
                  {{ErrorType::Morphology, 5, "miento", "ción"}});
  check_instances(classify_pair("unagree", "disagree", Language::en),
                  {{ErrorType::Morphology, 0, "dis", "un"}});
  // a boundary error with a letter error inside is counted as two errors
  const auto both = classify_pair("a lott", "alot", Language::en);
  CHECK(count_errors(both) == 2);
  CHECK(both.instances[0].type == ErrorType::Boundary);
  CHECK(both.instances[1].type == ErrorType::Insertion);
  // a single-letter suffix slip stays a letter error
  check_instances(classify_pair("cantada", "cantado", Language::es),
                  {{ErrorType::Substitution, 6, "o", "a"}});
}

TEST_CASE("classify_pair over sentences keeps token indices") {
  const auto ann = classify_pair("el perro come alot", "el pero come a lot", Language::es);
  REQUIRE(ann.instances.size() == 2);
  CHECK(ann.instances[0].type == ErrorType::Insertion);
  CHECK(ann.instances[0].token_index == 1);
  CHECK(ann.instances[1].type == ErrorType::Boundary);
  CHECK(ann.instances[1].token_index == 3);
  CHECK(ann.segments.size() == 4);
}

TEST_CASE("classify_pair reports unalignable token counts") {
  try {
    (void)classify_pair("a b c d e", "x", Language::en);
    FAIL("expected UnalignableTokens");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnalignableTokens);
  }
  CHECK_THROWS_AS((void)classify_pair("...", "casa", Language::es), Error);
}

TEST_CASE("every edit op maps to exactly one instance unless absorbed") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words = {"tremendous", "famous", "little", "school", "around", "empty"};
  for (int round = 0; round < 300; ++round) {
    const auto correct = unicode::decode(words[rng() % words.size()]);
    auto wrong = correct;
    const auto pos = rng() % (wrong.size() - 1);
    switch (rng() % 4) {
      case 0: wrong.insert(wrong.begin() + pos, U'x'); break;
      case 1: wrong.erase(pos, 1); break;
      case 2: wrong[pos] = U'z'; break;
      default: std::swap(wrong[pos], wrong[pos + 1]); break;
    }
    const auto ann = classify_pair(unicode::encode(wrong), unicode::encode(correct), Language::en);
    CHECK(ann.instances.size() == align(wrong, correct).size());
  }
}

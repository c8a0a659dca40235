#include <random>
#include <sstream>

#include "doctest.h"
#include "errata/error.hpp"
#include "errata/evaluation_metrics.hpp"

using namespace errata;

namespace {

std::vector<std::string> words(std::string_view text) { return split_whitespace(text); }

}  // namespace

TEST_CASE("dictation rates follow their definitions") {
  const auto ref = words("el perro de mi casa come pan con queso blanco");
  // two wrong words: one error in perro, two in queso
  const auto hyp = words("el pero de mi casa come pan con keso blanko");
  const auto s = score_writing(ref, hyp);
  CHECK(s.total_words == 10);
  CHECK(s.words_with_errors == 3);

  const auto s2 = score_writing(ref, words("el pero de mi casa come pan con cueco blanco"));
  CHECK(s2.words_with_errors == 2);
  CHECK(s2.total_errors == 3);
  CHECK(s2.rate_words_with_errors == doctest::Approx(0.2));
  CHECK(s2.errors_per_word == doctest::Approx(0.3));
  REQUIRE(s2.errors_per_wrong_word);
  CHECK(*s2.errors_per_wrong_word == doctest::Approx(1.5));
}

TEST_CASE("identical transcripts score zero") {
  const auto ref = words("había una vez un gato");
  const auto s = score_writing(ref, ref);
  CHECK(s.words_with_errors == 0);
  CHECK(s.total_errors == 0);
  CHECK(s.rate_words_with_errors == 0.0);
  CHECK(s.errors_per_word == 0.0);
  CHECK_FALSE(s.errors_per_wrong_word);
  CHECK(score_reading(ref, ref).total_errors == 0);
}

TEST_CASE("litel has two errors") {
  const auto s = score_writing({"little"}, {"litel"}, Language::en);
  CHECK(s.total_errors == 2);
  CHECK(s.words_with_errors == 1);
  REQUIRE(s.errors_per_wrong_word);
  CHECK(*s.errors_per_wrong_word == 2.0);
}

TEST_CASE("reading counts omitted and added words once") {
  const auto r = score_reading({"el", "sol"}, {"sol"});
  CHECK(r.total_errors == 1);
  CHECK(r.omitted_words == 1);
  CHECK(r.errors_per_word == 0.5);

  CHECK(score_reading({"school"}, {"scholl"}, Language::en).total_errors == 1);

  const auto added = score_reading(words("el sol sale"), words("el gran sol sale"));
  CHECK(added.total_errors == 1);
  CHECK(added.added_words == 1);
}

TEST_CASE("a boundary error counts once") {
  const auto s = score_writing(words("de repente llegó"), words("derrepente llegó"));
  CHECK(s.total_words == 3);
  CHECK(s.words_with_errors == 1);
  CHECK(s.total_errors == 2);  // boundary plus the doubled r

  const auto split = score_writing(words("sometimes it rains"), words("some times it rains"), Language::en);
  CHECK(split.words_with_errors == 1);
  CHECK(split.total_errors == 1);
}

TEST_CASE("misspellings are not explained as omission plus addition") {
  const auto segs = align_for_scoring(words("la casa azul"), words("la caza azul"), Language::es);
  REQUIRE(segs.size() == 3);
  for (const auto& s : segs) {
    CHECK(s.ref_count == 1);
    CHECK(s.hyp_count == 1);
  }
  CHECK(segs[1].errors == 1);
}

TEST_CASE("an added word marks a neighbouring word wrong") {
  const auto s = score_writing(words("mi casa"), words("mi casa casa"));
  CHECK(s.total_errors == 1);
  CHECK(s.words_with_errors == 1);
  CHECK(s.added_words == 1);

  const auto lead = score_writing(words("mi casa"), words("y mi casa"));
  CHECK(lead.total_errors == 1);
  CHECK(lead.words_with_errors == 1);
}

TEST_CASE("empty reference and mismatched lines are rejected") {
  CHECK_THROWS_AS(score_writing(std::vector<std::string>{}, words("hola")), Error);
  CHECK_THROWS_AS(score_reading(words("¡ ! ,"), words("hola")), Error);
  try {
    score_writing(std::vector<std::vector<std::string>>{{"a"}}, std::vector<std::vector<std::string>>{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DataFormat);
  }
  try {
    score_writing(std::vector<std::string>{}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyReference);
  }
}

TEST_CASE("line-aligned scores sum counts before dividing") {
  std::istringstream ref("el sol sale\nla luna\n");
  std::istringstream hyp("el sol sale\nla lluna\n");
  const auto s = score_writing(read_token_lines(ref), read_token_lines(hyp));
  CHECK(s.total_words == 5);
  CHECK(s.total_errors == 1);
  CHECK(s.rate_words_with_errors == doctest::Approx(0.2));
}

TEST_CASE("published pre/post changes are reproduced") {
  struct Row {
    double pre, post, change;
  };
  const Row rows[] = {{28.9, 23.9, -5.0},   {0.360, 0.288, -0.072}, {1.178, 1.007, -0.171},
                      {0.117, 0.106, -0.011}, {3.395, 3.721, 0.326},  {3.488, 3.933, 0.445},
                      {28.2, 25.9, -2.3},   {0.325, 0.355, 0.030},  {1.080, 1.244, 0.164},
                      {0.129, 0.114, -0.015}, {3.326, 3.581, 0.256},  {3.535, 3.767, 0.233}};
  for (const auto& r : rows) {
    CAPTURE(r.pre);
    const auto d = delta(r.pre, r.post);
    CHECK(d.pre == r.pre);
    CHECK(d.post == r.post);
    CHECK(std::abs(d.change - r.change) <= 0.002);
  }
  CHECK(delta(0.7, 0.7).change == 0.0);
}

TEST_CASE("score invariants on random corruptions") {
  const auto ref = words("el niño jugaba con su perro en el parque cerca de la casa de su abuela");
  const std::string letters = "abcdefghilmnoprstuvz";
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> hyp;
    for (const auto& w : ref) {
      const auto roll = rng() % 10;
      if (roll == 0) continue;
      std::string x = w;
      if (roll == 1 && x.size() > 1 && static_cast<unsigned char>(x[0]) < 0x80) x[0] = letters[rng() % letters.size()];
      if (roll == 2) x += letters[rng() % letters.size()];
      hyp.push_back(x);
      if (roll == 3) hyp.push_back("y");
    }
    if (hyp.empty()) continue;
    const auto s = score_writing(ref, hyp);
    CHECK(s.rate_words_with_errors <= s.errors_per_word + 1e-12);
    if (s.errors_per_wrong_word) CHECK(*s.errors_per_wrong_word >= 1.0);
    CHECK(s.rate_words_with_errors <= 1.0);
    CHECK(s.rate_words_with_errors == doctest::Approx(double(s.words_with_errors) / s.total_words));
    const auto r = score_reading(ref, hyp);
    CHECK(r.total_errors == s.total_errors);
  }
}

#include <algorithm>
#include <filesystem>
#include <set>

#include "../support/synthetic.hpp"
#include "doctest.h"
#include "errata/error.hpp"
#include "errata/exercise_generation.hpp"
#include "errata/unicode.hpp"

using namespace errata;

namespace {

const std::filesystem::path kCorpusDir = std::filesystem::path(ERRATA_SOURCE_DIR) / "data" / "corpus";

Lexicon toy_lexicon() { return Lexicon(Language::es, {{"casa", 50}, {"cosa", 40}, {"cama", 30}, {"mesa", 20}}); }

PatternBank spanish_patterns() {
  const auto pairs = load_corpus(kCorpusDir / "es_fixture.tsv");
  return extract_patterns(annotate(pairs, Language::es), GraphemeClusterInventory::builtin(Language::es));
}

std::size_t brute_ortho(const WordForm& w, const Lexicon& lex) {
  std::size_t n = 0;
  for (const auto& e : lex.entries()) {
    if (e.form.size() != w.size()) continue;
    std::size_t diff = 0;
    for (std::size_t k = 0; k < w.size(); ++k) diff += e.form.letters()[k] != w.letters()[k];
    n += diff == 1;
  }
  return n;
}

void check_errc(Errc code, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected " << errc_name(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("difficulty profiles on a toy lexicon") {
  const auto lex = toy_lexicon();
  const auto casa = normalize("casa", Language::es);
  const auto p = difficulty(casa, lex);
  CHECK(p.ortho_neighbors == brute_ortho(casa, lex));
  CHECK(p.ortho_neighbors == 2);
  CHECK(p.frequency_rank == 1);
  CHECK(p.length == 4);
  CHECK(difficulty(casa, lex) == p);
  check_errc(Errc::WordNotInLexicon, [&] { (void)difficulty(normalize("perro", Language::es), lex); });

  // the most frequent, shortest, neighborless word sits at the minimum
  const Lexicon spread(Language::es, {{"sol", 90}, {"mariposa", 5}, {"pato", 4}, {"gato", 3}, {"dato", 2}});
  const DifficultyModel model(spread);
  const auto& easiest = model.profile(normalize("sol", Language::es));
  CHECK(easiest.composite == doctest::Approx(0.0));
  for (const auto& e : spread.entries()) CHECK(model.profile(e.form).composite >= easiest.composite);
}

TEST_CASE("neighbor counts agree with the direct neighbor scans") {
  const Lexicon lex(Language::es, synthetic::spanish_lexicon(400, 3));
  const DifficultyModel model(lex);
  for (std::size_t i = 0; i < lex.size(); i += 7) {
    const auto& w = lex.entries()[i].form;
    CAPTURE(w.text());
    CHECK(model.profile(w).ortho_neighbors == orthographic_neighbors(w, lex).size());
    CHECK(model.profile(w).phon_neighbors == phonetic_neighbors(w, lex).size());
    CHECK(model.profile(w).morph_complexity == AffixInventory::builtin(Language::es).morph_complexity(w.letters()));
  }
}

TEST_CASE("assign_level follows the quintiles with ties to the easier level") {
  std::vector<double> xs;
  for (int k = 0; k <= 10; ++k) xs.push_back(k / 10.0);
  const auto cuts = quintile_cuts(xs);
  CHECK(cuts.upper[0] == doctest::Approx(0.2));
  CHECK(cuts.upper[3] == doctest::Approx(0.8));
  auto at = [&](double c) {
    DifficultyProfile p;
    p.composite = c;
    return assign_level(p, cuts);
  };
  CHECK(at(0.05) == DifficultyLevel::Initial);
  CHECK(at(0.95) == DifficultyLevel::Expert);
  CHECK(at(cuts.upper[1]) == DifficultyLevel::Easy);
  CHECK(at(std::nextafter(cuts.upper[1], 1.0)) == DifficultyLevel::Medium);
  check_errc(Errc::InvalidRequest, [] { (void)quintile_cuts({}); });
}

TEST_CASE("corrupt builds the stems the patterns describe") {
  ErrorPattern run_on{ErrorType::Boundary, "a lot", "alot", "#", "#", 1, {}};
  const auto split = corrupt("a lot", run_on, 0, Language::en);
  CHECK(split.stem == "alot");
  CHECK(split.solution.position == 1u);

  ErrorPattern eou{ErrorType::Omission, "eou", "ou", "*", "*", 1, {}};
  const auto add = corrupt("gorgeous", eou, 4, Language::en);
  CHECK(add.stem == "gorgs");
  CHECK(add.solution.text == "eou");

  ErrorPattern vb{ErrorType::Substitution, "v", "b", "#", "*", 1, {}};
  CHECK(corrupt("vaca", vb, 0, Language::es).stem == "baca");
  check_errc(Errc::InapplicablePattern, [&] { (void)corrupt("casa", vb, 0, Language::es); });
  check_errc(Errc::InapplicablePattern, [&] { (void)corrupt("de prisa", run_on, 0, Language::es); });
}

TEST_CASE("select_distractors walks its sources in order") {
  const PatternBank empty;
  const auto two = select_distractors("b", empty, Language::es, 2, nullptr, 1);
  REQUIRE(two.size() == 2);
  for (const auto& d : two) CHECK(std::set<std::string>{"d", "p", "g", "t"}.count(d) == 1);

  PatternBank bank;
  bank.language = Language::en;
  bank.confusions["ou"] = {{"uo", 4}, {"u", 3}, {"euo", 2}};
  CHECK(select_distractors("ou", bank, Language::en, 3, nullptr, 1) ==
        std::vector<std::string>{"uo", "u", "euo"});
  // unsafe candidates are skipped
  const auto safe = select_distractors("ou", bank, Language::en, 2, [](const std::string& c) { return c != "u"; }, 1);
  CHECK(safe == std::vector<std::string>{"uo", "euo"});
  check_errc(Errc::InvalidRequest, [&] { (void)select_distractors("a", bank, Language::en, 0, nullptr, 1); });
  check_errc(Errc::InsufficientDistractors,
             [&] { (void)select_distractors("a", bank, Language::en, 2, [](const std::string&) { return false; }, 1); });
  // the fallback is seeded
  CHECK(select_distractors("h", empty, Language::es, 3, nullptr, 9) ==
        select_distractors("h", empty, Language::es, 3, nullptr, 9));
}

TEST_CASE("apply_response rebuilds the target only for the solution") {
  Exercise ex;
  ex.type = ExerciseType::ChangeLetter;
  ex.target = "vaca";
  ex.stem = "baca";
  ex.gap = Gap{0, 1};
  ex.choices = {"b", "v", "p", "d"};
  ex.solution.text = "v";
  CHECK(is_correct(ex, ex.solution));
  CHECK_FALSE(is_correct(ex, {"p", std::nullopt}));
  CHECK_FALSE(apply_response(ex, {"z", std::nullopt}).has_value());

  Exercise split;
  split.type = ExerciseType::SplitWords;
  split.target = "a lot";
  split.stem = "alot";
  split.solution.position = 1;
  CHECK(is_correct(split, split.solution));
  CHECK(apply_response(split, {"", 2}) == "al ot");
  CHECK_FALSE(apply_response(split, {"", 0}).has_value());
  CHECK_FALSE(apply_response(split, {"", 4}).has_value());

  Exercise reorder;
  reorder.type = ExerciseType::ReorderLetters;
  reorder.target = "little";
  reorder.stem = "littel";
  CHECK(is_correct(reorder, {"little", std::nullopt}));
  CHECK_FALSE(apply_response(reorder, {"littlee", std::nullopt}).has_value());

  Exercise remove;
  remove.type = ExerciseType::RemoveLetter;
  remove.target = "around";
  remove.stem = "arround";
  CHECK(is_correct(remove, {"", 1}));
  CHECK(is_correct(remove, {"", 2}));
  CHECK_FALSE(is_correct(remove, {"", 0}));
}

TEST_CASE("a small bank meets its quota and every invariant") {
  const Lexicon lex(Language::es, synthetic::spanish_lexicon(800, 5));
  const auto patterns = spanish_patterns();
  GenerationOptions options;
  options.seed = 42;
  const auto bank = generate_bank(lex, patterns, Quota::per_type(2), options);
  REQUIRE(bank.exercises.size() == 12);
  std::map<ExerciseType, int> per_type;
  std::set<std::tuple<std::string, ExerciseType, std::string>> seen;
  for (const auto& ex : bank.exercises) {
    CAPTURE(ex.id);
    CAPTURE(ex.stem);
    CAPTURE(ex.target);
    CHECK(validate(ex, lex).empty());
    CHECK(seen.emplace(ex.target, ex.type, ex.stem).second);
    ++per_type[ex.type];
    CHECK(public_view_json(ex).find("\"solution\"") == std::string::npos);
    CHECK(public_view_json(ex).find("\"target\"") == std::string::npos);
    CHECK(assign_level(ex.profile, bank.cuts.at(ex.type)) == ex.level);
  }
  for (auto t : kAllExerciseTypes) CHECK(per_type[t] == 2);

  const auto again = generate_bank(lex, patterns, Quota::per_type(2), options);
  CHECK(to_json(again) == to_json(bank));
  CHECK(to_json(exercise_bank_from_json(to_json(bank))) == to_json(bank));

  options.seed = 43;
  CHECK(to_json(generate_bank(lex, patterns, Quota::per_type(2), options)) != to_json(bank));
}

TEST_CASE("impossible quotas report the shortfall") {
  const auto lex = toy_lexicon();
  const auto patterns = spanish_patterns();
  check_errc(Errc::QuotaUnreachable, [&] { (void)generate_bank(lex, patterns, Quota::per_type(50)); });
  GenerationOptions options;
  options.allow_shortfall = true;
  const auto bank = generate_bank(lex, patterns, Quota::per_type(50), options);
  CHECK_FALSE(bank.shortfall.empty());
  std::size_t wanted = 0;
  std::size_t produced = 0;
  for (const auto& s : bank.shortfall) {
    wanted += s.wanted;
    produced += s.produced;
    CHECK(s.produced < s.wanted);
  }
  CHECK(wanted - produced == Quota::per_type(50).total() - bank.exercises.size());
}

TEST_CASE("quota helpers split counts evenly") {
  const auto q = Quota::per_level(500);
  CHECK(q.total() == 2500);
  CHECK(q.counts.at(ExerciseType::AddLetter)[0] == 84);
  CHECK(q.counts.at(ExerciseType::WordEnding)[4] == 83);
  CHECK(Quota::per_type(2).total() == 12);
  CHECK(Quota::per_type(2).counts.at(ExerciseType::SplitWords)[0] == 1);
}

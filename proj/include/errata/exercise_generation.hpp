#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errata/error_analysis.hpp"
#include "errata/pattern_extraction.hpp"
#include "errata/text_model.hpp"

namespace errata {

enum class ExerciseType { AddLetter, RemoveLetter, ChangeLetter, ReorderLetters, SplitWords, WordEnding };

inline constexpr ExerciseType kAllExerciseTypes[] = {
    ExerciseType::AddLetter,      ExerciseType::RemoveLetter, ExerciseType::ChangeLetter,
    ExerciseType::ReorderLetters, ExerciseType::SplitWords,   ExerciseType::WordEnding};

enum class DifficultyLevel { Initial, Easy, Medium, Hard, Expert };

inline constexpr DifficultyLevel kAllLevels[] = {DifficultyLevel::Initial, DifficultyLevel::Easy,
                                                 DifficultyLevel::Medium, DifficultyLevel::Hard,
                                                 DifficultyLevel::Expert};
inline constexpr std::size_t kLevelCount = 5;

std::string_view to_string(ExerciseType type) noexcept;
std::string_view to_string(DifficultyLevel level) noexcept;
ExerciseType parse_exercise_type(std::string_view name);
DifficultyLevel parse_level(std::string_view name);

/// The error type an exercise of `type` trains.
ErrorType trained_error(ExerciseType type) noexcept;
ExerciseType exercise_for(ErrorType type) noexcept;

struct DifficultyProfile {
  std::size_t frequency_rank = 0;
  std::size_t length = 0;
  std::size_t ortho_neighbors = 0;
  std::size_t phon_neighbors = 0;
  std::size_t morph_complexity = 0;
  double composite = 0.0;

  friend bool operator==(const DifficultyProfile&, const DifficultyProfile&) = default;
};

struct DifficultyWeights {
  double rank = 1.0;
  double length = 1.0;
  double ortho = 1.0;
  double phon = 1.0;
  double morph = 1.0;
};

/// Profiles of every lexicon word, with each component min-max normalized over
/// the lexicon. Phonetic neighbors are only counted for Spanish.
class DifficultyModel {
 public:
  DifficultyModel(const Lexicon& lexicon, Dialect dialect = Dialect::castilian,
                  DifficultyWeights weights = {});

  const Lexicon& lexicon() const noexcept { return *lexicon_; }
  /// Throws Error(WordNotInLexicon).
  const DifficultyProfile& profile(const WordForm& word) const;
  const DifficultyProfile& profile(std::size_t entry) const { return profiles_.at(entry); }
  /// Two-word phrases take the rarer word's profile with the phrase's letter count.
  DifficultyProfile phrase_profile(const WordForm& first, const WordForm& second) const;
  /// Weighted mean of the normalized components; higher is harder.
  double composite(const DifficultyProfile& p) const;

 private:
  const Lexicon* lexicon_;
  DifficultyWeights weights_;
  std::vector<DifficultyProfile> profiles_;
  std::array<double, 5> min_{};
  std::array<double, 5> max_{};
};

/// Convenience wrapper that builds a model for one lookup.
DifficultyProfile difficulty(const WordForm& target, const Lexicon& lexicon,
                             Dialect dialect = Dialect::castilian);

/// Upper composite bound of the first four levels; anything above is Expert.
struct LevelCuts {
  std::array<double, kLevelCount - 1> upper{};
};

/// Quintiles of `composites` with linear interpolation between order statistics.
LevelCuts quintile_cuts(std::vector<double> composites);
/// First level whose upper bound is >= the composite, so ties go to the easier level.
DifficultyLevel assign_level(const DifficultyProfile& profile, const LevelCuts& cuts);

struct Gap {
  std::size_t begin = 0;  // letter offsets into the stem
  std::size_t end = 0;

  friend bool operator==(const Gap&, const Gap&) = default;
};

/// What a player submits: the chosen text (AddLetter, ChangeLetter,
/// WordEnding, ReorderLetters) or a letter index (RemoveLetter, SplitWords).
struct Response {
  std::string text;
  std::optional<std::size_t> position;

  friend bool operator==(const Response&, const Response&) = default;
};

struct Exercise {
  std::string id;
  ExerciseType type = ExerciseType::AddLetter;
  Language language = Language::es;
  std::string target;  // a word, or two words for SplitWords
  std::string stem;
  std::optional<Gap> gap;            // where the choice goes
  std::vector<std::string> choices;  // empty for RemoveLetter, ReorderLetters, SplitWords
  Response solution;
  DifficultyLevel level = DifficultyLevel::Initial;
  DifficultyProfile profile;
  ErrorPattern provenance;  // contexts are "*" when the pattern was applied without them
  bool from_corpus = false;
};

/// The text the response produces, or nullopt when it does not fit the
/// exercise (unknown choice, index out of range).
std::optional<std::string> apply_response(const Exercise& exercise, const Response& response);
bool is_correct(const Exercise& exercise, const Response& response);

struct Corruption {
  std::string stem;
  Response solution;
};

/// Applies `pattern` to `target` at cluster `site`. Boundary run-on patterns
/// take a two-word target and join it (site 0 only). Throws
/// Error(InapplicablePattern) when the pattern does not match there.
Corruption corrupt(std::string_view target, const ErrorPattern& pattern, std::size_t site,
                   Language language);

/// Up to `k` distinct, safe alternatives to `solution`, drawn in order from
/// the confusion row, same-sound letters, same-shape letters, and finally a
/// seeded uniform pick over the alphabet. Throws Error(InvalidRequest) for k == 0
/// and Error(InsufficientDistractors) when fewer than k safe candidates exist.
std::vector<std::string> select_distractors(const std::string& solution, const PatternBank& bank,
                                            Language language, std::size_t k,
                                            const std::function<bool(const std::string&)>& is_safe,
                                            std::uint64_t seed);

/// Exercises wanted per type and level.
struct Quota {
  std::map<ExerciseType, std::array<std::size_t, kLevelCount>> counts;

  /// `per_level` exercises at every level, split over the six types as evenly
  /// as possible (earlier types take the remainder).
  static Quota per_level(std::size_t per_level);
  /// `per_type` exercises of every type, spread over the levels (easier levels
  /// take the remainder).
  static Quota per_type(std::size_t per_type);
  std::size_t total() const;
};

struct GenerationOptions {
  std::uint64_t seed = 1;
  Dialect dialect = Dialect::castilian;
  DifficultyWeights weights;
  double corpus_share = 0.4;  // cap on exercises taken directly from corpus pairs
  std::size_t min_support = 1;
  bool allow_shortfall = false;
};

struct Shortfall {
  ExerciseType type;
  DifficultyLevel level;
  std::size_t wanted = 0;
  std::size_t produced = 0;
};

struct ExerciseBank {
  static constexpr int kVersion = 1;

  Language language = Language::es;
  std::uint64_t seed = 0;
  std::string pattern_fingerprint;
  std::vector<Exercise> exercises;  // sorted by id
  std::map<ExerciseType, LevelCuts> cuts;
  std::vector<Shortfall> shortfall;
};

/// Throws Error(QuotaUnreachable) listing the shortfall unless
/// options.allow_shortfall is set, in which case the shortfall is reported in
/// the result.
ExerciseBank generate_bank(const Lexicon& lexicon, const PatternBank& patterns, const Quota& quota,
                           const GenerationOptions& options = {});

/// Re-runs the exercise invariants: round trip, distinct choices, distractor
/// safety against the lexicon, and the closed loop through classify_pair.
/// Returns a description of each violation.
std::vector<std::string> validate(const Exercise& exercise, const Lexicon& lexicon);

std::string to_json(const ExerciseBank& bank);
ExerciseBank exercise_bank_from_json(std::string_view text);
void save(const ExerciseBank& bank, const std::filesystem::path& path);
ExerciseBank load_exercise_bank(const std::filesystem::path& path);

/// JSON object describing the exercise without target or solution.
std::string public_view_json(const Exercise& exercise);

}  // namespace errata

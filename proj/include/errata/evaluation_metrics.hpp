#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "errata/text_model.hpp"

namespace errata {

struct DictationScore {
  std::size_t total_words = 0;
  std::size_t words_with_errors = 0;
  std::size_t total_errors = 0;
  double rate_words_with_errors = 0.0;
  double errors_per_word = 0.0;
  std::optional<double> errors_per_wrong_word;  // undefined without wrong words
  std::size_t added_words = 0;                  // transcript words with no reference word
  std::size_t omitted_words = 0;
};

struct ReadingScore {
  std::size_t total_words = 0;
  std::size_t total_errors = 0;
  double errors_per_word = 0.0;
  std::size_t added_words = 0;
  std::size_t omitted_words = 0;
};

struct TestDelta {
  double pre = 0.0;
  double post = 0.0;
  double change = 0.0;
};

/// How one stretch of the transcript lines up with the reference.
struct ScoredSegment {
  std::size_t ref_begin = 0;
  std::size_t ref_count = 0;  // 0: an added word
  std::size_t hyp_begin = 0;
  std::size_t hyp_count = 0;  // 0: an omitted word
  std::size_t errors = 0;
};

/// Word-level alignment used by both scores: 1:1, boundary merges up to three
/// words, omitted and added words. The objective charges a skipped word its
/// letter count so that a misspelling is never explained away as an omission
/// plus an addition; each skipped word still counts as one error.
std::vector<ScoredSegment> align_for_scoring(const std::vector<std::string>& reference,
                                             const std::vector<std::string>& transcript, Language language);

/// Throws Error(EmptyReference) when the reference has no words.
DictationScore score_writing(const std::vector<std::string>& reference, const std::vector<std::string>& transcript,
                             Language language = Language::es);
ReadingScore score_reading(const std::vector<std::string>& reference, const std::vector<std::string>& spoken,
                           Language language = Language::es);

/// Line-aligned versions: counts are summed over lines before the rates are taken.
DictationScore score_writing(const std::vector<std::vector<std::string>>& reference,
                             const std::vector<std::vector<std::string>>& transcript,
                             Language language = Language::es);
ReadingScore score_reading(const std::vector<std::vector<std::string>>& reference,
                           const std::vector<std::vector<std::string>>& spoken, Language language = Language::es);

TestDelta delta(double pre, double post) noexcept;

/// One whitespace-separated token list per line.
std::vector<std::vector<std::string>> read_token_lines(std::istream& in);
std::vector<std::vector<std::string>> load_token_lines(const std::filesystem::path& path);

}  // namespace errata

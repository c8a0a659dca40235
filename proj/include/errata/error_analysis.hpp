#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errata/text_model.hpp"

namespace errata {

/// One step of an edit script that turns the written form into the correct one.
///
/// `position` indexes the correct form: it is the number of correct letters
/// produced before the step runs. Insert adds `expected` (a letter the writer
/// left out), Delete drops `written` (a letter the writer added), Substitute
/// replaces one letter, Transpose swaps the two letters at position and
/// position + 1.
enum class EditKind { Insert, Delete, Substitute, Transpose };

struct EditOp {
  EditKind kind;
  std::size_t position = 0;
  std::string expected;
  std::string written;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// Error categories, named from the writer's point of view.
enum class ErrorType { Insertion, Omission, Substitution, Transposition, Boundary, Morphology };

inline constexpr ErrorType kAllErrorTypes[] = {ErrorType::Insertion,    ErrorType::Omission,
                                               ErrorType::Substitution, ErrorType::Transposition,
                                               ErrorType::Boundary,     ErrorType::Morphology};

std::string_view to_string(EditKind kind) noexcept;
std::string_view to_string(ErrorType type) noexcept;
ErrorType parse_error_type(std::string_view name);

/// A run of written tokens aligned with a run of correct tokens. A segment
/// spanning more than one token on either side is a word-boundary error.
struct AlignedSegment {
  std::size_t wrong_begin = 0;
  std::size_t wrong_count = 0;
  std::size_t correct_begin = 0;
  std::size_t correct_count = 0;
  std::u32string wrong;    // tokens concatenated without spaces
  std::u32string correct;  // tokens concatenated without spaces

  bool is_boundary() const noexcept { return wrong_count != correct_count; }
};

struct ErrorInstance {
  ErrorType type;
  std::size_t position = 0;     // index inside the correct token
  std::string expected;
  std::string written;
  std::size_t token_index = 0;  // correct token the error belongs to
  std::size_t segment = 0;      // index into ErrorAnnotation::segments
  std::size_t offset = 0;       // index inside the segment's concatenated correct text

  friend bool operator==(const ErrorInstance&, const ErrorInstance&) = default;
};

struct ErrorAnnotation {
  std::string wrong;    // normalized tokens joined by single spaces
  std::string correct;
  Language language = Language::es;
  std::vector<AlignedSegment> segments;
  std::vector<ErrorInstance> instances;
  std::size_t error_count = 0;
};

/// Restricted Damerau-Levenshtein (optimal string alignment) distance.
std::size_t damerau_distance(std::u32string_view a, std::u32string_view b);
std::size_t damerau_distance(std::string_view a, std::string_view b);

/// Minimal edit script from `wrong` to `correct`, in ascending position order.
std::vector<EditOp> align(std::u32string_view wrong, std::u32string_view correct);
std::vector<EditOp> align(std::string_view wrong, std::string_view correct);

/// Replays an edit script produced by align() on the written form.
std::u32string apply_edits(std::u32string_view wrong, const std::vector<EditOp>& ops);

/// Greedy boundary-aware token alignment: at each step take the 1:1, 1:k or
/// k:1 (k <= 3) grouping with the smallest character distance that still
/// leaves the remaining tokens coverable; ties go to the earlier candidate.
/// Throws Error(UnalignableTokens) when no grouping covers the tokens.
std::vector<AlignedSegment> align_tokens(const std::vector<std::u32string>& wrong,
                                         const std::vector<std::u32string>& correct);

/// Classifies every difference between a written text and its correction.
ErrorAnnotation classify_pair(std::string_view wrong, std::string_view correct, Language language);

std::size_t count_errors(const ErrorAnnotation& annotation);

/// Shortest shared stem for a morphology error between words whose shorter
/// side has `shorter` letters: max(3, floor(0.6 * shorter)).
std::size_t morphology_stem_threshold(std::size_t shorter) noexcept;

/// Normalized letters of each whitespace token; tokens without letters are dropped.
std::vector<std::u32string> normalized_tokens(std::string_view text, Language language);

}  // namespace errata

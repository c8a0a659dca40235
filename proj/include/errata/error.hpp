#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace errata {

enum class Errc {
  InvalidUtf8,
  EmptyAfterNormalization,
  LetterOutsideAlphabet,
  UnsupportedLanguage,
  DataFormat,
  UnalignableTokens,
  InapplicablePattern,
  InsufficientDistractors,
  WordNotInLexicon,
  QuotaUnreachable,
  EmptyReference,
  DegenerateSample,
  SampleTooSmall,
  DegenerateDifferences,
  AllZeroDifferences,
  BankExhausted,
  UnknownPlayer,
  UnknownSession,
  UnknownExercise,
  DuplicateAnswer,
  CorruptLog,
  InvalidRequest,
};

std::string_view errc_name(Errc code) noexcept;

// Every recoverable failure in the library is reported as an Error carrying a
// machine-readable code; the HTTP layer forwards errc_name() verbatim.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace errata

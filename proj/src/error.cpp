#include "errata/error.hpp"

namespace errata {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidUtf8: return "InvalidUtf8";
    case Errc::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case Errc::LetterOutsideAlphabet: return "LetterOutsideAlphabet";
    case Errc::UnsupportedLanguage: return "UnsupportedLanguage";
    case Errc::DataFormat: return "DataFormat";
    case Errc::UnalignableTokens: return "UnalignableTokens";
    case Errc::InapplicablePattern: return "InapplicablePattern";
    case Errc::InsufficientDistractors: return "InsufficientDistractors";
    case Errc::WordNotInLexicon: return "WordNotInLexicon";
    case Errc::QuotaUnreachable: return "QuotaUnreachable";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::SampleTooSmall: return "SampleTooSmall";
    case Errc::DegenerateDifferences: return "DegenerateDifferences";
    case Errc::AllZeroDifferences: return "AllZeroDifferences";
    case Errc::BankExhausted: return "BankExhausted";
    case Errc::UnknownPlayer: return "UnknownPlayer";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::UnknownExercise: return "UnknownExercise";
    case Errc::DuplicateAnswer: return "DuplicateAnswer";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::InvalidRequest: return "InvalidRequest";
  }
  return "Unknown";
}

}  // namespace errata

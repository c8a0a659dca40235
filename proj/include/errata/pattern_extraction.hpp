#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "errata/error_analysis.hpp"
#include "errata/text_model.hpp"

namespace errata {

/// Context marker for a word edge.
inline constexpr std::string_view kBoundaryMarker = "#";
/// Context that matches anything.
inline constexpr std::string_view kAnyContext = "*";

struct CorpusPair {
  std::string wrong;
  std::string correct;

  friend bool operator==(const CorpusPair&, const CorpusPair&) = default;
  friend auto operator<=>(const CorpusPair&, const CorpusPair&) = default;
};

/// UTF-8 TSV `wrong<TAB>correct`; `#` comments and blank lines skipped.
std::vector<CorpusPair> read_corpus(std::istream& in);
std::vector<CorpusPair> load_corpus(const std::filesystem::path& path);
std::vector<ErrorAnnotation> annotate(const std::vector<CorpusPair>& pairs, Language language);

/// A recurring error: the writer produced `written` where `focus` was expected,
/// between the `left` and `right` clusters.
///
/// Letter errors use grapheme clusters (a transposition may span two). Boundary
/// patterns keep the correct words (space separated) as focus and the written
/// words as written, with edge contexts. Morphology patterns keep the expected
/// and written affix.
struct ErrorPattern {
  ErrorType type = ErrorType::Substitution;
  std::string focus;
  std::string written;
  std::string left{kBoundaryMarker};
  std::string right{kBoundaryMarker};
  std::size_t support = 1;
  std::vector<CorpusPair> examples;  // first few corpus pairs that showed it

  auto key() const { return std::tie(type, focus, written, left, right); }
};

struct Confusion {
  std::string written;
  std::size_t count = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Expected cluster -> written clusters by descending count, ties lexicographic.
using ConfusionMatrix = std::map<std::string, std::vector<Confusion>>;

struct PatternBank {
  static constexpr int kVersion = 1;

  Language language = Language::es;
  std::vector<ErrorPattern> patterns;  // sorted by key
  ConfusionMatrix confusions;
  std::string fingerprint;  // SHA-256 of the canonical corpus text
};

inline constexpr std::size_t kMaxExamplesPerPattern = 16;

/// Throws Error(InvalidRequest) when annotations mix languages.
PatternBank extract_patterns(const std::vector<ErrorAnnotation>& annotations,
                             const GraphemeClusterInventory& inventory);

/// The confusion row for `cluster`, never containing `cluster` itself.
std::vector<std::string> confusion_set(const PatternBank& bank, std::string_view cluster);

/// Cluster indices of `word` where the pattern's focus starts with compatible
/// contexts. Morphology patterns match a word ending (or beginning) in the
/// expected affix on a cluster boundary. Boundary patterns never match a single word.
std::vector<std::size_t> match_sites(const ErrorPattern& pattern, const WordForm& word,
                                     const GraphemeClusterInventory& inventory);
/// Same, on a word already split into clusters.
std::vector<std::size_t> match_sites(const ErrorPattern& pattern, const std::vector<std::u32string>& clusters);

/// The word with the pattern's focus at cluster `site` replaced by what the
/// writers produced. Throws Error(InapplicablePattern) unless `site` is one of
/// match_sites(pattern, word, inventory).
std::u32string apply_pattern(const ErrorPattern& pattern, const WordForm& word, std::size_t site,
                             const GraphemeClusterInventory& inventory);

std::string to_json(const PatternBank& bank);
PatternBank pattern_bank_from_json(std::string_view text);
void save(const PatternBank& bank, const std::filesystem::path& path);
PatternBank load_pattern_bank(const std::filesystem::path& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace errata

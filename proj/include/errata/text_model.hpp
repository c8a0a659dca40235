#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace errata {

enum class Language { es, en };
enum class Dialect { castilian, seseo };

std::string_view to_string(Language language) noexcept;
std::string_view to_string(Dialect dialect) noexcept;
Language parse_language(std::string_view tag);
Dialect parse_dialect(std::string_view tag);

bool in_alphabet(char32_t letter, Language language) noexcept;

/// A normalized single word: NFC, lowercase, letters of one language only.
class WordForm {
 public:
  /// Validates that `letters` is non-empty and drawn from the language's
  /// alphabet; throws Error(EmptyAfterNormalization | LetterOutsideAlphabet).
  WordForm(std::u32string letters, Language language);

  const std::string& text() const noexcept { return text_; }
  const std::u32string& letters() const noexcept { return letters_; }
  Language language() const noexcept { return language_; }
  std::size_t size() const noexcept { return letters_.size(); }

  friend bool operator==(const WordForm& a, const WordForm& b) noexcept {
    return a.language_ == b.language_ && a.letters_ == b.letters_;
  }
  friend std::strong_ordering operator<=>(const WordForm& a, const WordForm& b) noexcept {
    if (auto c = a.language_ <=> b.language_; c != 0) return c;
    return a.letters_ <=> b.letters_;
  }

 private:
  std::u32string letters_;
  std::string text_;
  Language language_;
};

/// Lowercases, composes and strips everything that is not a letter.
WordForm normalize(std::string_view raw, Language language);

/// Whitespace tokenization; empty tokens are dropped.
std::vector<std::string> split_whitespace(std::string_view text);

/// Parsed form of the shipped language data files.
///
/// Grammar: `#` starts a comment line, `@key value` lines are directives
/// (`@version` and `@language` are required), every other non-blank line is
/// an entry whose interpretation belongs to the file type.
struct DataFile {
  int version = 0;
  Language language = Language::es;
  std::vector<std::pair<std::size_t, std::string>> entries;  // (line number, text)
};

DataFile parse_data_file(std::string_view content, std::string_view name);

/// Raw text of a data file compiled into the library, e.g. "es/g2p.txt".
std::string_view builtin_resource(std::string_view name);

class GraphemeClusterInventory {
 public:
  GraphemeClusterInventory(Language language, std::vector<std::string> clusters);

  static GraphemeClusterInventory parse(std::string_view content);
  static const GraphemeClusterInventory& builtin(Language language);

  Language language() const noexcept { return language_; }
  /// Multi-letter clusters, longest first.
  const std::vector<std::u32string>& clusters() const noexcept { return clusters_; }

  std::vector<std::u32string> segment(std::u32string_view letters) const;

 private:
  Language language_;
  std::vector<std::u32string> clusters_;
};

std::vector<std::string> segment_graphemes(const WordForm& word,
                                           const GraphemeClusterInventory& inventory);

struct PhonemeString {
  std::vector<std::string> phonemes;
  Dialect dialect = Dialect::castilian;

  std::size_t size() const noexcept { return phonemes.size(); }
  /// Slash-delimited rendering, e.g. "/keso/".
  std::string str() const;

  friend bool operator==(const PhonemeString&, const PhonemeString&) = default;
};

/// Ordered Spanish grapheme-to-phoneme rule table (see docs/g2p.md).
class G2PRules {
 public:
  struct Rule {
    std::u32string pattern;
    std::vector<std::string> output;  // empty when the pattern is silent
    std::u32string followed_by;       // empty: no constraint
    bool word_initial = false;
    bool word_final = false;
    std::optional<Dialect> dialect;
    std::size_t line = 0;
  };

  static G2PRules parse(std::string_view content);
  static const G2PRules& builtin();

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  /// Every phoneme symbol any rule can emit.
  std::vector<std::string> inventory() const;

  std::vector<std::string> transcribe(std::u32string_view letters, Dialect dialect) const;

 private:
  std::vector<Rule> rules_;
};

/// Throws Error(UnsupportedLanguage) for English.
PhonemeString to_phonemes(const WordForm& word, Dialect dialect = Dialect::castilian);

struct LexiconEntry {
  WordForm form;
  std::uint64_t frequency = 0;
  std::size_t rank = 0;  // 1 = most frequent
};

/// Frequency lexicon. Entries are ranked by descending frequency, ties by
/// code-point order of the form; duplicate forms after normalization are summed.
class Lexicon {
 public:
  Lexicon(Language language, const std::vector<std::pair<std::string, std::uint64_t>>& counts);

  /// UTF-8 TSV `form<TAB>frequency`; `#` comments and blank lines skipped.
  static Lexicon from_tsv(std::istream& in, Language language);
  static Lexicon load(const std::filesystem::path& path, Language language);

  Language language() const noexcept { return language_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }

  const LexiconEntry* find(std::string_view text) const;
  const LexiconEntry* find(const WordForm& word) const { return find(word.text()); }
  bool contains(std::string_view text) const { return find(text) != nullptr; }

  /// Entry indices (rank order) of all words with `letters` letters.
  const std::vector<std::size_t>& of_length(std::size_t letters) const;

 private:
  Language language_;
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::size_t, std::vector<std::size_t>> by_length_;
};

std::size_t hamming_distance(std::u32string_view a, std::u32string_view b);

/// Same-length lexicon words at letter Hamming distance one, in rank order.
std::vector<WordForm> orthographic_neighbors(const WordForm& word, const Lexicon& lexicon);

/// Lexicon words whose transcription has the same length and differs in
/// exactly one phoneme, in rank order. Spanish only.
std::vector<WordForm> phonetic_neighbors(const WordForm& word, const Lexicon& lexicon,
                                         Dialect dialect = Dialect::castilian);

class AffixInventory {
 public:
  AffixInventory(Language language, std::vector<std::string> suffixes,
                 std::vector<std::string> prefixes);

  static AffixInventory parse(std::string_view content);
  static const AffixInventory& builtin(Language language);

  Language language() const noexcept { return language_; }
  /// Longest first.
  const std::vector<std::u32string>& suffixes() const noexcept { return suffixes_; }
  const std::vector<std::u32string>& prefixes() const noexcept { return prefixes_; }
  bool is_suffix(std::u32string_view text) const;
  bool is_prefix(std::u32string_view text) const;

  /// Number of suffixes removed by repeatedly stripping the longest matching
  /// suffix while at least three letters of stem remain.
  std::size_t morph_complexity(std::u32string_view letters) const;

 private:
  Language language_;
  std::vector<std::u32string> suffixes_;
  std::vector<std::u32string> prefixes_;
};

/// Groups of letters that sound alike or look alike.
class PhoneticClasses {
 public:
  struct Group {
    bool by_sound = true;
    std::vector<std::string> members;
  };

  PhoneticClasses(Language language, std::vector<Group> groups);
  static PhoneticClasses parse(std::string_view content);
  static const PhoneticClasses& builtin(Language language);

  Language language() const noexcept { return language_; }
  const std::vector<Group>& groups() const noexcept { return groups_; }

  /// Members of every sound (or shape) group containing `cluster`, in file
  /// order, without duplicates and without `cluster` itself.
  std::vector<std::string> alternatives(std::string_view cluster, bool by_sound) const;

 private:
  Language language_;
  std::vector<Group> groups_;
};

}  // namespace errata

#include "errata/text_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>

#include "errata/error.hpp"
#include "errata/unicode.hpp"

namespace errata {

std::string_view to_string(Language language) noexcept {
  return language == Language::es ? "es" : "en";
}

std::string_view to_string(Dialect dialect) noexcept {
  return dialect == Dialect::castilian ? "castilian" : "seseo";
}

Language parse_language(std::string_view tag) {
  if (tag == "es") return Language::es;
  if (tag == "en") return Language::en;
  throw Error(Errc::UnsupportedLanguage, "unsupported language tag '" + std::string(tag) + "'");
}

Dialect parse_dialect(std::string_view tag) {
  if (tag == "castilian") return Dialect::castilian;
  if (tag == "seseo") return Dialect::seseo;
  throw Error(Errc::InvalidRequest, "unknown dialect '" + std::string(tag) + "'");
}

bool in_alphabet(char32_t letter, Language language) noexcept {
  if (letter >= U'a' && letter <= U'z') return true;
  if (language == Language::en) return false;
  switch (letter) {
    case U'á': case U'é': case U'í': case U'ó': case U'ú': case U'ü': case U'ñ':
      return true;
    default:
      return false;
  }
}

WordForm::WordForm(std::u32string letters, Language language)
    : letters_(std::move(letters)), language_(language) {
  if (letters_.empty()) {
    throw Error(Errc::EmptyAfterNormalization, "word has no letters");
  }
  for (char32_t c : letters_) {
    if (!in_alphabet(c, language_)) {
      throw Error(Errc::LetterOutsideAlphabet,
                  "letter '" + unicode::encode(c) + "' is not in the " +
                      std::string(to_string(language_)) + " alphabet");
    }
  }
  text_ = unicode::encode(letters_);
}

WordForm normalize(std::string_view raw, Language language) {
  std::u32string letters;
  for (char32_t c : unicode::compose(unicode::decode(raw))) {
    if (unicode::is_letter(c)) letters.push_back(unicode::to_lower(c));
  }
  if (letters.empty()) {
    throw Error(Errc::EmptyAfterNormalization,
                "'" + std::string(raw) + "' contains no letters");
  }
  return WordForm(std::move(letters), language);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// ---------------------------------------------------------------------------
// Data files

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void data_error(std::string_view name, std::size_t line, const std::string& what) {
  throw Error(Errc::DataFormat, std::string(name) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

DataFile parse_data_file(std::string_view content, std::string_view name) {
  DataFile file;
  bool have_language = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto end = std::min(content.find('\n', pos), content.size());
    const auto line = trim(content.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      const auto space = line.find(' ');
      const auto key = line.substr(1, space == std::string_view::npos ? line.size() : space - 1);
      const auto value = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
      if (key == "version") {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size() || v < 1) {
          data_error(name, line_no, "bad version '" + std::string(value) + "'");
        }
        file.version = v;
      } else if (key == "language") {
        try {
          file.language = parse_language(value);
        } catch (const Error&) {
          data_error(name, line_no, "bad language '" + std::string(value) + "'");
        }
        have_language = true;
      } else {
        data_error(name, line_no, "unknown directive '@" + std::string(key) + "'");
      }
      continue;
    }
    file.entries.emplace_back(line_no, std::string(line));
  }
  if (file.version == 0) data_error(name, line_no, "missing @version");
  if (file.version != 1) data_error(name, line_no, "unsupported version " + std::to_string(file.version));
  if (!have_language) data_error(name, line_no, "missing @language");
  return file;
}

// ---------------------------------------------------------------------------
// Grapheme clusters

GraphemeClusterInventory::GraphemeClusterInventory(Language language, std::vector<std::string> clusters)
    : language_(language) {
  for (const auto& c : clusters) {
    auto letters = unicode::decode(c);
    if (letters.size() < 2) {
      throw Error(Errc::DataFormat, "grapheme cluster '" + c + "' is shorter than two letters");
    }
    for (char32_t l : letters) {
      if (!in_alphabet(l, language)) {
        throw Error(Errc::DataFormat, "grapheme cluster '" + c + "' has letters outside the alphabet");
      }
    }
    if (std::find(clusters_.begin(), clusters_.end(), letters) == clusters_.end()) {
      clusters_.push_back(std::move(letters));
    }
  }
  std::stable_sort(clusters_.begin(), clusters_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

GraphemeClusterInventory GraphemeClusterInventory::parse(std::string_view content) {
  auto file = parse_data_file(content, "graphemes");
  std::vector<std::string> clusters;
  for (auto& [line, text] : file.entries) clusters.push_back(std::move(text));
  return GraphemeClusterInventory(file.language, std::move(clusters));
}

const GraphemeClusterInventory& GraphemeClusterInventory::builtin(Language language) {
  static const GraphemeClusterInventory es = parse(builtin_resource("es/graphemes.txt"));
  static const GraphemeClusterInventory en = parse(builtin_resource("en/graphemes.txt"));
  return language == Language::es ? es : en;
}

std::vector<std::u32string> GraphemeClusterInventory::segment(std::u32string_view letters) const {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < letters.size()) {
    std::size_t take = 1;
    for (const auto& cluster : clusters_) {
      if (letters.substr(i, cluster.size()) == cluster) {
        take = cluster.size();
        break;
      }
    }
    out.emplace_back(letters.substr(i, take));
    i += take;
  }
  return out;
}

std::vector<std::string> segment_graphemes(const WordForm& word,
                                           const GraphemeClusterInventory& inventory) {
  std::vector<std::string> out;
  for (const auto& cluster : inventory.segment(word.letters())) out.push_back(unicode::encode(cluster));
  return out;
}

// ---------------------------------------------------------------------------
// Grapheme-to-phoneme

std::string PhonemeString::str() const {
  std::string out = "/";
  for (const auto& p : phonemes) out += p;
  out += "/";
  return out;
}

G2PRules G2PRules::parse(std::string_view content) {
  auto file = parse_data_file(content, "g2p");
  if (file.language != Language::es) {
    throw Error(Errc::UnsupportedLanguage, "g2p rules are only defined for Spanish");
  }
  G2PRules table;
  for (const auto& [line, text] : file.entries) {
    std::string_view rest = text;
    const auto arrow = rest.find("->");
    if (arrow == std::string_view::npos) data_error("g2p", line, "expected 'pattern -> output'");
    Rule rule;
    rule.line = line;
    rule.pattern = unicode::decode(trim(rest.substr(0, arrow)));
    if (rule.pattern.empty()) data_error("g2p", line, "empty pattern");
    rest = trim(rest.substr(arrow + 2));

    std::string_view context;
    if (const auto open = rest.find('['); open != std::string_view::npos) {
      const auto close = rest.find(']', open);
      if (close == std::string_view::npos) data_error("g2p", line, "unterminated context");
      context = rest.substr(open + 1, close - open - 1);
      rest = trim(rest.substr(0, open));
    }
    if (rest.empty()) data_error("g2p", line, "missing output");
    if (rest != "0") {
      std::size_t start = 0;
      while (start <= rest.size()) {
        const auto dot = std::min(rest.find('.', start), rest.size());
        auto symbol = rest.substr(start, dot - start);
        if (symbol.empty()) data_error("g2p", line, "empty phoneme symbol");
        rule.output.emplace_back(symbol);
        start = dot + 1;
      }
    }
    for (const auto& item : split_whitespace(context)) {
      if (item == "#_") {
        rule.word_initial = true;
      } else if (item == "_#") {
        rule.word_final = true;
      } else if (item.size() > 1 && item.front() == '_') {
        std::string_view letters = std::string_view(item).substr(1);
        std::size_t start = 0;
        while (start <= letters.size()) {
          const auto comma = std::min(letters.find(',', start), letters.size());
          const auto one = unicode::decode(letters.substr(start, comma - start));
          if (one.size() != 1) data_error("g2p", line, "context letters must be single letters");
          rule.followed_by.push_back(one.front());
          start = comma + 1;
        }
      } else if (item == "castilian" || item == "seseo") {
        rule.dialect = parse_dialect(item);
      } else {
        data_error("g2p", line, "unknown context item '" + item + "'");
      }
    }
    table.rules_.push_back(std::move(rule));
  }
  return table;
}

const G2PRules& G2PRules::builtin() {
  static const G2PRules rules = parse(builtin_resource("es/g2p.txt"));
  return rules;
}

std::vector<std::string> G2PRules::inventory() const {
  std::set<std::string> symbols;
  for (const auto& rule : rules_) symbols.insert(rule.output.begin(), rule.output.end());
  return {symbols.begin(), symbols.end()};
}

std::vector<std::string> G2PRules::transcribe(std::u32string_view letters, Dialect dialect) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < letters.size()) {
    const Rule* chosen = nullptr;
    for (const auto& rule : rules_) {
      if (letters.substr(i, rule.pattern.size()) != rule.pattern) continue;
      const auto end = i + rule.pattern.size();
      if (rule.dialect && *rule.dialect != dialect) continue;
      if (rule.word_initial && i != 0) continue;
      if (rule.word_final && end != letters.size()) continue;
      if (!rule.followed_by.empty() &&
          (end >= letters.size() || rule.followed_by.find(letters[end]) == std::u32string::npos)) {
        continue;
      }
      chosen = &rule;
      break;
    }
    if (chosen == nullptr) {
      throw Error(Errc::DataFormat, "no g2p rule covers '" + unicode::encode(letters[i]) + "'");
    }
    out.insert(out.end(), chosen->output.begin(), chosen->output.end());
    i += chosen->pattern.size();
  }
  return out;
}

PhonemeString to_phonemes(const WordForm& word, Dialect dialect) {
  if (word.language() != Language::es) {
    throw Error(Errc::UnsupportedLanguage, "phonemization is only available for Spanish");
  }
  return PhonemeString{G2PRules::builtin().transcribe(word.letters(), dialect), dialect};
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon::Lexicon(Language language, const std::vector<std::pair<std::string, std::uint64_t>>& counts)
    : language_(language) {
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& [raw, frequency] : counts) {
    WordForm form = normalize(raw, language);
    if (auto it = seen.find(form.text()); it != seen.end()) {
      entries_[it->second].frequency += frequency;
      continue;
    }
    seen.emplace(form.text(), entries_.size());
    entries_.push_back(LexiconEntry{std::move(form), frequency, 0});
  }
  std::sort(entries_.begin(), entries_.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.form.letters() < b.form.letters();
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i].rank = i + 1;
    index_.emplace(entries_[i].form.text(), i);
    by_length_[entries_[i].form.size()].push_back(i);
  }
}

Lexicon Lexicon::from_tsv(std::istream& in, Language language) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos) data_error("lexicon", line_no, "expected form<TAB>frequency");
    const auto form = trim(view.substr(0, tab));
    const auto freq_text = trim(view.substr(tab + 1));
    std::uint64_t frequency = 0;
    const auto [ptr, ec] =
        std::from_chars(freq_text.data(), freq_text.data() + freq_text.size(), frequency);
    if (ec != std::errc{} || ptr != freq_text.data() + freq_text.size()) {
      data_error("lexicon", line_no, "bad frequency '" + std::string(freq_text) + "'");
    }
    try {
      (void)normalize(form, language);
    } catch (const Error& e) {
      data_error("lexicon", line_no, e.what());
    }
    counts.emplace_back(std::string(form), frequency);
  }
  return Lexicon(language, counts);
}

Lexicon Lexicon::load(const std::filesystem::path& path, Language language) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::DataFormat, "cannot open lexicon " + path.string());
  return from_tsv(in, language);
}

const LexiconEntry* Lexicon::find(std::string_view text) const {
  const auto it = index_.find(std::string(text));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const std::vector<std::size_t>& Lexicon::of_length(std::size_t letters) const {
  static const std::vector<std::size_t> none;
  const auto it = by_length_.find(letters);
  return it == by_length_.end() ? none : it->second;
}

std::size_t hamming_distance(std::u32string_view a, std::u32string_view b) {
  std::size_t d = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d;
}

std::vector<WordForm> orthographic_neighbors(const WordForm& word, const Lexicon& lexicon) {
  std::vector<WordForm> out;
  for (std::size_t idx : lexicon.of_length(word.size())) {
    const auto& candidate = lexicon.entries()[idx].form;
    if (hamming_distance(candidate.letters(), word.letters()) == 1) out.push_back(candidate);
  }
  return out;
}

namespace {

bool one_phoneme_apart(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) return false;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size() && diff < 2; ++i) diff += a[i] != b[i];
  return diff == 1;
}

}  // namespace

std::vector<WordForm> phonetic_neighbors(const WordForm& word, const Lexicon& lexicon, Dialect dialect) {
  if (word.language() != Language::es || lexicon.language() != Language::es) {
    throw Error(Errc::UnsupportedLanguage, "phonetic neighbors are only available for Spanish");
  }
  const auto target = to_phonemes(word, dialect).phonemes;
  std::vector<WordForm> out;
  for (const auto& entry : lexicon.entries()) {
    if (one_phoneme_apart(target, to_phonemes(entry.form, dialect).phonemes)) out.push_back(entry.form);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Affixes and confusable letter groups

AffixInventory::AffixInventory(Language language, std::vector<std::string> suffixes,
                               std::vector<std::string> prefixes)
    : language_(language) {
  auto convert = [](std::vector<std::string>& in, std::vector<std::u32string>& out) {
    for (const auto& s : in) {
      auto letters = unicode::decode(s);
      if (letters.empty()) throw Error(Errc::DataFormat, "empty affix");
      if (std::find(out.begin(), out.end(), letters) == out.end()) out.push_back(std::move(letters));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  };
  convert(suffixes, suffixes_);
  convert(prefixes, prefixes_);
}

AffixInventory AffixInventory::parse(std::string_view content) {
  auto file = parse_data_file(content, "affixes");
  std::vector<std::string> suffixes;
  std::vector<std::string> prefixes;
  for (const auto& [line, text] : file.entries) {
    const auto fields = split_whitespace(text);
    if (fields.size() != 2) data_error("affixes", line, "expected 'suffix|prefix <text>'");
    if (fields[0] == "suffix") {
      suffixes.push_back(fields[1]);
    } else if (fields[0] == "prefix") {
      prefixes.push_back(fields[1]);
    } else {
      data_error("affixes", line, "unknown affix kind '" + fields[0] + "'");
    }
  }
  return AffixInventory(file.language, std::move(suffixes), std::move(prefixes));
}

const AffixInventory& AffixInventory::builtin(Language language) {
  static const AffixInventory es = parse(builtin_resource("es/affixes.txt"));
  static const AffixInventory en = parse(builtin_resource("en/affixes.txt"));
  return language == Language::es ? es : en;
}

bool AffixInventory::is_suffix(std::u32string_view text) const {
  return std::find(suffixes_.begin(), suffixes_.end(), text) != suffixes_.end();
}

bool AffixInventory::is_prefix(std::u32string_view text) const {
  return std::find(prefixes_.begin(), prefixes_.end(), text) != prefixes_.end();
}

std::size_t AffixInventory::morph_complexity(std::u32string_view letters) const {
  std::size_t stripped = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& suffix : suffixes_) {
      if (letters.size() >= suffix.size() + 3 &&
          letters.substr(letters.size() - suffix.size()) == suffix) {
        letters.remove_suffix(suffix.size());
        ++stripped;
        progress = true;
        break;
      }
    }
  }
  return stripped;
}

PhoneticClasses::PhoneticClasses(Language language, std::vector<Group> groups)
    : language_(language), groups_(std::move(groups)) {}

PhoneticClasses PhoneticClasses::parse(std::string_view content) {
  auto file = parse_data_file(content, "phonetic_classes");
  std::vector<Group> groups;
  for (const auto& [line, text] : file.entries) {
    auto fields = split_whitespace(text);
    if (fields.size() < 3) data_error("phonetic_classes", line, "a group needs a kind and two members");
    Group g;
    if (fields[0] == "sound") {
      g.by_sound = true;
    } else if (fields[0] == "shape") {
      g.by_sound = false;
    } else {
      data_error("phonetic_classes", line, "unknown group kind '" + fields[0] + "'");
    }
    g.members.assign(fields.begin() + 1, fields.end());
    groups.push_back(std::move(g));
  }
  return PhoneticClasses(file.language, std::move(groups));
}

const PhoneticClasses& PhoneticClasses::builtin(Language language) {
  static const PhoneticClasses es = parse(builtin_resource("es/phonetic_classes.txt"));
  static const PhoneticClasses en = parse(builtin_resource("en/phonetic_classes.txt"));
  return language == Language::es ? es : en;
}

std::vector<std::string> PhoneticClasses::alternatives(std::string_view cluster, bool by_sound) const {
  std::vector<std::string> out;
  for (const auto& group : groups_) {
    if (group.by_sound != by_sound) continue;
    if (std::find(group.members.begin(), group.members.end(), cluster) == group.members.end()) continue;
    for (const auto& m : group.members) {
      if (m != cluster && std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
  }
  return out;
}

}  // namespace errata

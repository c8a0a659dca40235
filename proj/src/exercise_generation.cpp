#include "errata/exercise_generation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "errata/error.hpp"
#include "errata/unicode.hpp"

namespace errata {

std::string_view to_string(ExerciseType type) noexcept {
  switch (type) {
    case ExerciseType::AddLetter: return "add_letter";
    case ExerciseType::RemoveLetter: return "remove_letter";
    case ExerciseType::ChangeLetter: return "change_letter";
    case ExerciseType::ReorderLetters: return "reorder_letters";
    case ExerciseType::SplitWords: return "split_words";
    case ExerciseType::WordEnding: return "word_ending";
  }
  return "?";
}

std::string_view to_string(DifficultyLevel level) noexcept {
  switch (level) {
    case DifficultyLevel::Initial: return "initial";
    case DifficultyLevel::Easy: return "easy";
    case DifficultyLevel::Medium: return "medium";
    case DifficultyLevel::Hard: return "hard";
    case DifficultyLevel::Expert: return "expert";
  }
  return "?";
}

ExerciseType parse_exercise_type(std::string_view name) {
  for (auto t : kAllExerciseTypes) {
    if (to_string(t) == name) return t;
  }
  throw Error(Errc::DataFormat, "unknown exercise type '" + std::string(name) + "'");
}

DifficultyLevel parse_level(std::string_view name) {
  for (auto l : kAllLevels) {
    if (to_string(l) == name) return l;
  }
  throw Error(Errc::DataFormat, "unknown difficulty level '" + std::string(name) + "'");
}

ErrorType trained_error(ExerciseType type) noexcept {
  switch (type) {
    case ExerciseType::AddLetter: return ErrorType::Omission;
    case ExerciseType::RemoveLetter: return ErrorType::Insertion;
    case ExerciseType::ChangeLetter: return ErrorType::Substitution;
    case ExerciseType::ReorderLetters: return ErrorType::Transposition;
    case ExerciseType::SplitWords: return ErrorType::Boundary;
    case ExerciseType::WordEnding: return ErrorType::Morphology;
  }
  return ErrorType::Substitution;
}

ExerciseType exercise_for(ErrorType type) noexcept {
  switch (type) {
    case ErrorType::Omission: return ExerciseType::AddLetter;
    case ErrorType::Insertion: return ExerciseType::RemoveLetter;
    case ErrorType::Substitution: return ExerciseType::ChangeLetter;
    case ErrorType::Transposition: return ExerciseType::ReorderLetters;
    case ErrorType::Boundary: return ExerciseType::SplitWords;
    case ErrorType::Morphology: return ExerciseType::WordEnding;
  }
  return ExerciseType::ChangeLetter;
}

// ---------------------------------------------------------------- difficulty

namespace {

// Counts, for every item, the other items at Hamming distance one, by
// bucketing on "item with one position masked". Items with an identical
// sequence share every bucket and are subtracted out.
template <typename Seq>
std::vector<std::size_t> one_substitution_counts(const std::vector<Seq>& items) {
  std::unordered_map<std::string, std::size_t> buckets;
  std::unordered_map<std::string, std::size_t> same;
  auto key = [](const Seq& s, std::size_t masked) {
    std::string k;
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (p == masked) {
        k += '\x1e';
      } else if constexpr (std::is_same_v<Seq, std::u32string>) {
        k += unicode::encode(s[p]);
      } else {
        k += s[p];
      }
      k += '\x1f';
    }
    return k;
  };
  for (const auto& s : items) {
    ++same[key(s, s.size())];
    for (std::size_t p = 0; p < s.size(); ++p) ++buckets[key(s, p)];
  }
  std::vector<std::size_t> out;
  out.reserve(items.size());
  for (const auto& s : items) {
    const auto dup = same[key(s, s.size())];
    std::size_t n = 0;
    for (std::size_t p = 0; p < s.size(); ++p) n += buckets[key(s, p)] - dup;
    out.push_back(n);
  }
  return out;
}

double normalized(double x, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

std::array<double, 5> components(const DifficultyProfile& p) {
  return {static_cast<double>(p.frequency_rank), static_cast<double>(p.length),
          static_cast<double>(p.ortho_neighbors), static_cast<double>(p.phon_neighbors),
          static_cast<double>(p.morph_complexity)};
}

}  // namespace

DifficultyModel::DifficultyModel(const Lexicon& lexicon, Dialect dialect, DifficultyWeights weights)
    : lexicon_(&lexicon), weights_(weights) {
  const auto& entries = lexicon.entries();
  const auto& affixes = AffixInventory::builtin(lexicon.language());
  std::vector<std::u32string> spellings;
  spellings.reserve(entries.size());
  for (const auto& e : entries) spellings.push_back(e.form.letters());
  const auto ortho = one_substitution_counts(spellings);

  std::vector<std::size_t> phon(entries.size(), 0);
  if (lexicon.language() == Language::es) {
    std::vector<std::vector<std::string>> sounds;
    sounds.reserve(entries.size());
    for (const auto& e : entries) sounds.push_back(to_phonemes(e.form, dialect).phonemes);
    phon = one_substitution_counts(sounds);
  }

  profiles_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    profiles_.push_back({entries[i].rank, entries[i].form.size(), ortho[i], phon[i],
                         affixes.morph_complexity(entries[i].form.letters()), 0.0});
  }
  min_.fill(0.0);
  max_.fill(0.0);
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    const auto c = components(profiles_[i]);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (i == 0 || c[k] < min_[k]) min_[k] = c[k];
      if (i == 0 || c[k] > max_[k]) max_[k] = c[k];
    }
  }
  for (auto& p : profiles_) p.composite = composite(p);
}

double DifficultyModel::composite(const DifficultyProfile& p) const {
  const auto c = components(p);
  const std::array<double, 5> w = {weights_.rank, weights_.length, weights_.ortho, weights_.phon,
                                   weights_.morph};
  double sum = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    sum += w[k] * normalized(c[k], min_[k], max_[k]);
    total += w[k];
  }
  return total > 0.0 ? sum / total : 0.0;
}

const DifficultyProfile& DifficultyModel::profile(const WordForm& word) const {
  const auto* entry = lexicon_->find(word);
  if (!entry) throw Error(Errc::WordNotInLexicon, "'" + word.text() + "' is not in the lexicon");
  return profiles_[entry->rank - 1];
}

DifficultyProfile DifficultyModel::phrase_profile(const WordForm& first, const WordForm& second) const {
  const auto* a = lexicon_->find(first);
  const auto* b = lexicon_->find(second);
  if (!a && !b) {
    throw Error(Errc::WordNotInLexicon, "'" + first.text() + " " + second.text() + "' has no lexicon word");
  }
  const LexiconEntry* rarer = !a ? b : !b ? a : (a->rank > b->rank ? a : b);
  auto p = profiles_[rarer->rank - 1];
  p.length = first.size() + second.size();
  p.composite = composite(p);
  return p;
}

DifficultyProfile difficulty(const WordForm& target, const Lexicon& lexicon, Dialect dialect) {
  return DifficultyModel(lexicon, dialect).profile(target);
}

LevelCuts quintile_cuts(std::vector<double> composites) {
  if (composites.empty()) throw Error(Errc::InvalidRequest, "no composites to cut");
  std::sort(composites.begin(), composites.end());
  LevelCuts cuts;
  for (std::size_t q = 1; q < kLevelCount; ++q) {
    const double h = (composites.size() - 1) * static_cast<double>(q) / kLevelCount;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, composites.size() - 1);
    cuts.upper[q - 1] = composites[lo] + (h - lo) * (composites[hi] - composites[lo]);
  }
  return cuts;
}

DifficultyLevel assign_level(const DifficultyProfile& profile, const LevelCuts& cuts) {
  for (std::size_t l = 0; l < cuts.upper.size(); ++l) {
    if (profile.composite <= cuts.upper[l]) return kAllLevels[l];
  }
  return DifficultyLevel::Expert;
}

// ----------------------------------------------------------------- responses

namespace {

std::u32string dec(std::string_view s) { return unicode::decode(s); }
std::string enc(std::u32string_view s) { return unicode::encode(s); }

bool uses_gap(ExerciseType t) {
  return t == ExerciseType::AddLetter || t == ExerciseType::ChangeLetter || t == ExerciseType::WordEnding;
}

std::u32string fill_gap(std::u32string_view stem, const Gap& gap, std::u32string_view text) {
  std::u32string out(stem.substr(0, gap.begin));
  out += text;
  out += stem.substr(gap.end);
  return out;
}

}  // namespace

std::optional<std::string> apply_response(const Exercise& ex, const Response& r) {
  const auto stem = dec(ex.stem);
  switch (ex.type) {
    case ExerciseType::AddLetter:
    case ExerciseType::ChangeLetter:
    case ExerciseType::WordEnding:
      if (!ex.gap || std::find(ex.choices.begin(), ex.choices.end(), r.text) == ex.choices.end()) {
        return std::nullopt;
      }
      return enc(fill_gap(stem, *ex.gap, dec(r.text)));
    case ExerciseType::RemoveLetter:
      if (!r.position || *r.position >= stem.size()) return std::nullopt;
      return enc(std::u32string(stem).erase(*r.position, 1));
    case ExerciseType::ReorderLetters: {
      std::u32string given;
      try {
        given = dec(r.text);
      } catch (const Error&) {
        return std::nullopt;
      }
      auto a = given;
      auto b = stem;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return std::nullopt;
      return enc(given);
    }
    case ExerciseType::SplitWords:
      if (!r.position || *r.position == 0 || *r.position >= stem.size()) return std::nullopt;
      return enc(stem.substr(0, *r.position)) + " " + enc(stem.substr(*r.position));
  }
  return std::nullopt;
}

bool is_correct(const Exercise& ex, const Response& r) {
  const auto out = apply_response(ex, r);
  return out && *out == ex.target;
}

// --------------------------------------------------------------- corruption

namespace {

struct Derived {
  std::optional<Gap> gap;
  Response solution;
};

std::vector<std::string> first_two_words(std::string_view phrase) {
  return split_whitespace(phrase);
}

bool is_run_on(const ErrorPattern& p) {
  return p.type == ErrorType::Boundary && first_two_words(p.focus).size() == 2 &&
         first_two_words(p.written).size() == 1;
}

// Gap and solution of an exercise whose stem and target are known, read off
// the classifier's annotation where it matters.
std::optional<Derived> derive(ExerciseType type, std::u32string_view target, std::u32string_view stem,
                              const ErrorAnnotation& ann) {
  Derived d;
  switch (type) {
    case ExerciseType::AddLetter:
    case ExerciseType::ChangeLetter: {
      std::size_t p = 0;
      while (p < target.size() && p < stem.size() && target[p] == stem[p]) ++p;
      std::size_t s = 0;
      while (s < target.size() - p && s < stem.size() - p &&
             target[target.size() - 1 - s] == stem[stem.size() - 1 - s]) {
        ++s;
      }
      const auto t_end = target.size() - s;
      const auto w_end = stem.size() - s;
      if (t_end == p) return std::nullopt;
      if (type == ExerciseType::AddLetter && w_end != p) return std::nullopt;
      if (type == ExerciseType::ChangeLetter && w_end == p) return std::nullopt;
      d.gap = Gap{p, w_end};
      d.solution.text = enc(target.substr(p, t_end - p));
      return d;
    }
    case ExerciseType::WordEnding: {
      if (ann.instances.size() != 1 || ann.instances[0].type != ErrorType::Morphology) return std::nullopt;
      const auto& m = ann.instances[0];
      const auto written = unicode::length(m.written);
      d.gap = m.offset > 0 ? Gap{m.offset, m.offset + written} : Gap{0, written};
      d.solution.text = m.expected;
      return d;
    }
    case ExerciseType::RemoveLetter: {
      const auto ops = align(stem, target);
      if (ops.size() != 1 || ops[0].kind != EditKind::Delete) return std::nullopt;
      d.solution.position = ops[0].position;
      return d;
    }
    case ExerciseType::ReorderLetters:
      d.solution.text = enc(target);
      return d;
    case ExerciseType::SplitWords:
      return std::nullopt;
  }
  return std::nullopt;
}

// The classifier must see the trained error in the stem/target pair, and
// nothing that belongs to another exercise type.
bool closed_loop(ExerciseType type, const ErrorAnnotation& ann, std::size_t swaps = 1) {
  const auto want = trained_error(type);
  if (ann.instances.empty()) return false;
  bool seen = false;
  for (const auto& i : ann.instances) {
    seen = seen || i.type == want;
    switch (type) {
      case ExerciseType::AddLetter:
      case ExerciseType::ReorderLetters:
        if (i.type != want) return false;
        break;
      case ExerciseType::ChangeLetter:
        if (i.type != ErrorType::Substitution && i.type != ErrorType::Omission &&
            i.type != ErrorType::Insertion) {
          return false;
        }
        break;
      default:
        break;
    }
  }
  if (!seen) return false;
  switch (type) {
    case ExerciseType::RemoveLetter:
    case ExerciseType::SplitWords:
    case ExerciseType::WordEnding:
      return ann.instances.size() == 1;
    case ExerciseType::ReorderLetters:
      return ann.instances.size() == swaps;
    default:
      return true;
  }
}

}  // namespace

Corruption corrupt(std::string_view target, const ErrorPattern& pattern, std::size_t site, Language language) {
  if (pattern.type == ErrorType::Boundary) {
    const auto words = split_whitespace(target);
    const auto focus = first_two_words(pattern.focus);
    if (!is_run_on(pattern) || words.size() != 2 || site != 0) {
      throw Error(Errc::InapplicablePattern, "run-on pattern needs a two-word target at site 0");
    }
    const auto first = normalize(words[0], language);
    const auto second = normalize(words[1], language);
    if (first != normalize(focus[0], language)) {
      throw Error(Errc::InapplicablePattern,
                  "run-on pattern '" + pattern.focus + "' does not start '" + std::string(target) + "'");
    }
    return {first.text() + second.text(), Response{"", first.size()}};
  }
  const auto word = normalize(target, language);
  const auto& inventory = GraphemeClusterInventory::builtin(language);
  // an add-a-letter stem leaves the whole focus out, whatever the writers put there
  auto applied = pattern;
  if (pattern.type == ErrorType::Omission) applied.written.clear();
  const auto stem = apply_pattern(applied, word, site, inventory);
  const auto type = exercise_for(pattern.type);
  const auto ann = classify_pair(enc(stem), word.text(), language);
  auto d = derive(type, word.letters(), stem, ann);
  if (!d) {
    throw Error(Errc::InapplicablePattern, "applying the pattern to '" + word.text() +
                                               "' does not give a " + std::string(to_string(type)) +
                                               " exercise");
  }
  return {enc(stem), d->solution};
}

// --------------------------------------------------------------- distractors

namespace {

std::vector<std::string> alphabet(Language language) {
  std::vector<std::string> out;
  for (char32_t c = U'a'; c <= U'z'; ++c) {
    if (in_alphabet(c, language)) out.push_back(unicode::encode(c));
  }
  if (in_alphabet(U'ñ', language)) out.push_back(unicode::encode(U'ñ'));
  return out;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::vector<std::string> select_distractors(const std::string& solution, const PatternBank& bank,
                                            Language language, std::size_t k,
                                            const std::function<bool(const std::string&)>& is_safe,
                                            std::uint64_t seed) {
  if (k == 0) throw Error(Errc::InvalidRequest, "at least one distractor must be requested");
  std::vector<std::string> out;
  auto offer = [&](const std::string& c) {
    if (out.size() >= k || c.empty() || c == solution) return;
    if (std::find(out.begin(), out.end(), c) != out.end()) return;
    if (is_safe && !is_safe(c)) return;
    out.push_back(c);
  };
  for (const auto& c : confusion_set(bank, solution)) offer(c);
  const auto& classes = PhoneticClasses::builtin(language);
  for (const auto& c : classes.alternatives(solution, true)) offer(c);
  for (const auto& c : classes.alternatives(solution, false)) offer(c);
  if (out.size() < k) {
    auto letters = alphabet(language);
    std::mt19937_64 rng(seed);
    shuffle(letters, rng);
    for (const auto& c : letters) offer(c);
  }
  if (out.size() < k) {
    throw Error(Errc::InsufficientDistractors, "only " + std::to_string(out.size()) + " of " +
                                                   std::to_string(k) + " safe distractors for '" +
                                                   solution + "'");
  }
  return out;
}

// ------------------------------------------------------------------- quotas

Quota Quota::per_level(std::size_t per_level) {
  Quota q;
  const std::size_t n = std::size(kAllExerciseTypes);
  for (std::size_t t = 0; t < n; ++t) {
    auto& row = q.counts[kAllExerciseTypes[t]];
    row.fill(per_level / n + (t < per_level % n ? 1 : 0));
  }
  return q;
}

Quota Quota::per_type(std::size_t per_type) {
  Quota q;
  for (auto t : kAllExerciseTypes) {
    auto& row = q.counts[t];
    for (std::size_t l = 0; l < kLevelCount; ++l) {
      row[l] = per_type / kLevelCount + (l < per_type % kLevelCount ? 1 : 0);
    }
  }
  return q;
}

std::size_t Quota::total() const {
  std::size_t n = 0;
  for (const auto& [type, row] : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

// --------------------------------------------------------------- generation

namespace {

constexpr std::size_t kLetterDistractors = 3;
constexpr std::size_t kEndingDistractors = 2;
constexpr std::size_t kMaxOptionsPerTarget = 12;
constexpr std::size_t kMaxAttemptsPerTarget = 6;

std::string exercise_id(ExerciseType type, const std::string& target, const std::string& stem) {
  return sha256_hex(std::string(to_string(type)) + "\n" + target + "\n" + stem).substr(0, 16);
}

ErrorPattern relaxed(const ErrorPattern& p) {
  auto r = p;
  r.left = kAnyContext;
  r.right = kAnyContext;
  r.examples.clear();
  return r;
}

class Builder {
 public:
  Builder(const Lexicon& lexicon, const PatternBank& bank)
      : lexicon_(lexicon), bank_(bank), language_(lexicon.language()) {}

  bool in_lexicon(std::u32string_view letters) const { return lexicon_.contains(enc(letters)); }

  // Everything but level, profile and provenance; nullopt when the pair does
  // not make a sound exercise.
  std::optional<Exercise> build(ExerciseType type, const std::string& target, const std::string& stem,
                                std::uint64_t seed, std::size_t swaps = 1) const {
    if (stem == target) return std::nullopt;
    const auto t = dec(target);
    const auto s = dec(stem);
    if (type != ExerciseType::SplitWords && in_lexicon(s)) return std::nullopt;
    if (type == ExerciseType::SplitWords && lexicon_.contains(stem)) return std::nullopt;

    const auto ann = classify_pair(stem, target, language_);
    if (!closed_loop(type, ann, swaps)) return std::nullopt;

    Exercise ex;
    ex.type = type;
    ex.language = language_;
    ex.target = target;
    ex.stem = stem;
    ex.id = exercise_id(type, target, stem);

    if (type == ExerciseType::SplitWords) {
      const auto words = split_whitespace(target);
      if (words.size() != 2) return std::nullopt;
      const auto cut = unicode::length(words[0]);
      // another split into two lexicon words would make the answer ambiguous
      for (std::size_t q = 1; q < s.size(); ++q) {
        if (q != cut && in_lexicon(s.substr(0, q)) && in_lexicon(s.substr(q))) return std::nullopt;
      }
      ex.solution.position = cut;
      return finish(std::move(ex));
    }

    const auto d = derive(type, t, s, ann);
    if (!d) return std::nullopt;
    ex.gap = d->gap;
    ex.solution = d->solution;

    if (type == ExerciseType::RemoveLetter) {
      for (std::size_t q = 0; q < s.size(); ++q) {
        const auto out = std::u32string(s).erase(q, 1);
        if (out != t && in_lexicon(out)) return std::nullopt;
      }
    }
    if (uses_gap(type)) {
      const auto safe = [&](const std::string& c) {
        const auto out = fill_gap(s, *ex.gap, dec(c));
        return out != t && !in_lexicon(out);
      };
      std::vector<std::string> distractors;
      try {
        distractors = type == ExerciseType::WordEnding
                          ? ending_distractors(ex.solution.text, enc(s.substr(ex.gap->begin,
                                                                              ex.gap->end - ex.gap->begin)),
                                               ex.gap->begin > 0, safe)
                          : select_distractors(ex.solution.text, bank_, language_, kLetterDistractors,
                                               safe, seed);
      } catch (const Error& e) {
        if (e.code() == Errc::InsufficientDistractors) return std::nullopt;
        throw;
      }
      ex.choices = std::move(distractors);
      ex.choices.push_back(ex.solution.text);
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
      shuffle(ex.choices, rng);
    }
    return finish(std::move(ex));
  }

 private:
  std::optional<Exercise> finish(Exercise ex) const {
    if (!is_correct(ex, ex.solution)) return std::nullopt;
    return ex;
  }

  std::vector<std::string> ending_distractors(const std::string& solution, const std::string& written,
                                              bool suffix,
                                              const std::function<bool(const std::string&)>& safe) const {
    std::vector<std::string> out;
    auto offer = [&](const std::string& c) {
      if (out.size() >= kEndingDistractors || c.empty() || c == solution) return;
      if (std::find(out.begin(), out.end(), c) != out.end() || !safe(c)) return;
      out.push_back(c);
    };
    offer(written);
    for (const auto& p : bank_.patterns) {
      if (p.type == ErrorType::Morphology && p.focus == solution) offer(p.written);
    }
    const auto& affixes = AffixInventory::builtin(language_);
    const auto& pool = suffix ? affixes.suffixes() : affixes.prefixes();
    std::vector<std::pair<std::size_t, std::string>> ranked;
    const auto sol = dec(solution);
    for (const auto& a : pool) ranked.emplace_back(damerau_distance(a, sol), enc(a));
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [dist, a] : ranked) offer(a);
    if (out.size() < kEndingDistractors) {
      throw Error(Errc::InsufficientDistractors, "not enough endings for '" + solution + "'");
    }
    return out;
  }

  const Lexicon& lexicon_;
  const PatternBank& bank_;
  Language language_;
};

struct Option {
  std::size_t pattern = 0;
  std::size_t site = 0;
  bool relaxed = false;
  std::string corpus_stem;  // set for pairs taken straight from the corpus
};

struct Candidate {
  std::string target;
  DifficultyProfile profile;
  std::vector<Option> options;
  bool has_corpus = false;
};

class Generator {
 public:
  Generator(const Lexicon& lexicon, const PatternBank& bank, const GenerationOptions& options)
      : lexicon_(lexicon),
        bank_(bank),
        options_(options),
        model_(lexicon, options.dialect, options.weights),
        builder_(lexicon, bank),
        inventory_(GraphemeClusterInventory::builtin(lexicon.language())) {
    clusters_.reserve(lexicon.size());
    for (const auto& e : lexicon.entries()) clusters_.push_back(inventory_.segment(e.form.letters()));
  }

  std::vector<Candidate> candidates(ExerciseType type) const {
    const auto want = trained_error(type);
    std::vector<std::size_t> patterns;
    for (std::size_t k = 0; k < bank_.patterns.size(); ++k) {
      const auto& p = bank_.patterns[k];
      if (p.type != want || p.support < options_.min_support) continue;
      if (type == ExerciseType::SplitWords && !is_run_on(p)) continue;
      patterns.push_back(k);
    }
    std::map<std::string, Candidate> pool;
    auto candidate = [&](const std::string& target, const DifficultyProfile& profile) -> Candidate& {
      auto [it, fresh] = pool.try_emplace(target);
      if (fresh) {
        it->second.target = target;
        it->second.profile = profile;
      }
      return it->second;
    };
    const auto language = lexicon_.language();

    // corpus pairs first, so they lead each candidate's option list
    for (auto k : patterns) {
      for (const auto& ex : bank_.patterns[k].examples) {
        try {
          const auto words = split_whitespace(ex.correct);
          DifficultyProfile profile;
          if (type == ExerciseType::SplitWords) {
            if (words.size() != 2) continue;
            profile = model_.phrase_profile(normalize(words[0], language), normalize(words[1], language));
          } else {
            if (words.size() != 1 || split_whitespace(ex.wrong).size() != 1) continue;
            profile = model_.profile(normalize(words[0], language));
          }
          auto& c = candidate(ex.correct, profile);
          c.options.push_back({k, 0, false, ex.wrong});
          c.has_corpus = true;
        } catch (const Error&) {
          continue;  // targets outside the lexicon cannot be leveled
        }
      }
    }

    if (type == ExerciseType::SplitWords) {
      std::set<std::string> anchors;
      for (auto k : patterns) anchors.insert(first_two_words(bank_.patterns[k].focus)[0]);
      for (auto k : patterns) {
        const auto anchor_text = first_two_words(bank_.patterns[k].focus)[0];
        if (!anchors.erase(anchor_text)) continue;  // one pattern per anchor
        const auto anchor = normalize(anchor_text, language);
        for (const auto& e : lexicon_.entries()) {
          if (e.form.size() < 2 || e.form == anchor) continue;
          const auto target = anchor.text() + " " + e.form.text();
          auto& c = candidate(target, model_.phrase_profile(anchor, e.form));
          if (c.options.size() < kMaxOptionsPerTarget) c.options.push_back({k, 0, false, {}});
        }
      }
    } else {
      for (std::size_t i = 0; i < lexicon_.size(); ++i) {
        const auto& entry = lexicon_.entries()[i];
        Candidate* c = nullptr;
        std::set<std::tuple<std::string, std::string, std::size_t>> seen;
        for (bool relax : {false, true}) {
          for (auto k : patterns) {
            const auto& p = bank_.patterns[k];
            const auto sites = match_sites(relax ? relaxed(p) : p, clusters_[i]);
            for (auto site : sites) {
              if (!seen.emplace(p.focus, p.written, site).second) continue;
              if (!c) c = &candidate(entry.form.text(), model_.profile(i));
              if (c->options.size() < kMaxOptionsPerTarget) c->options.push_back({k, site, relax, {}});
            }
          }
        }
      }
    }

    std::vector<Candidate> out;
    out.reserve(pool.size());
    for (auto& [target, c] : pool) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      if (a.profile.composite != b.profile.composite) return a.profile.composite < b.profile.composite;
      return a.target < b.target;
    });
    return out;
  }

  std::optional<Exercise> attempt(ExerciseType type, const Candidate& c, const Option& o,
                                  DifficultyLevel level, std::mt19937_64& rng) const {
    const auto& pattern = bank_.patterns[o.pattern];
    const auto seed = rng();
    std::optional<Exercise> ex;
    try {
      if (!o.corpus_stem.empty()) {
        const auto target = join_normalized(c.target);
        const auto stem = join_normalized(o.corpus_stem);
        if (type == ExerciseType::SplitWords) {
          ex = builder_.build(type, target, stem, seed);
        } else {
          ex = builder_.build(type, target, stem, seed, count_swaps(target, stem));
        }
      } else {
        const auto applied = o.relaxed ? relaxed(pattern) : pattern;
        const auto corruption = corrupt(c.target, applied, o.site, lexicon_.language());
        if (type == ExerciseType::ReorderLetters &&
            (level == DifficultyLevel::Hard || level == DifficultyLevel::Expert)) {
          ex = second_swap(c.target, corruption.stem, seed, rng);
        }
        if (!ex) ex = builder_.build(type, c.target, corruption.stem, seed);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::InapplicablePattern || e.code() == Errc::UnalignableTokens) return std::nullopt;
      throw;
    }
    if (!ex) return std::nullopt;
    ex->level = level;
    ex->profile = c.profile;
    ex->provenance = o.relaxed ? relaxed(pattern) : pattern;
    ex->provenance.examples.clear();
    ex->from_corpus = !o.corpus_stem.empty();
    return ex;
  }

 private:
  std::string join_normalized(const std::string& text) const {
    std::string out;
    for (const auto& t : normalized_tokens(text, lexicon_.language())) {
      if (!out.empty()) out += ' ';
      out += enc(t);
    }
    return out;
  }

  static std::size_t count_swaps(const std::string& target, const std::string& stem) {
    std::size_t n = 0;
    for (const auto& op : align(stem, target)) n += op.kind == EditKind::Transpose;
    return std::max<std::size_t>(n, 1);
  }

  // A second adjacent swap away from the first one, for the harder levels.
  std::optional<Exercise> second_swap(const std::string& target, const std::string& stem, std::uint64_t seed,
                                      std::mt19937_64& rng) const {
    const auto t = dec(target);
    auto s = dec(stem);
    std::size_t first = 0;
    while (first < s.size() && s[first] == t[first]) ++first;
    std::vector<std::size_t> spots;
    for (std::size_t q = 0; q + 1 < s.size(); ++q) {
      const bool apart = q + 1 < first || q > first + 2;
      if (apart && s[q] != s[q + 1]) spots.push_back(q);
    }
    shuffle(spots, rng);
    for (auto q : spots) {
      auto twice = s;
      std::swap(twice[q], twice[q + 1]);
      if (auto ex = builder_.build(ExerciseType::ReorderLetters, target, enc(twice), seed, 2)) return ex;
    }
    return std::nullopt;
  }

  const Lexicon& lexicon_;
  const PatternBank& bank_;
  const GenerationOptions& options_;
  DifficultyModel model_;
  Builder builder_;
  const GraphemeClusterInventory& inventory_;
  std::vector<std::vector<std::u32string>> clusters_;
};

}  // namespace

ExerciseBank generate_bank(const Lexicon& lexicon, const PatternBank& patterns, const Quota& quota,
                           const GenerationOptions& options) {
  if (patterns.language != lexicon.language()) {
    throw Error(Errc::InvalidRequest, "pattern bank and lexicon languages differ");
  }
  ExerciseBank bank;
  bank.language = lexicon.language();
  bank.seed = options.seed;
  bank.pattern_fingerprint = patterns.fingerprint;
  Generator generator(lexicon, patterns, options);

  for (std::size_t ti = 0; ti < std::size(kAllExerciseTypes); ++ti) {
    const auto type = kAllExerciseTypes[ti];
    const auto it = quota.counts.find(type);
    if (it == quota.counts.end()) continue;
    const auto& wanted = it->second;
    std::size_t type_total = 0;
    for (auto n : wanted) type_total += n;
    if (type_total == 0) continue;

    std::mt19937_64 rng(options.seed * 0x100000001b3ULL + ti);
    const auto pool = generator.candidates(type);
    std::size_t corpus_left = static_cast<std::size_t>(std::floor(options.corpus_share * type_total));
    std::array<std::vector<double>, kLevelCount> composites;

    std::size_t cumulative = 0;
    for (std::size_t l = 0; l < kLevelCount; ++l) {
      const auto level = kAllLevels[l];
      // strata of the composite-sorted pool, sized in proportion to the quota
      const auto lo = pool.size() * cumulative / type_total;
      cumulative += wanted[l];
      const auto hi = pool.size() * cumulative / type_total;
      std::size_t produced = 0;
      if (wanted[l] > 0) {
        std::vector<std::size_t> order(hi - lo);
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = lo + k;
        shuffle(order, rng);
        std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return pool[k].has_corpus; });
        for (auto k : order) {
          if (produced == wanted[l]) break;
          const auto& c = pool[k];
          std::vector<const Option*> tries;
          std::vector<const Option*> exact;
          std::vector<const Option*> loose;
          for (const auto& o : c.options) {
            if (!o.corpus_stem.empty()) {
              if (corpus_left > 0) tries.push_back(&o);
            } else {
              (o.relaxed ? loose : exact).push_back(&o);
            }
          }
          shuffle(exact, rng);
          shuffle(loose, rng);
          tries.insert(tries.end(), exact.begin(), exact.end());
          tries.insert(tries.end(), loose.begin(), loose.end());
          if (tries.size() > kMaxAttemptsPerTarget) tries.resize(kMaxAttemptsPerTarget);
          for (const auto* o : tries) {
            auto ex = generator.attempt(type, c, *o, level, rng);
            if (!ex) continue;
            if (ex->from_corpus) --corpus_left;
            composites[l].push_back(ex->profile.composite);
            bank.exercises.push_back(std::move(*ex));
            ++produced;
            break;
          }
        }
      }
      if (produced < wanted[l]) bank.shortfall.push_back({type, level, wanted[l], produced});
    }

    LevelCuts cuts;
    double last = 0.0;
    for (std::size_t l = 0; l + 1 < kLevelCount; ++l) {
      if (!composites[l].empty()) last = *std::max_element(composites[l].begin(), composites[l].end());
      cuts.upper[l] = last;
    }
    bank.cuts[type] = cuts;
  }

  std::sort(bank.exercises.begin(), bank.exercises.end(),
            [](const Exercise& a, const Exercise& b) { return a.id < b.id; });
  if (!bank.shortfall.empty() && !options.allow_shortfall) {
    std::ostringstream msg;
    msg << "quota unreachable:";
    for (const auto& s : bank.shortfall) {
      msg << ' ' << to_string(s.type) << '/' << to_string(s.level) << ' ' << s.produced << " of " << s.wanted
          << ';';
    }
    throw Error(Errc::QuotaUnreachable, msg.str());
  }
  return bank;
}

std::vector<std::string> validate(const Exercise& ex, const Lexicon& lexicon) {
  std::vector<std::string> problems;
  if (!is_correct(ex, ex.solution)) problems.push_back("solution does not rebuild the target");
  std::set<std::string> distinct(ex.choices.begin(), ex.choices.end());
  if (distinct.size() != ex.choices.size()) problems.push_back("choices repeat");
  if (!ex.choices.empty() &&
      std::find(ex.choices.begin(), ex.choices.end(), ex.solution.text) == ex.choices.end()) {
    problems.push_back("solution missing from choices");
  }
  if (uses_gap(ex.type) && ex.gap) {
    const auto stem = dec(ex.stem);
    for (const auto& c : ex.choices) {
      if (c == ex.solution.text) continue;
      const auto out = enc(fill_gap(stem, *ex.gap, dec(c)));
      if (out == ex.target) problems.push_back("distractor '" + c + "' also rebuilds the target");
      if (lexicon.contains(out)) problems.push_back("distractor '" + c + "' makes lexicon word " + out);
    }
  }
  if (ex.type != ExerciseType::SplitWords && lexicon.contains(ex.stem)) {
    problems.push_back("stem is a lexicon word");
  }
  try {
    const auto ann = classify_pair(ex.stem, ex.target, ex.language);
    std::size_t swaps = 0;
    for (const auto& i : ann.instances) swaps += i.type == ErrorType::Transposition;
    if (!closed_loop(ex.type, ann, std::max<std::size_t>(swaps, 1))) {
      problems.push_back("classifier does not see a " + std::string(to_string(trained_error(ex.type))) +
                         " error");
    }
  } catch (const Error& e) {
    problems.push_back(std::string("classifier failed: ") + e.what());
  }
  return problems;
}

}  // namespace errata

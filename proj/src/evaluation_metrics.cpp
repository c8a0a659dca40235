#include "errata/evaluation_metrics.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>

#include "errata/error.hpp"
#include "errata/error_analysis.hpp"
#include "errata/unicode.hpp"

namespace errata {

namespace {

std::vector<std::string> normalized(const std::vector<std::string>& tokens, Language language) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    for (const auto& n : normalized_tokens(t, language)) out.push_back(unicode::encode(n));
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t count) {
  std::string out;
  for (std::size_t k = begin; k < begin + count; ++k) {
    if (k > begin) out += ' ';
    out += tokens[k];
  }
  return out;
}

struct Shape {
  std::size_t hyp;
  std::size_t ref;
};

// Earlier shapes win ties.
constexpr Shape kShapes[] = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {0, 1}, {1, 0}};

struct Cell {
  std::size_t objective = std::numeric_limits<std::size_t>::max();
  std::size_t errors = 0;
  int shape = -1;
};

}  // namespace

std::vector<ScoredSegment> align_for_scoring(const std::vector<std::string>& reference_raw,
                                             const std::vector<std::string>& transcript_raw, Language language) {
  const auto ref = normalized(reference_raw, language);
  const auto hyp = normalized(transcript_raw, language);
  const auto n = hyp.size();
  const auto m = ref.size();
  std::vector<Cell> dp((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cell& { return dp[i * (m + 1) + j]; };
  at(0, 0).objective = 0;

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      auto& cell = at(i, j);
      for (int s = 0; s < static_cast<int>(std::size(kShapes)); ++s) {
        const auto [a, b] = kShapes[s];
        if (a > i || b > j) continue;
        const auto& prev = at(i - a, j - b);
        if (prev.shape < 0 && !(i - a == 0 && j - b == 0)) continue;
        std::size_t objective = 0;
        std::size_t errors = 1;
        if (a == 0) {
          objective = unicode::length(ref[j - 1]);
        } else if (b == 0) {
          objective = unicode::length(hyp[i - 1]);
        } else {
          try {
            errors = count_errors(classify_pair(join(hyp, i - a, a), join(ref, j - b, b), language));
          } catch (const Error& e) {
            if (e.code() == Errc::UnalignableTokens) continue;
            throw;
          }
          objective = errors;
        }
        const auto total_obj = prev.objective + objective;
        const auto total_err = prev.errors + errors;
        if (cell.shape < 0 || total_obj < cell.objective ||
            (total_obj == cell.objective && total_err < cell.errors)) {
          cell = {total_obj, total_err, s};
        }
      }
    }
  }

  std::vector<ScoredSegment> segments;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const auto& cell = at(i, j);
    const auto [a, b] = kShapes[cell.shape];
    const auto& prev = at(i - a, j - b);
    segments.push_back({j - b, b, i - a, a, cell.errors - prev.errors});
    i -= a;
    j -= b;
  }
  std::reverse(segments.begin(), segments.end());
  return segments;
}

namespace {

struct Tally {
  std::size_t words = 0;
  std::size_t wrong = 0;
  std::size_t errors = 0;
  std::size_t added = 0;
  std::size_t omitted = 0;

  void add(const Tally& o) {
    words += o.words;
    wrong += o.wrong;
    errors += o.errors;
    added += o.added;
    omitted += o.omitted;
  }
};

Tally tally(const std::vector<std::string>& reference, const std::vector<std::string>& transcript,
            Language language) {
  Tally t;
  t.words = normalized(reference, language).size();
  const auto segments = align_for_scoring(reference, transcript, language);
  // A reference stretch (one word, or the words of a boundary error) counts
  // once as wrong. An added word is charged to the stretch before it, or the
  // first one when it opens the line.
  std::vector<bool> wrong(segments.size(), false);
  std::size_t last_ref = segments.size();
  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    t.errors += s.errors;
    if (s.ref_count == 0) {
      ++t.added;
      if (last_ref < segments.size()) {
        wrong[last_ref] = true;
      } else {
        pending.push_back(k);
      }
      continue;
    }
    if (s.hyp_count == 0) ++t.omitted;
    if (s.errors > 0) wrong[k] = true;
    if (last_ref == segments.size() && !pending.empty()) wrong[k] = true;
    last_ref = k;
  }
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (segments[k].ref_count > 0 && wrong[k]) ++t.wrong;
  }
  return t;
}

DictationScore dictation(const Tally& t) {
  if (t.words == 0) throw Error(Errc::EmptyReference, "the reference has no words");
  DictationScore s;
  s.total_words = t.words;
  s.words_with_errors = t.wrong;
  s.total_errors = t.errors;
  s.rate_words_with_errors = static_cast<double>(t.wrong) / t.words;
  s.errors_per_word = static_cast<double>(t.errors) / t.words;
  if (t.wrong > 0) s.errors_per_wrong_word = static_cast<double>(t.errors) / t.wrong;
  s.added_words = t.added;
  s.omitted_words = t.omitted;
  return s;
}

ReadingScore reading(const Tally& t) {
  if (t.words == 0) throw Error(Errc::EmptyReference, "the reference has no words");
  return {t.words, t.errors, static_cast<double>(t.errors) / t.words, t.added, t.omitted};
}

void require_same_lines(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(Errc::DataFormat, "reference has " + std::to_string(a) + " lines but the transcript has " +
                                      std::to_string(b));
  }
}

}  // namespace

DictationScore score_writing(const std::vector<std::string>& reference, const std::vector<std::string>& transcript,
                             Language language) {
  return dictation(tally(reference, transcript, language));
}

ReadingScore score_reading(const std::vector<std::string>& reference, const std::vector<std::string>& spoken,
                           Language language) {
  return reading(tally(reference, spoken, language));
}

DictationScore score_writing(const std::vector<std::vector<std::string>>& reference,
                             const std::vector<std::vector<std::string>>& transcript, Language language) {
  require_same_lines(reference.size(), transcript.size());
  Tally total;
  for (std::size_t k = 0; k < reference.size(); ++k) total.add(tally(reference[k], transcript[k], language));
  return dictation(total);
}

ReadingScore score_reading(const std::vector<std::vector<std::string>>& reference,
                           const std::vector<std::vector<std::string>>& spoken, Language language) {
  require_same_lines(reference.size(), spoken.size());
  Tally total;
  for (std::size_t k = 0; k < reference.size(); ++k) total.add(tally(reference[k], spoken[k], language));
  return reading(total);
}

TestDelta delta(double pre, double post) noexcept { return {pre, post, post - pre}; }

std::vector<std::vector<std::string>> read_token_lines(std::istream& in) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(split_whitespace(line));
  }
  return lines;
}

std::vector<std::vector<std::string>> load_token_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::DataFormat, "cannot open " + path.string());
  return read_token_lines(in);
}

}  // namespace errata

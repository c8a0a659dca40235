#include "errata/error_analysis.hpp"

#include <algorithm>
#include <optional>

#include "errata/error.hpp"
#include "errata/unicode.hpp"

namespace errata {

std::string_view to_string(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::Substitute: return "substitute";
    case EditKind::Transpose: return "transpose";
  }
  return "?";
}

std::string_view to_string(ErrorType type) noexcept {
  switch (type) {
    case ErrorType::Insertion: return "insertion";
    case ErrorType::Omission: return "omission";
    case ErrorType::Substitution: return "substitution";
    case ErrorType::Transposition: return "transposition";
    case ErrorType::Boundary: return "boundary";
    case ErrorType::Morphology: return "morphology";
  }
  return "?";
}

ErrorType parse_error_type(std::string_view name) {
  for (ErrorType t : kAllErrorTypes) {
    if (to_string(t) == name) return t;
  }
  throw Error(Errc::DataFormat, "unknown error type '" + std::string(name) + "'");
}

namespace {

// Full OSA table over (wrong, correct); cell (i, j) is the distance between
// the first i written letters and the first j correct letters.
class OsaTable {
 public:
  OsaTable(std::u32string_view a, std::u32string_view b)
      : rows_(a.size() + 1), cols_(b.size() + 1), cells_(rows_ * cols_) {
    for (std::size_t i = 0; i < rows_; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < cols_; ++j) at(0, j) = static_cast<std::uint32_t>(j);
    for (std::size_t i = 1; i < rows_; ++i) {
      for (std::size_t j = 1; j < cols_; ++j) {
        const std::uint32_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
        std::uint32_t best = std::min({at(i - 1, j) + 1, at(i, j - 1) + 1, at(i - 1, j - 1) + cost});
        if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
          best = std::min(best, at(i - 2, j - 2) + 1);
        }
        at(i, j) = best;
      }
    }
  }

  std::uint32_t& at(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  std::uint32_t at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::uint32_t result() const { return at(rows_ - 1, cols_ - 1); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> cells_;
};

std::string enc(std::u32string_view s) { return unicode::encode(s); }

}  // namespace

std::size_t morphology_stem_threshold(std::size_t shorter) noexcept {
  return std::max<std::size_t>(3, shorter * 3 / 5);
}

std::size_t damerau_distance(std::u32string_view a, std::u32string_view b) {
  return OsaTable(a, b).result();
}

std::size_t damerau_distance(std::string_view a, std::string_view b) {
  return damerau_distance(unicode::decode(a), unicode::decode(b));
}

std::vector<EditOp> align(std::u32string_view wrong, std::u32string_view correct) {
  const OsaTable d(wrong, correct);
  std::vector<EditOp> ops;
  std::size_t i = wrong.size();
  std::size_t j = correct.size();
  while (i > 0 || j > 0) {
    if (i > 1 && j > 1 && wrong[i - 1] == correct[j - 2] && wrong[i - 2] == correct[j - 1] &&
        wrong[i - 1] != correct[j - 1] && d.at(i, j) == d.at(i - 2, j - 2) + 1) {
      ops.push_back({EditKind::Transpose, j - 2, enc(correct.substr(j - 2, 2)), enc(wrong.substr(i - 2, 2))});
      i -= 2;
      j -= 2;
    } else if (i > 0 && j > 0 &&
               d.at(i, j) == d.at(i - 1, j - 1) + (wrong[i - 1] == correct[j - 1] ? 0u : 1u)) {
      if (wrong[i - 1] != correct[j - 1]) {
        ops.push_back({EditKind::Substitute, j - 1, enc(correct.substr(j - 1, 1)), enc(wrong.substr(i - 1, 1))});
      }
      --i;
      --j;
    } else if (i > 0 && d.at(i, j) == d.at(i - 1, j) + 1) {
      ops.push_back({EditKind::Delete, j, "", enc(wrong.substr(i - 1, 1))});
      --i;
    } else {
      ops.push_back({EditKind::Insert, j - 1, enc(correct.substr(j - 1, 1)), ""});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::vector<EditOp> align(std::string_view wrong, std::string_view correct) {
  return align(unicode::decode(wrong), unicode::decode(correct));
}

std::u32string apply_edits(std::u32string_view wrong, const std::vector<EditOp>& ops) {
  std::u32string out;
  std::size_t i = 0;
  auto copy_until = [&](std::size_t produced) {
    while (out.size() < produced && i < wrong.size()) out.push_back(wrong[i++]);
  };
  for (const auto& op : ops) {
    copy_until(op.position);
    const auto expected = unicode::decode(op.expected);
    const auto written = unicode::decode(op.written);
    switch (op.kind) {
      case EditKind::Insert:
        out += expected;
        break;
      case EditKind::Delete:
        i += written.size();
        break;
      case EditKind::Substitute:
      case EditKind::Transpose:
        out += expected;
        i += written.size();
        break;
    }
  }
  out.append(wrong.substr(std::min(i, wrong.size())));
  return out;
}

std::vector<std::u32string> normalized_tokens(std::string_view text, Language language) {
  std::vector<std::u32string> out;
  for (const auto& token : split_whitespace(text)) {
    try {
      out.push_back(normalize(token, language).letters());
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyAfterNormalization) throw;
    }
  }
  return out;
}

namespace {

std::u32string concat(const std::vector<std::u32string>& tokens, std::size_t begin, std::size_t count) {
  std::u32string out;
  for (std::size_t k = begin; k < begin + count; ++k) out += tokens[k];
  return out;
}

std::string join(const std::vector<std::u32string>& tokens, std::size_t begin, std::size_t count) {
  std::string out;
  for (std::size_t k = begin; k < begin + count; ++k) {
    if (k > begin) out.push_back(' ');
    out += enc(tokens[k]);
  }
  return out;
}

bool coverable(std::size_t rest_wrong, std::size_t rest_correct) {
  if (rest_wrong == 0 || rest_correct == 0) return rest_wrong == rest_correct;
  return rest_wrong <= 3 * rest_correct && rest_correct <= 3 * rest_wrong;
}

}  // namespace

std::vector<AlignedSegment> align_tokens(const std::vector<std::u32string>& wrong,
                                         const std::vector<std::u32string>& correct) {
  static constexpr std::pair<std::size_t, std::size_t> kShapes[] = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}};
  std::vector<AlignedSegment> segments;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < wrong.size() || j < correct.size()) {
    std::optional<AlignedSegment> best;
    std::size_t best_cost = 0;
    for (const auto& [a, b] : kShapes) {
      if (i + a > wrong.size() || j + b > correct.size()) continue;
      if (!coverable(wrong.size() - i - a, correct.size() - j - b)) continue;
      AlignedSegment seg{i, a, j, b, concat(wrong, i, a), concat(correct, j, b)};
      const auto cost = damerau_distance(seg.wrong, seg.correct);
      if (!best || cost < best_cost) {
        best_cost = cost;
        best = std::move(seg);
      }
    }
    if (!best) {
      throw Error(Errc::UnalignableTokens, "cannot align " + std::to_string(wrong.size()) +
                                               " written tokens with " + std::to_string(correct.size()) +
                                               " correct tokens");
    }
    i += best->wrong_count;
    j += best->correct_count;
    segments.push_back(std::move(*best));
  }
  return segments;
}

namespace {

std::size_t common_prefix(std::u32string_view a, std::u32string_view b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  return k;
}

std::size_t common_suffix(std::u32string_view a, std::u32string_view b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[a.size() - 1 - k] == b[b.size() - 1 - k]) ++k;
  return k;
}

// A wrong affix on a shared stem: the shared part must cover at least
// max(3, floor(0.6 * shorter length)) letters, both differing residues must be
// inventory affixes of the same kind, and they must be at least two edits
// apart so that single-letter slips stay letter errors.
std::optional<ErrorInstance> detect_morphology(std::u32string_view wrong, std::u32string_view correct,
                                               const AffixInventory& affixes) {
  const auto threshold = morphology_stem_threshold(std::min(wrong.size(), correct.size()));

  for (std::size_t k = common_prefix(wrong, correct); k >= threshold && k > 0; --k) {
    const auto rw = wrong.substr(k);
    const auto rc = correct.substr(k);
    if (!rw.empty() && !rc.empty() && affixes.is_suffix(rw) && affixes.is_suffix(rc) &&
        damerau_distance(rw, rc) >= 2) {
      return ErrorInstance{ErrorType::Morphology, k, enc(rc), enc(rw), 0, 0, k};
    }
  }
  for (std::size_t k = common_suffix(wrong, correct); k >= threshold && k > 0; --k) {
    const auto pw = wrong.substr(0, wrong.size() - k);
    const auto pc = correct.substr(0, correct.size() - k);
    if (!pw.empty() && !pc.empty() && affixes.is_prefix(pw) && affixes.is_prefix(pc) &&
        damerau_distance(pw, pc) >= 2) {
      return ErrorInstance{ErrorType::Morphology, 0, enc(pc), enc(pw), 0, 0, 0};
    }
  }
  return std::nullopt;
}

ErrorType type_of(EditKind kind) {
  switch (kind) {
    case EditKind::Insert: return ErrorType::Omission;
    case EditKind::Delete: return ErrorType::Insertion;
    case EditKind::Substitute: return ErrorType::Substitution;
    case EditKind::Transpose: return ErrorType::Transposition;
  }
  return ErrorType::Substitution;
}

// Maps an offset in a segment's concatenated correct text to (token, index).
std::pair<std::size_t, std::size_t> locate(const std::vector<std::u32string>& correct,
                                           const AlignedSegment& seg, std::size_t offset) {
  std::size_t start = 0;
  for (std::size_t k = seg.correct_begin; k < seg.correct_begin + seg.correct_count; ++k) {
    const auto len = correct[k].size();
    if (offset < start + len || k + 1 == seg.correct_begin + seg.correct_count) {
      return {k, offset - start};
    }
    start += len;
  }
  return {seg.correct_begin, offset};
}

}  // namespace

ErrorAnnotation classify_pair(std::string_view wrong, std::string_view correct, Language language) {
  const auto w = normalized_tokens(wrong, language);
  const auto c = normalized_tokens(correct, language);
  if (w.empty() || c.empty()) {
    throw Error(Errc::EmptyAfterNormalization, "both sides of a pair need at least one word");
  }
  ErrorAnnotation ann;
  ann.wrong = join(w, 0, w.size());
  ann.correct = join(c, 0, c.size());
  ann.language = language;
  ann.segments = align_tokens(w, c);

  const auto& affixes = AffixInventory::builtin(language);
  for (std::size_t s = 0; s < ann.segments.size(); ++s) {
    const auto& seg = ann.segments[s];
    if (seg.is_boundary()) {
      const auto at = seg.wrong_count < seg.correct_count ? c[seg.correct_begin].size()
                                                          : w[seg.wrong_begin].size();
      // The boundary sits at the end of the first correct token (run-on) or
      // inside the single correct token (split).
      ann.instances.push_back({ErrorType::Boundary, at, join(c, seg.correct_begin, seg.correct_count),
                               join(w, seg.wrong_begin, seg.wrong_count), seg.correct_begin, s, at});
    } else if (seg.wrong == seg.correct) {
      continue;
    } else if (auto morph = detect_morphology(seg.wrong, seg.correct, affixes)) {
      morph->token_index = seg.correct_begin;
      morph->segment = s;
      ann.instances.push_back(*morph);
      continue;
    }
    for (const auto& op : align(seg.wrong, seg.correct)) {
      const auto [token, pos] = locate(c, seg, op.position);
      ann.instances.push_back({type_of(op.kind), pos, op.expected, op.written, token, s, op.position});
    }
  }
  ann.error_count = ann.instances.size();
  return ann;
}

std::size_t count_errors(const ErrorAnnotation& annotation) { return annotation.instances.size(); }

}  // namespace errata

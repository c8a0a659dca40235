#include "errata/pattern_extraction.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "errata/error.hpp"
#include "errata/unicode.hpp"
#include "json.hpp"

namespace errata {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

std::vector<CorpusPair> read_corpus(std::istream& in) {
  std::vector<CorpusPair> pairs;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(Errc::DataFormat,
                  "corpus line " + std::to_string(number) + ": expected wrong<TAB>correct");
    }
    pairs.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return pairs;
}

std::vector<CorpusPair> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::DataFormat, "cannot open corpus " + path.string());
  return read_corpus(in);
}

std::vector<ErrorAnnotation> annotate(const std::vector<CorpusPair>& pairs, Language language) {
  std::vector<ErrorAnnotation> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(classify_pair(p.wrong, p.correct, language));
  return out;
}

namespace {

struct Cluster {
  std::u32string text;
  std::size_t begin = 0;  // offset in the segment's concatenated correct text
  bool token_initial = false;
  bool token_final = false;
};

std::vector<Cluster> segment_correct(const ErrorAnnotation& ann, const AlignedSegment& seg,
                                     const GraphemeClusterInventory& inventory) {
  const auto tokens = normalized_tokens(ann.correct, ann.language);
  std::vector<Cluster> out;
  std::size_t offset = 0;
  for (std::size_t k = seg.correct_begin; k < seg.correct_begin + seg.correct_count; ++k) {
    const auto parts = inventory.segment(tokens[k]);
    for (std::size_t c = 0; c < parts.size(); ++c) {
      out.push_back({parts[c], offset, c == 0, c + 1 == parts.size()});
      offset += parts[c].size();
    }
  }
  return out;
}

// wrong_at[j]: index into the written text at the moment correct letter j
// starts being produced, before any deletions attached to j.
std::vector<std::size_t> wrong_offsets(std::u32string_view wrong, std::u32string_view correct,
                                       const std::vector<EditOp>& ops) {
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> at(correct.size() + 1, kUnset);
  std::size_t i = 0;
  std::size_t out = 0;
  auto mark = [&] {
    if (out < at.size() && at[out] == kUnset) at[out] = i;
  };
  auto copy_until = [&](std::size_t produced) {
    while (out < produced) {
      mark();
      ++out;
      ++i;
    }
  };
  for (const auto& op : ops) {
    copy_until(op.position);
    mark();
    switch (op.kind) {
      case EditKind::Insert:
        for (std::size_t n = unicode::length(op.expected); n > 0; --n) {
          mark();
          ++out;
        }
        break;
      case EditKind::Delete:
        i += unicode::length(op.written);
        break;
      case EditKind::Substitute:
        ++out;
        ++i;
        break;
      case EditKind::Transpose:
        ++out;
        at[out] = i + 1;
        ++out;
        i += 2;
        break;
    }
  }
  copy_until(correct.size());
  mark();
  at[correct.size()] = wrong.size();
  return at;
}

std::size_t cluster_at(const std::vector<Cluster>& clusters, std::size_t offset) {
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (offset < clusters[k].begin + clusters[k].text.size()) return k;
  }
  return clusters.size() - 1;
}

ErrorPattern letter_pattern(const ErrorInstance& inst, const AlignedSegment& seg,
                            const std::vector<Cluster>& clusters,
                            const std::vector<std::size_t>& wrong_at) {
  const auto first = cluster_at(clusters, inst.offset);
  auto last = first;
  if (inst.type == ErrorType::Transposition) last = cluster_at(clusters, inst.offset + 1);

  const auto begin = clusters[first].begin;
  const auto end = clusters[last].begin + clusters[last].text.size();
  ErrorPattern p;
  p.type = inst.type;
  for (auto k = first; k <= last; ++k) p.focus += unicode::encode(clusters[k].text);
  const auto wb = wrong_at[begin];
  const auto we = wrong_at[end];
  p.written = unicode::encode(std::u32string_view(seg.wrong).substr(wb, we - wb));
  p.left = clusters[first].token_initial ? std::string(kBoundaryMarker)
                                         : unicode::encode(clusters[first - 1].text);
  p.right = clusters[last].token_final ? std::string(kBoundaryMarker)
                                       : unicode::encode(clusters[last + 1].text);
  return p;
}

std::string canonical_corpus(const std::vector<ErrorAnnotation>& annotations, Language language) {
  std::string text = "language\t" + std::string(to_string(language)) + "\n";
  for (const auto& a : annotations) text += a.wrong + "\t" + a.correct + "\n";
  return text;
}

bool confusion_type(ErrorType t) {
  return t == ErrorType::Insertion || t == ErrorType::Omission || t == ErrorType::Substitution ||
         t == ErrorType::Transposition;
}

}  // namespace

PatternBank extract_patterns(const std::vector<ErrorAnnotation>& annotations,
                             const GraphemeClusterInventory& inventory) {
  PatternBank bank;
  bank.language = annotations.empty() ? inventory.language() : annotations.front().language;
  std::map<std::tuple<ErrorType, std::string, std::string, std::string, std::string>, ErrorPattern> merged;

  auto add = [&](ErrorPattern p, const ErrorAnnotation& ann) {
    auto [it, fresh] = merged.try_emplace(p.key(), std::move(p));
    if (!fresh) ++it->second.support;
    auto& ex = it->second.examples;
    CorpusPair pair{ann.wrong, ann.correct};
    if (ex.size() < kMaxExamplesPerPattern && std::find(ex.begin(), ex.end(), pair) == ex.end()) {
      ex.push_back(std::move(pair));
    }
  };

  for (const auto& ann : annotations) {
    if (ann.language != bank.language) {
      throw Error(Errc::InvalidRequest, "annotations mix languages");
    }
    for (std::size_t s = 0; s < ann.segments.size(); ++s) {
      const auto& seg = ann.segments[s];
      std::vector<Cluster> clusters;
      std::vector<std::size_t> wrong_at;
      for (const auto& inst : ann.instances) {
        if (inst.segment != s) continue;
        ErrorPattern p;
        if (inst.type == ErrorType::Boundary) {
          p.type = inst.type;
          p.focus = inst.expected;
          p.written = inst.written;
        } else if (inst.type == ErrorType::Morphology) {
          p.type = inst.type;
          p.focus = inst.expected;
          p.written = inst.written;
          // suffix slips sit after a stem, prefix slips at the word start
          if (inst.offset > 0) {
            p.left = kAnyContext;
          } else {
            p.right = kAnyContext;
          }
        } else {
          if (clusters.empty()) {
            clusters = segment_correct(ann, seg, inventory);
            wrong_at = wrong_offsets(seg.wrong, seg.correct, align(seg.wrong, seg.correct));
          }
          p = letter_pattern(inst, seg, clusters, wrong_at);
        }
        add(std::move(p), ann);
      }
    }
  }

  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (auto& [key, p] : merged) {
    if (confusion_type(p.type) && p.focus != p.written) counts[p.focus][p.written] += p.support;
    bank.patterns.push_back(std::move(p));
  }
  for (const auto& [focus, row] : counts) {
    auto& out = bank.confusions[focus];
    for (const auto& [written, n] : row) out.push_back({written, n});
    // map order is lexicographic, so a stable sort by count keeps the tie rule
    std::stable_sort(out.begin(), out.end(),
                     [](const Confusion& a, const Confusion& b) { return a.count > b.count; });
  }
  bank.fingerprint = sha256_hex(canonical_corpus(annotations, bank.language));
  return bank;
}

std::vector<std::string> confusion_set(const PatternBank& bank, std::string_view cluster) {
  std::vector<std::string> out;
  const auto it = bank.confusions.find(std::string(cluster));
  if (it == bank.confusions.end()) return out;
  for (const auto& c : it->second) {
    if (c.written != cluster) out.push_back(c.written);
  }
  return out;
}

std::vector<std::size_t> match_sites(const ErrorPattern& pattern, const WordForm& word,
                                     const GraphemeClusterInventory& inventory) {
  if (pattern.type == ErrorType::Boundary) return {};
  return match_sites(pattern, inventory.segment(word.letters()));
}

std::vector<std::size_t> match_sites(const ErrorPattern& pattern, const std::vector<std::u32string>& clusters) {
  std::vector<std::size_t> sites;
  if (pattern.type == ErrorType::Boundary) return sites;
  const auto focus = unicode::decode(pattern.focus);
  if (focus.empty()) return sites;

  if (pattern.type == ErrorType::Morphology) {
    std::u32string letters;
    for (const auto& c : clusters) letters += c;
    if (letters.size() <= focus.size()) return sites;
    // the corrupted word must still share a stem long enough to read as an affix slip
    const auto stem = letters.size() - focus.size();
    const auto shorter = stem + std::min(focus.size(), unicode::length(pattern.written));
    if (stem < morphology_stem_threshold(shorter)) return sites;
    const bool suffix = pattern.left == kAnyContext;
    const auto start = suffix ? letters.size() - focus.size() : 0;
    if (letters.compare(start, focus.size(), focus) != 0) return sites;
    const auto cut = suffix ? start : focus.size();
    std::size_t offset = 0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      if (offset == cut) {
        sites.push_back(suffix ? k : 0);
        break;
      }
      offset += clusters[k].size();
    }
    return sites;
  }

  auto context_ok = [&](const std::string& ctx, bool at_edge, std::size_t neighbor) {
    if (ctx == kAnyContext) return true;
    if (ctx == kBoundaryMarker) return at_edge;
    return !at_edge && unicode::encode(clusters[neighbor]) == ctx;
  };
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    std::u32string run;
    std::size_t b = a;
    while (b < clusters.size() && run.size() < focus.size()) run += clusters[b++];
    if (run != focus) continue;
    if (context_ok(pattern.left, a == 0, a - 1) && context_ok(pattern.right, b == clusters.size(), b)) {
      sites.push_back(a);
    }
  }
  return sites;
}

std::u32string apply_pattern(const ErrorPattern& pattern, const WordForm& word, std::size_t site,
                             const GraphemeClusterInventory& inventory) {
  const auto sites = match_sites(pattern, word, inventory);
  if (std::find(sites.begin(), sites.end(), site) == sites.end()) {
    throw Error(Errc::InapplicablePattern, "pattern " + std::string(to_string(pattern.type)) + " " +
                                               pattern.focus + "->" + pattern.written +
                                               " does not apply to '" + word.text() + "' at " +
                                               std::to_string(site));
  }
  const auto clusters = inventory.segment(word.letters());
  std::size_t offset = 0;
  for (std::size_t k = 0; k < site; ++k) offset += clusters[k].size();
  auto out = word.letters();
  out.replace(offset, unicode::length(pattern.focus), unicode::decode(pattern.written));
  return out;
}

std::string to_json(const PatternBank& bank) {
  json patterns = json::array();
  for (const auto& p : bank.patterns) {
    json examples = json::array();
    for (const auto& e : p.examples) examples.push_back({e.wrong, e.correct});
    patterns.push_back({{"type", to_string(p.type)},
                        {"focus", p.focus},
                        {"written", p.written},
                        {"left", p.left},
                        {"right", p.right},
                        {"support", p.support},
                        {"examples", examples}});
  }
  json confusions = json::object();
  for (const auto& [focus, row] : bank.confusions) {
    json r = json::array();
    for (const auto& c : row) r.push_back({c.written, c.count});
    confusions[focus] = r;
  }
  const json doc = {{"version", PatternBank::kVersion},
                    {"language", to_string(bank.language)},
                    {"fingerprint", bank.fingerprint},
                    {"patterns", patterns},
                    {"confusions", confusions}};
  return doc.dump(2) + "\n";
}

PatternBank pattern_bank_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.at("version").get<int>() != PatternBank::kVersion) {
      throw Error(Errc::DataFormat, "unsupported pattern bank version");
    }
    PatternBank bank;
    bank.language = parse_language(doc.at("language").get<std::string>());
    bank.fingerprint = doc.at("fingerprint").get<std::string>();
    for (const auto& j : doc.at("patterns")) {
      ErrorPattern p;
      p.type = parse_error_type(j.at("type").get<std::string>());
      p.focus = j.at("focus").get<std::string>();
      p.written = j.at("written").get<std::string>();
      p.left = j.at("left").get<std::string>();
      p.right = j.at("right").get<std::string>();
      p.support = j.at("support").get<std::size_t>();
      if (p.support == 0) throw Error(Errc::DataFormat, "pattern support must be positive");
      for (const auto& e : j.value("examples", json::array())) {
        p.examples.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
      }
      bank.patterns.push_back(std::move(p));
    }
    for (const auto& [focus, row] : doc.at("confusions").items()) {
      auto& out = bank.confusions[focus];
      for (const auto& c : row) out.push_back({c.at(0).get<std::string>(), c.at(1).get<std::size_t>()});
    }
    return bank;
  } catch (const json::exception& e) {
    throw Error(Errc::DataFormat, std::string("malformed pattern bank: ") + e.what());
  }
}

void save(const PatternBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::DataFormat, "cannot write " + path.string());
  out << to_json(bank);
}

PatternBank load_pattern_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::DataFormat, "cannot open pattern bank " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return pattern_bank_from_json(ss.str());
}

}  // namespace errata

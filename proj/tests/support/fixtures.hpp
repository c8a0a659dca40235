#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "errata/exercise_generation.hpp"
#include "errata/pattern_extraction.hpp"
#include "synthetic.hpp"

#ifndef ERRATA_SOURCE_DIR
#define ERRATA_SOURCE_DIR "."
#endif

namespace fixtures {

inline std::filesystem::path source_dir() { return ERRATA_SOURCE_DIR; }

inline errata::PatternBank spanish_patterns() {
  using namespace errata;
  const auto pairs = load_corpus(source_dir() / "data/corpus/es_fixture.tsv");
  return extract_patterns(annotate(pairs, Language::es), GraphemeClusterInventory::builtin(Language::es));
}

inline const errata::Lexicon& spanish_lexicon() {
  static const errata::Lexicon lexicon(errata::Language::es, synthetic::spanish_lexicon(3000, 7));
  return lexicon;
}

// A small bank with `per_level` exercises at each level.
inline errata::ExerciseBank small_bank(std::size_t per_level = 12, std::uint64_t seed = 5) {
  errata::GenerationOptions options;
  options.seed = seed;
  return errata::generate_bank(spanish_lexicon(), spanish_patterns(), errata::Quota::per_level(per_level), options);
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("errata_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

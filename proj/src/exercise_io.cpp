#include <fstream>
#include <sstream>

#include "errata/error.hpp"
#include "errata/exercise_generation.hpp"
#include "errata/unicode.hpp"
#include "json.hpp"

namespace errata {

using nlohmann::json;

namespace {

json gap_json(const std::optional<Gap>& gap) {
  if (!gap) return nullptr;
  return json::array({gap->begin, gap->end});
}

json exercise_json(const Exercise& ex) {
  const auto& p = ex.profile;
  const auto& src = ex.provenance;
  return {{"id", ex.id},
          {"type", to_string(ex.type)},
          {"language", to_string(ex.language)},
          {"target", ex.target},
          {"stem", ex.stem},
          {"gap", gap_json(ex.gap)},
          {"choices", ex.choices},
          {"solution",
           {{"text", ex.solution.text},
            {"position", ex.solution.position ? json(*ex.solution.position) : json(nullptr)}}},
          {"level", to_string(ex.level)},
          {"profile",
           {{"frequency_rank", p.frequency_rank},
            {"length", p.length},
            {"ortho_neighbors", p.ortho_neighbors},
            {"phon_neighbors", p.phon_neighbors},
            {"morph_complexity", p.morph_complexity},
            {"composite", p.composite}}},
          {"provenance",
           {{"type", to_string(src.type)},
            {"focus", src.focus},
            {"written", src.written},
            {"left", src.left},
            {"right", src.right}}},
          {"from_corpus", ex.from_corpus}};
}

Exercise exercise_from(const json& j) {
  Exercise ex;
  ex.id = j.at("id").get<std::string>();
  ex.type = parse_exercise_type(j.at("type").get<std::string>());
  ex.language = parse_language(j.at("language").get<std::string>());
  ex.target = j.at("target").get<std::string>();
  ex.stem = j.at("stem").get<std::string>();
  if (const auto& g = j.at("gap"); !g.is_null()) ex.gap = Gap{g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>()};
  ex.choices = j.at("choices").get<std::vector<std::string>>();
  const auto& sol = j.at("solution");
  ex.solution.text = sol.at("text").get<std::string>();
  if (!sol.at("position").is_null()) ex.solution.position = sol.at("position").get<std::size_t>();
  ex.level = parse_level(j.at("level").get<std::string>());
  const auto& p = j.at("profile");
  ex.profile = {p.at("frequency_rank").get<std::size_t>(), p.at("length").get<std::size_t>(),
                p.at("ortho_neighbors").get<std::size_t>(), p.at("phon_neighbors").get<std::size_t>(),
                p.at("morph_complexity").get<std::size_t>(), p.at("composite").get<double>()};
  const auto& src = j.at("provenance");
  ex.provenance.type = parse_error_type(src.at("type").get<std::string>());
  ex.provenance.focus = src.at("focus").get<std::string>();
  ex.provenance.written = src.at("written").get<std::string>();
  ex.provenance.left = src.at("left").get<std::string>();
  ex.provenance.right = src.at("right").get<std::string>();
  ex.from_corpus = j.at("from_corpus").get<bool>();
  return ex;
}

}  // namespace

std::string to_json(const ExerciseBank& bank) {
  json exercises = json::array();
  for (const auto& ex : bank.exercises) exercises.push_back(exercise_json(ex));
  json cuts = json::object();
  for (const auto& [type, c] : bank.cuts) cuts[std::string(to_string(type))] = c.upper;
  json shortfall = json::array();
  for (const auto& s : bank.shortfall) {
    shortfall.push_back({{"type", to_string(s.type)},
                         {"level", to_string(s.level)},
                         {"wanted", s.wanted},
                         {"produced", s.produced}});
  }
  const json doc = {{"version", ExerciseBank::kVersion},
                    {"language", to_string(bank.language)},
                    {"seed", bank.seed},
                    {"pattern_fingerprint", bank.pattern_fingerprint},
                    {"level_cuts", cuts},
                    {"shortfall", shortfall},
                    {"exercises", exercises}};
  return doc.dump(1) + "\n";
}

ExerciseBank exercise_bank_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.at("version").get<int>() != ExerciseBank::kVersion) {
      throw Error(Errc::DataFormat, "unsupported exercise bank version");
    }
    ExerciseBank bank;
    bank.language = parse_language(doc.at("language").get<std::string>());
    bank.seed = doc.at("seed").get<std::uint64_t>();
    bank.pattern_fingerprint = doc.at("pattern_fingerprint").get<std::string>();
    for (const auto& [name, c] : doc.at("level_cuts").items()) {
      LevelCuts cuts;
      cuts.upper = c.get<decltype(cuts.upper)>();
      bank.cuts[parse_exercise_type(name)] = cuts;
    }
    for (const auto& s : doc.at("shortfall")) {
      bank.shortfall.push_back({parse_exercise_type(s.at("type").get<std::string>()),
                                parse_level(s.at("level").get<std::string>()), s.at("wanted").get<std::size_t>(),
                                s.at("produced").get<std::size_t>()});
    }
    for (const auto& j : doc.at("exercises")) bank.exercises.push_back(exercise_from(j));
    return bank;
  } catch (const json::exception& e) {
    throw Error(Errc::DataFormat, std::string("malformed exercise bank: ") + e.what());
  }
}

void save(const ExerciseBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::DataFormat, "cannot write " + path.string());
  out << to_json(bank);
}

ExerciseBank load_exercise_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::DataFormat, "cannot open exercise bank " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return exercise_bank_from_json(ss.str());
}

std::string public_view_json(const Exercise& ex) {
  json letters = json::array();
  for (char32_t c : unicode::decode(ex.stem)) letters.push_back(unicode::encode(c));
  const json view = {{"id", ex.id},
                     {"type", to_string(ex.type)},
                     {"language", to_string(ex.language)},
                     {"level", to_string(ex.level)},
                     {"stem", ex.stem},
                     {"letters", letters},
                     {"gap", gap_json(ex.gap)},
                     {"choices", ex.choices}};
  return view.dump();
}

}  // namespace errata

#include <algorithm>

#include "errata/error.hpp"
#include "errata/service.hpp"

namespace errata {

std::string_view to_string(AgeGroup group) noexcept { return group == AgeGroup::junior ? "junior" : "senior"; }

AgeGroup parse_age_group(std::string_view name) {
  if (name == "junior") return AgeGroup::junior;
  if (name == "senior") return AgeGroup::senior;
  throw Error(Errc::InvalidRequest, "age_group must be junior or senior");
}

namespace {

std::size_t type_index(ExerciseType type) {
  const auto* it = std::find(std::begin(kAllExerciseTypes), std::end(kAllExerciseTypes), type);
  return static_cast<std::size_t>(it - std::begin(kAllExerciseTypes));
}

void earn(ProgressState& s, ProgressDelta& d, const std::string& badge) {
  if (std::find(s.achievements.begin(), s.achievements.end(), badge) != s.achievements.end()) return;
  s.achievements.push_back(badge);
  d.new_achievements.push_back(badge);
}

}  // namespace

ProgressDelta apply_answer(ProgressState& s, ExerciseType type, bool correct, const ProgressionRule& rule) {
  ProgressDelta d;
  d.level_before = s.current_level;
  auto& t = s.totals[type_index(type)];
  ++t.answered;
  ++s.answered;
  if (correct) {
    ++t.correct;
    ++s.correct;
    ++s.streak;
    s.best_streak = std::max(s.best_streak, s.streak);
  } else {
    s.streak = 0;
  }

  s.window.push_back(correct);
  while (s.window.size() > rule.window) s.window.pop_front();
  if (rule.window > 0 && s.window.size() == rule.window) {
    const auto hits = static_cast<double>(std::count(s.window.begin(), s.window.end(), true));
    const auto n = static_cast<double>(s.window.size());
    const auto level = static_cast<int>(s.current_level);
    if (hits >= rule.promote_at * n - 1e-9 && level + 1 < static_cast<int>(kLevelCount)) {
      s.current_level = static_cast<DifficultyLevel>(level + 1);
      s.window.clear();
    } else if (hits < rule.demote_below * n - 1e-9 && level > 0) {
      s.current_level = static_cast<DifficultyLevel>(level - 1);
      s.window.clear();
    }
  }
  d.level_after = s.current_level;

  if (s.streak >= 5) earn(s, d, "streak-5");
  if (s.streak >= 10) earn(s, d, "streak-10");
  if (s.correct >= 50) earn(s, d, "total-50");
  if (s.correct >= 100) earn(s, d, "total-100");
  if (d.level_after > d.level_before) earn(s, d, "level-up-" + std::string(to_string(d.level_after)));
  return d;
}

}  // namespace errata

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errata/exercise_generation.hpp"

namespace errata {

enum class AgeGroup { junior, senior };
std::string_view to_string(AgeGroup group) noexcept;
AgeGroup parse_age_group(std::string_view name);

struct Player {
  std::string id;
  std::string display_name;
  Language language = Language::es;
  AgeGroup age_group = AgeGroup::junior;

  friend bool operator==(const Player&, const Player&) = default;
};

struct ProgressionRule {
  std::size_t window = 20;
  double promote_at = 0.8;  // share correct in a full window
  double demote_below = 0.4;
};

struct TypeTotals {
  std::uint64_t answered = 0;
  std::uint64_t correct = 0;

  friend bool operator==(const TypeTotals&, const TypeTotals&) = default;
};

struct ProgressState {
  std::string player_id;
  DifficultyLevel current_level = DifficultyLevel::Initial;
  std::deque<bool> window;  // most recent outcome last; cleared on a level change
  std::array<TypeTotals, std::size(kAllExerciseTypes)> totals{};
  std::uint64_t answered = 0;
  std::uint64_t correct = 0;
  std::uint64_t streak = 0;
  std::uint64_t best_streak = 0;
  std::vector<std::string> achievements;  // in the order earned

  friend bool operator==(const ProgressState&, const ProgressState&) = default;
};

struct ProgressDelta {
  DifficultyLevel level_before = DifficultyLevel::Initial;
  DifficultyLevel level_after = DifficultyLevel::Initial;
  std::vector<std::string> new_achievements;
};

/// Folds one answer into the state. The level moves at most one step.
ProgressDelta apply_answer(ProgressState& state, ExerciseType type, bool correct,
                           const ProgressionRule& rule = {});

std::string to_json(const ProgressState& state);

// --- event log -----------------------------------------------------------

/// One line of the append-only log. `body` holds the kind-specific fields.
struct Event {
  std::uint64_t seq = 0;
  std::string kind;  // player_created, session_started, exercise_issued, answer
  std::int64_t at = 0;  // milliseconds since the epoch
  std::string body;     // JSON object text
};

struct Session {
  std::string id;
  std::string player_id;
  std::int64_t started_at = 0;
  std::int64_t game_length_s = 20 * 60;  // recorded only
  bool active = true;
  std::size_t next_type = 0;  // round-robin cursor
  std::map<std::string, std::int64_t> issued;  // exercise id -> issued at
  std::set<std::string> answered;
  std::int64_t last_at = 0;
};

/// Everything the service knows, rebuilt by folding events in order.
struct ServiceState {
  std::uint64_t seq = 0;
  std::map<std::string, Player> players;
  std::map<std::string, Session> sessions;
  std::map<std::string, ProgressState> progress;
  ProgressionRule rule;

  /// Throws Error(CorruptLog) when the event does not fit the state.
  ProgressDelta apply(const Event& event);
};

/// Parses a JSON-lines log. Throws Error(CorruptLog) naming the line.
std::vector<Event> read_events(std::istream& in);
ServiceState replay_state(std::istream& log, const ProgressionRule& rule = {});
std::map<std::string, ProgressState> replay(std::istream& log, const ProgressionRule& rule = {});
std::map<std::string, ProgressState> replay(const std::filesystem::path& log, const ProgressionRule& rule = {});

std::string event_line(const Event& event);

// --- trainer -------------------------------------------------------------

struct Verdict {
  bool correct = false;
  std::string solution;  // the target word or phrase
  ProgressDelta delta;
  ProgressState progress;
};

struct TrainerOptions {
  ProgressionRule rule;
  std::size_t snapshot_every = 200;  // events between snapshots; 0 disables
  std::function<std::int64_t()> clock;  // defaults to the system clock in ms
};

/// Serves a bank to players. With a store directory every event is appended
/// to events.jsonl and fsynced before the call returns; the state is
/// restored from snapshot.json plus the log tail on construction.
/// All methods are serialized by one mutex.
class Trainer {
 public:
  Trainer(ExerciseBank bank, std::optional<std::filesystem::path> store, TrainerOptions options = {});
  ~Trainer();
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// `id` may be empty to get a generated one. Throws Error(InvalidRequest) on a taken id.
  Player create_player(std::string id, std::string display_name, Language language, AgeGroup age_group);
  /// Ends the player's previous session. Throws Error(UnknownPlayer).
  Session start_session(const std::string& player_id, std::int64_t game_length_s = 20 * 60);
  /// Throws Error(UnknownSession), Error(BankExhausted).
  const Exercise& next_exercise(const std::string& session_id);
  /// Throws Error(UnknownSession), Error(UnknownExercise), Error(DuplicateAnswer).
  Verdict submit_answer(const std::string& session_id, const std::string& exercise_id, const Response& response);

  /// Throws Error(UnknownPlayer).
  ProgressState progress(const std::string& player_id) const;
  std::map<std::string, ProgressState> all_progress() const;
  std::uint64_t events() const;
  const ExerciseBank& bank() const noexcept { return bank_; }
  void snapshot();

 private:
  ProgressDelta commit(Event event);
  std::int64_t now() const;

  ExerciseBank bank_;
  std::map<std::string, const Exercise*> by_id_;
  std::map<std::pair<DifficultyLevel, ExerciseType>, std::vector<const Exercise*>> by_slot_;
  std::optional<std::filesystem::path> store_;
  TrainerOptions options_;
  ServiceState state_;
  int log_fd_ = -1;
  std::uint64_t snapshot_seq_ = 0;
  mutable std::mutex mutex_;
};

std::string to_json(const ServiceState& state);
ServiceState service_state_from_json(std::string_view text);

}  // namespace errata

#include "errata/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "errata/error.hpp"
#include "json.hpp"

namespace errata {

using nlohmann::json;

namespace {

std::size_t type_index(ExerciseType type) {
  const auto* it = std::find(std::begin(kAllExerciseTypes), std::end(kAllExerciseTypes), type);
  return static_cast<std::size_t>(it - std::begin(kAllExerciseTypes));
}

json progress_json(const ProgressState& s) {
  json totals = json::object();
  for (std::size_t k = 0; k < s.totals.size(); ++k) {
    totals[std::string(to_string(kAllExerciseTypes[k]))] = {{"answered", s.totals[k].answered},
                                                            {"correct", s.totals[k].correct}};
  }
  return {{"player_id", s.player_id},
          {"current_level", to_string(s.current_level)},
          {"window", json(std::vector<bool>(s.window.begin(), s.window.end()))},
          {"totals", totals},
          {"answered", s.answered},
          {"correct", s.correct},
          {"streak", s.streak},
          {"best_streak", s.best_streak},
          {"achievements", s.achievements}};
}

ProgressState progress_from(const json& j) {
  ProgressState s;
  s.player_id = j.at("player_id").get<std::string>();
  s.current_level = parse_level(j.at("current_level").get<std::string>());
  for (bool b : j.at("window")) s.window.push_back(b);
  for (std::size_t k = 0; k < s.totals.size(); ++k) {
    const auto& t = j.at("totals").at(std::string(to_string(kAllExerciseTypes[k])));
    s.totals[k] = {t.at("answered").get<std::uint64_t>(), t.at("correct").get<std::uint64_t>()};
  }
  s.answered = j.at("answered").get<std::uint64_t>();
  s.correct = j.at("correct").get<std::uint64_t>();
  s.streak = j.at("streak").get<std::uint64_t>();
  s.best_streak = j.at("best_streak").get<std::uint64_t>();
  s.achievements = j.at("achievements").get<std::vector<std::string>>();
  return s;
}

[[noreturn]] void corrupt(std::uint64_t seq, const std::string& what) {
  throw Error(Errc::CorruptLog, "event " + std::to_string(seq) + ": " + what);
}

}  // namespace

std::string to_json(const ProgressState& state) { return progress_json(state).dump(); }

// --- reducer -------------------------------------------------------------

ProgressDelta ServiceState::apply(const Event& e) {
  if (e.seq != seq + 1) corrupt(e.seq, "expected sequence number " + std::to_string(seq + 1));
  json b;
  try {
    b = json::parse(e.body);
  } catch (const json::exception&) {
    corrupt(e.seq, "body is not JSON");
  }
  ProgressDelta delta;
  try {
    if (e.kind == "player_created") {
      Player p;
      p.id = b.at("player_id").get<std::string>();
      p.display_name = b.at("display_name").get<std::string>();
      p.language = parse_language(b.at("language").get<std::string>());
      p.age_group = parse_age_group(b.at("age_group").get<std::string>());
      if (players.count(p.id)) corrupt(e.seq, "player " + p.id + " already exists");
      ProgressState st;
      st.player_id = p.id;
      progress.emplace(p.id, std::move(st));
      players.emplace(p.id, std::move(p));
    } else if (e.kind == "session_started") {
      Session s;
      s.id = b.at("session_id").get<std::string>();
      s.player_id = b.at("player_id").get<std::string>();
      s.game_length_s = b.at("game_length_s").get<std::int64_t>();
      s.started_at = e.at;
      s.last_at = e.at;
      if (!players.count(s.player_id)) corrupt(e.seq, "unknown player " + s.player_id);
      if (sessions.count(s.id)) corrupt(e.seq, "session " + s.id + " already exists");
      for (auto& [id, other] : sessions) {
        if (other.player_id == s.player_id) other.active = false;
      }
      sessions.emplace(s.id, std::move(s));
    } else if (e.kind == "exercise_issued") {
      const auto sid = b.at("session_id").get<std::string>();
      const auto xid = b.at("exercise_id").get<std::string>();
      const auto type = parse_exercise_type(b.at("type").get<std::string>());
      const auto it = sessions.find(sid);
      if (it == sessions.end() || !it->second.active) corrupt(e.seq, "no active session " + sid);
      auto& s = it->second;
      if (e.at < s.last_at) corrupt(e.seq, "timestamp goes backwards");
      if (!s.issued.emplace(xid, e.at).second) corrupt(e.seq, "exercise " + xid + " issued twice");
      s.next_type = (type_index(type) + 1) % std::size(kAllExerciseTypes);
      s.last_at = e.at;
    } else if (e.kind == "answer") {
      const auto sid = b.at("session_id").get<std::string>();
      const auto xid = b.at("exercise_id").get<std::string>();
      const auto type = parse_exercise_type(b.at("type").get<std::string>());
      const bool correct = b.at("correct").get<bool>();
      const auto it = sessions.find(sid);
      if (it == sessions.end()) corrupt(e.seq, "unknown session " + sid);
      auto& s = it->second;
      if (e.at < s.last_at) corrupt(e.seq, "timestamp goes backwards");
      if (!s.issued.count(xid)) corrupt(e.seq, "exercise " + xid + " was not issued");
      if (!s.answered.insert(xid).second) corrupt(e.seq, "exercise " + xid + " answered twice");
      s.last_at = e.at;
      delta = apply_answer(progress.at(s.player_id), type, correct, rule);
    } else {
      corrupt(e.seq, "unknown kind '" + e.kind + "'");
    }
  } catch (const json::exception& x) {
    corrupt(e.seq, std::string("malformed ") + e.kind + ": " + x.what());
  } catch (const Error& x) {
    if (x.code() == Errc::CorruptLog) throw;
    corrupt(e.seq, x.what());
  }
  seq = e.seq;
  return delta;
}

// --- log -----------------------------------------------------------------

std::string event_line(const Event& e) {
  json j = json::parse(e.body);
  j["seq"] = e.seq;
  j["kind"] = e.kind;
  j["at"] = e.at;
  return j.dump() + "\n";
}

std::vector<Event> read_events(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  std::vector<Event> out;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    ++line_no;
    const auto end = text.find('\n', pos);
    const auto where = "line " + std::to_string(line_no);
    // a complete record always ends with a newline
    if (end == std::string::npos) throw Error(Errc::CorruptLog, where + ": truncated event");
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      Event e;
      e.seq = j.at("seq").get<std::uint64_t>();
      e.kind = j.at("kind").get<std::string>();
      e.at = j.at("at").get<std::int64_t>();
      j.erase("seq");
      j.erase("kind");
      j.erase("at");
      e.body = j.dump();
      out.push_back(std::move(e));
    } catch (const json::exception&) {
      throw Error(Errc::CorruptLog, where + ": malformed event");
    }
  }
  return out;
}

ServiceState replay_state(std::istream& log, const ProgressionRule& rule) {
  ServiceState state;
  state.rule = rule;
  std::size_t line = 0;
  for (const auto& e : read_events(log)) {
    ++line;
    try {
      state.apply(e);
    } catch (const Error& x) {
      throw Error(Errc::CorruptLog, "line " + std::to_string(line) + ": " + x.what());
    }
  }
  return state;
}

std::map<std::string, ProgressState> replay(std::istream& log, const ProgressionRule& rule) {
  return replay_state(log, rule).progress;
}

std::map<std::string, ProgressState> replay(const std::filesystem::path& path, const ProgressionRule& rule) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::DataFormat, "cannot open event log " + path.string());
  return replay(in, rule);
}

// --- snapshot ------------------------------------------------------------

std::string to_json(const ServiceState& st) {
  json players = json::array();
  for (const auto& [id, p] : st.players) {
    players.push_back({{"player_id", p.id},
                       {"display_name", p.display_name},
                       {"language", to_string(p.language)},
                       {"age_group", to_string(p.age_group)}});
  }
  json sessions = json::array();
  for (const auto& [id, s] : st.sessions) {
    json issued = json::object();
    for (const auto& [x, at] : s.issued) issued[x] = at;
    sessions.push_back({{"session_id", s.id},
                        {"player_id", s.player_id},
                        {"started_at", s.started_at},
                        {"game_length_s", s.game_length_s},
                        {"active", s.active},
                        {"next_type", s.next_type},
                        {"issued", issued},
                        {"answered", s.answered},
                        {"last_at", s.last_at}});
  }
  json progress = json::array();
  for (const auto& [id, p] : st.progress) progress.push_back(progress_json(p));
  return json{{"seq", st.seq}, {"players", players}, {"sessions", sessions}, {"progress", progress}}.dump() + "\n";
}

ServiceState service_state_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    ServiceState st;
    st.seq = j.at("seq").get<std::uint64_t>();
    for (const auto& p : j.at("players")) {
      Player pl{p.at("player_id").get<std::string>(), p.at("display_name").get<std::string>(),
                parse_language(p.at("language").get<std::string>()),
                parse_age_group(p.at("age_group").get<std::string>())};
      st.players.emplace(pl.id, pl);
    }
    for (const auto& s : j.at("sessions")) {
      Session se;
      se.id = s.at("session_id").get<std::string>();
      se.player_id = s.at("player_id").get<std::string>();
      se.started_at = s.at("started_at").get<std::int64_t>();
      se.game_length_s = s.at("game_length_s").get<std::int64_t>();
      se.active = s.at("active").get<bool>();
      se.next_type = s.at("next_type").get<std::size_t>();
      for (const auto& [x, at] : s.at("issued").items()) se.issued[x] = at.get<std::int64_t>();
      for (const auto& x : s.at("answered")) se.answered.insert(x.get<std::string>());
      se.last_at = s.at("last_at").get<std::int64_t>();
      st.sessions.emplace(se.id, std::move(se));
    }
    for (const auto& p : j.at("progress")) {
      auto ps = progress_from(p);
      st.progress.emplace(ps.player_id, std::move(ps));
    }
    return st;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptLog, std::string("malformed snapshot: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::CorruptLog, std::string("malformed snapshot: ") + e.what());
  }
}

// --- trainer -------------------------------------------------------------

namespace {

void write_all(int fd, const std::string& data, const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::DataFormat, "cannot write " + path.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

void write_file_durably(const std::filesystem::path& path, const std::string& data) {
  const auto tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(Errc::DataFormat, "cannot write " + tmp + ": " + std::strerror(errno));
  write_all(fd, data, tmp);
  ::fsync(fd);
  ::close(fd);
  std::filesystem::rename(tmp, path);
}

}  // namespace

Trainer::Trainer(ExerciseBank bank, std::optional<std::filesystem::path> store, TrainerOptions options)
    : bank_(std::move(bank)), store_(std::move(store)), options_(std::move(options)) {
  for (const auto& ex : bank_.exercises) {
    by_id_[ex.id] = &ex;
    by_slot_[{ex.level, ex.type}].push_back(&ex);
  }
  state_.rule = options_.rule;
  if (!store_) return;

  std::filesystem::create_directories(*store_);
  const auto snap = *store_ / "snapshot.json";
  const auto log = *store_ / "events.jsonl";
  if (std::filesystem::exists(snap)) {
    std::ifstream in(snap, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    state_ = service_state_from_json(ss.str());
    state_.rule = options_.rule;
    snapshot_seq_ = state_.seq;
  }
  if (std::filesystem::exists(log)) {
    std::ifstream in(log, std::ios::binary);
    std::size_t line = 0;
    for (const auto& e : read_events(in)) {
      ++line;
      if (e.seq <= state_.seq) continue;
      try {
        state_.apply(e);
      } catch (const Error& x) {
        throw Error(Errc::CorruptLog, log.string() + " line " + std::to_string(line) + ": " + x.what());
      }
    }
  }
  log_fd_ = ::open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (log_fd_ < 0) throw Error(Errc::DataFormat, "cannot open " + log.string() + ": " + std::strerror(errno));
}

Trainer::~Trainer() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

std::int64_t Trainer::now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

ProgressDelta Trainer::commit(Event event) {
  event.seq = state_.seq + 1;
  if (log_fd_ >= 0) {
    const auto line = event_line(event);
    write_all(log_fd_, line, *store_ / "events.jsonl");
    if (::fsync(log_fd_) != 0) throw Error(Errc::DataFormat, std::string("fsync failed: ") + std::strerror(errno));
  }
  auto delta = state_.apply(event);
  if (store_ && options_.snapshot_every > 0 && state_.seq - snapshot_seq_ >= options_.snapshot_every) {
    write_file_durably(*store_ / "snapshot.json", to_json(state_));
    snapshot_seq_ = state_.seq;
  }
  return delta;
}

void Trainer::snapshot() {
  std::lock_guard lock(mutex_);
  if (!store_) return;
  write_file_durably(*store_ / "snapshot.json", to_json(state_));
  snapshot_seq_ = state_.seq;
}

Player Trainer::create_player(std::string id, std::string display_name, Language language, AgeGroup age_group) {
  std::lock_guard lock(mutex_);
  if (id.empty()) {
    for (std::size_t k = state_.players.size() + 1;; ++k) {
      id = "p" + std::to_string(k);
      if (!state_.players.count(id)) break;
    }
  } else if (state_.players.count(id)) {
    throw Error(Errc::InvalidRequest, "player " + id + " already exists");
  }
  Player p{id, std::move(display_name), language, age_group};
  commit({0, "player_created", now(),
          json{{"player_id", p.id},
               {"display_name", p.display_name},
               {"language", to_string(p.language)},
               {"age_group", to_string(p.age_group)}}
              .dump()});
  return p;
}

Session Trainer::start_session(const std::string& player_id, std::int64_t game_length_s) {
  std::lock_guard lock(mutex_);
  if (!state_.players.count(player_id)) throw Error(Errc::UnknownPlayer, "no player " + player_id);
  if (game_length_s <= 0) throw Error(Errc::InvalidRequest, "game_length_s must be positive");
  std::string id;
  for (std::size_t k = state_.sessions.size() + 1;; ++k) {
    id = "s" + std::to_string(k);
    if (!state_.sessions.count(id)) break;
  }
  commit({0, "session_started", now(),
          json{{"session_id", id}, {"player_id", player_id}, {"game_length_s", game_length_s}}.dump()});
  return state_.sessions.at(id);
}

const Exercise& Trainer::next_exercise(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  const auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end() || !it->second.active) {
    throw Error(Errc::UnknownSession, "no active session " + session_id);
  }
  const auto& s = it->second;
  const auto level = state_.progress.at(s.player_id).current_level;
  const auto types = std::size(kAllExerciseTypes);
  for (std::size_t step = 0; step < types; ++step) {
    const auto type = kAllExerciseTypes[(s.next_type + step) % types];
    const auto slot = by_slot_.find({level, type});
    if (slot == by_slot_.end()) continue;
    for (const auto* ex : slot->second) {
      if (s.issued.count(ex->id)) continue;
      commit({0, "exercise_issued", std::max(now(), s.last_at),
              json{{"session_id", session_id}, {"exercise_id", ex->id}, {"type", to_string(type)},
                   {"level", to_string(level)}}
                  .dump()});
      return *ex;
    }
  }
  throw Error(Errc::BankExhausted, "no unseen " + std::string(to_string(level)) + " exercise left in session " +
                                       session_id);
}

Verdict Trainer::submit_answer(const std::string& session_id, const std::string& exercise_id,
                               const Response& response) {
  std::lock_guard lock(mutex_);
  const auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) throw Error(Errc::UnknownSession, "no session " + session_id);
  const auto& s = it->second;
  const auto issued = s.issued.find(exercise_id);
  const auto ex_it = by_id_.find(exercise_id);
  if (issued == s.issued.end() || ex_it == by_id_.end()) {
    throw Error(Errc::UnknownExercise, "exercise " + exercise_id + " was not issued in session " + session_id);
  }
  if (s.answered.count(exercise_id)) throw Error(Errc::DuplicateAnswer, "exercise " + exercise_id + " already answered");
  const auto& ex = *ex_it->second;
  const bool correct = is_correct(ex, response);
  const auto at = std::max(now(), s.last_at);
  json resp = {{"text", response.text}, {"position", response.position ? json(*response.position) : json(nullptr)}};
  Verdict v;
  v.correct = correct;
  v.solution = ex.target;
  v.delta = commit({0, "answer", at,
                    json{{"session_id", session_id},
                         {"player_id", s.player_id},
                         {"exercise_id", exercise_id},
                         {"type", to_string(ex.type)},
                         {"level", to_string(ex.level)},
                         {"response", resp},
                         {"correct", correct},
                         {"latency_ms", at - issued->second}}
                        .dump()});
  v.progress = state_.progress.at(it->second.player_id);
  return v;
}

ProgressState Trainer::progress(const std::string& player_id) const {
  std::lock_guard lock(mutex_);
  const auto it = state_.progress.find(player_id);
  if (it == state_.progress.end()) throw Error(Errc::UnknownPlayer, "no player " + player_id);
  return it->second;
}

std::map<std::string, ProgressState> Trainer::all_progress() const {
  std::lock_guard lock(mutex_);
  return state_.progress;
}

std::uint64_t Trainer::events() const {
  std::lock_guard lock(mutex_);
  return state_.seq;
}

}  // namespace errata

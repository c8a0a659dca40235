#include "errata/http_api.hpp"

#include "errata/exercise_generation.hpp"
#include "httplib.h"
#include "json.hpp"

namespace errata {

using nlohmann::json;

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownPlayer:
    case Errc::UnknownSession:
    case Errc::UnknownExercise:
      return 404;
    case Errc::DuplicateAnswer:
    case Errc::BankExhausted:
      return 409;
    case Errc::CorruptLog:
      return 500;
    default:
      return 400;
  }
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, json{{"error", code}, {"message", message}});
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::InvalidRequest, "request body must be a JSON object");
  return j;
}

template <typename T>
T field(const json& j, const char* name, T fallback) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::InvalidRequest, std::string("field '") + name + "' has the wrong type");
  }
}

// Runs a handler, turning library errors into structured error replies.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      fail(res, http_status(e.code()), e.name(), e.what());
    } catch (const json::exception& e) {
      fail(res, 400, "InvalidRequest", e.what());
    }
  };
}

json player_json(const Player& p) {
  return {{"player_id", p.id},
          {"display_name", p.display_name},
          {"language", to_string(p.language)},
          {"age_group", to_string(p.age_group)}};
}

}  // namespace

void mount_api(httplib::Server& server, Trainer& trainer) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/api/healthz", guarded([&trainer](const httplib::Request&, httplib::Response& res) {
               reply(res, 200,
                     json{{"status", "ok"},
                          {"language", to_string(trainer.bank().language)},
                          {"exercises", trainer.bank().exercises.size()},
                          {"events", trainer.events()}});
             }));

  server.Post("/api/players", guarded([&trainer](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                const auto p = trainer.create_player(
                    field<std::string>(b, "player_id", ""), field<std::string>(b, "display_name", ""),
                    parse_language(field<std::string>(b, "language", std::string(to_string(trainer.bank().language)))),
                    parse_age_group(field<std::string>(b, "age_group", "junior")));
                reply(res, 201, player_json(p));
              }));

  server.Post("/api/sessions", guarded([&trainer](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                const auto player = field<std::string>(b, "player_id", "");
                if (player.empty()) throw Error(Errc::InvalidRequest, "player_id is required");
                const auto s = trainer.start_session(player, field<std::int64_t>(b, "game_length_s", 20 * 60));
                reply(res, 201,
                      json{{"session_id", s.id},
                           {"player_id", s.player_id},
                           {"started_at", s.started_at},
                           {"game_length_s", s.game_length_s}});
              }));

  server.Get(R"(/api/sessions/([^/]+)/next)",
             guarded([&trainer](const httplib::Request& req, httplib::Response& res) {
               const auto& ex = trainer.next_exercise(req.matches[1].str());
               res.status = 200;
               res.set_content(public_view_json(ex), "application/json");
             }));

  server.Post(R"(/api/sessions/([^/]+)/answers)",
              guarded([&trainer](const httplib::Request& req, httplib::Response& res) {
                const auto b = body_of(req);
                const auto exercise = field<std::string>(b, "exercise_id", "");
                if (exercise.empty()) throw Error(Errc::InvalidRequest, "exercise_id is required");
                const auto& src = b.contains("response") && b["response"].is_object() ? b["response"] : b;
                Response r;
                r.text = field<std::string>(src, "text", "");
                if (const auto it = src.find("position"); it != src.end() && !it->is_null()) {
                  if (!it->is_number_unsigned()) throw Error(Errc::InvalidRequest, "position must be a non-negative integer");
                  r.position = it->get<std::size_t>();
                }
                const auto v = trainer.submit_answer(req.matches[1].str(), exercise, r);
                reply(res, 200,
                      json{{"correct", v.correct},
                           {"solution", v.solution},
                           {"level_before", to_string(v.delta.level_before)},
                           {"level_after", to_string(v.delta.level_after)},
                           {"new_achievements", v.delta.new_achievements},
                           {"progress", json::parse(to_json(v.progress))}});
              }));

  server.Get(R"(/api/players/([^/]+)/progress)",
             guarded([&trainer](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, json::parse(to_json(trainer.progress(req.matches[1].str()))));
             }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      fail(res, res.status, res.status == 404 ? "NotFound" : "HttpError", "no such route");
    }
  });
}

}  // namespace errata

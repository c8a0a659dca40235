#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "errata/error.hpp"
#include "errata/evaluation_metrics.hpp"
#include "errata/exercise_generation.hpp"
#include "errata/http_api.hpp"
#include "errata/pattern_extraction.hpp"
#include "errata/service.hpp"
#include "errata/study_stats.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace errata;
using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::DataFormat, "cannot write " + path);
  out << text;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int serve(const std::string& bank_path, const std::string& store, const std::string& host, int port) {
  // handle termination on a dedicated thread so the server can stop cleanly
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Trainer trainer(load_exercise_bank(bank_path), store.empty() ? std::nullopt : std::optional<std::filesystem::path>(store));
  httplib::Server server;
  mount_api(server, trainer);
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(Errc::InvalidRequest, "cannot listen on " + host + ":" + std::to_string(port));
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen_after_bind();
  trainer.snapshot();
  // wake the waiter if the server stopped on its own
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"errata: spelling error analysis, exercise banks, scoring and a practice service"};
  app.require_subcommand(1);

  std::string corpus, lang = "es", out, patterns_path, lexicon_path, dialect = "castilian";
  std::size_t per_level = 100;
  std::uint64_t seed = 1;
  bool allow_shortfall = false;
  auto* analyze = app.add_subcommand("analyze", "Extract error patterns from a wrong<TAB>correct corpus");
  analyze->add_option("corpus", corpus, "Corpus TSV")->required();
  analyze->add_option("--lang", lang, "Language: es or en");
  analyze->add_option("--out", out, "Output pattern bank (default stdout)");

  auto* generate = app.add_subcommand("generate", "Generate an exercise bank");
  generate->add_option("--patterns", patterns_path, "Pattern bank JSON")->required();
  generate->add_option("--lexicon", lexicon_path, "Frequency lexicon TSV")->required();
  generate->add_option("--per-level", per_level, "Exercises per difficulty level");
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--dialect", dialect, "castilian or seseo");
  generate->add_flag("--allow-shortfall", allow_shortfall, "Write a partial bank instead of failing");
  generate->add_option("--out", out, "Output exercise bank (default stdout)");

  std::string ref, hyp;
  auto* dictation = app.add_subcommand("score-dictation", "Score a dictation transcript");
  auto* reading = app.add_subcommand("score-reading", "Score a read-aloud transcript");
  for (auto* sub : {dictation, reading}) {
    sub->add_option("--ref", ref, "Reference text, one line per sentence")->required();
    sub->add_option("--hyp", hyp, "Transcript, line-aligned with the reference")->required();
    sub->add_option("--lang", lang, "Language: es or en");
  }

  std::string scores;
  double alpha = kNormalityAlpha;
  bool as_json = false;
  auto* stats = app.add_subcommand("stats", "Summarize a crossover study");
  stats->add_option("--scores", scores, "CSV child_id,group,test_index,variable,value")->required();
  stats->add_option("--alpha", alpha, "Shapiro-Wilk gate");
  stats->add_flag("--json", as_json, "Structured output");

  std::string bank_path, store, host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP practice service");
  serve_cmd->add_option("--bank", bank_path, "Exercise bank JSON")->required();
  serve_cmd->add_option("--store", store, "Directory for the event log and snapshot");
  serve_cmd->add_option("--port", port, "Port, 0 for any free port");
  serve_cmd->add_option("--host", host, "Bind address");

  std::string log_path;
  auto* replay_cmd = app.add_subcommand("replay", "Rebuild player progress from an event log");
  replay_cmd->add_option("log", log_path, "events.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*analyze) {
      const auto language = parse_language(lang);
      const auto bank = extract_patterns(annotate(load_corpus(corpus), language),
                                         GraphemeClusterInventory::builtin(language));
      write_output(to_json(bank), out);
      std::cerr << bank.patterns.size() << " patterns, fingerprint " << bank.fingerprint.substr(0, 16) << "\n";
    } else if (*generate) {
      const auto patterns = load_pattern_bank(patterns_path);
      const auto lexicon = Lexicon::load(lexicon_path, patterns.language);
      GenerationOptions options;
      options.seed = seed;
      options.dialect = parse_dialect(dialect);
      options.allow_shortfall = allow_shortfall;
      const auto bank = generate_bank(lexicon, patterns, Quota::per_level(per_level), options);
      write_output(to_json(bank), out);
      std::cerr << bank.exercises.size() << " exercises";
      if (!bank.shortfall.empty()) std::cerr << ", " << bank.shortfall.size() << " slots short";
      std::cerr << "\n";
    } else if (*dictation) {
      const auto s = score_writing(load_token_lines(ref), load_token_lines(hyp), parse_language(lang));
      std::cout << json{{"total_words", s.total_words},
                        {"words_with_errors", s.words_with_errors},
                        {"total_errors", s.total_errors},
                        {"rate_words_with_errors", s.rate_words_with_errors},
                        {"errors_per_word", s.errors_per_word},
                        {"errors_per_wrong_word", optional_json(s.errors_per_wrong_word)},
                        {"added_words", s.added_words},
                        {"omitted_words", s.omitted_words}}
                       .dump(2)
                << "\n";
    } else if (*reading) {
      const auto s = score_reading(load_token_lines(ref), load_token_lines(hyp), parse_language(lang));
      std::cout << json{{"total_words", s.total_words},
                        {"total_errors", s.total_errors},
                        {"errors_per_word", s.errors_per_word},
                        {"added_words", s.added_words},
                        {"omitted_words", s.omitted_words}}
                       .dump(2)
                << "\n";
    } else if (*stats) {
      const auto summary = summarize_study(load_study_csv(scores), alpha);
      std::cout << (as_json ? to_json(summary) : to_text(summary));
    } else if (*serve_cmd) {
      return serve(bank_path, store, host, port);
    } else if (*replay_cmd) {
      json out_json = json::object();
      for (const auto& [id, p] : replay(std::filesystem::path(log_path))) out_json[id] = json::parse(to_json(p));
      std::cout << out_json.dump(2) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}

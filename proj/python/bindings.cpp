#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "errata/error.hpp"
#include "errata/error_analysis.hpp"
#include "errata/evaluation_metrics.hpp"
#include "errata/exercise_generation.hpp"
#include "errata/pattern_extraction.hpp"
#include "errata/service.hpp"
#include "errata/study_stats.hpp"

namespace py = pybind11;
using namespace errata;

namespace {

py::dict instance_dict(const ErrorInstance& i) {
  py::dict d;
  d["type"] = std::string(to_string(i.type));
  d["position"] = i.position;
  d["expected"] = i.expected;
  d["written"] = i.written;
  d["token_index"] = i.token_index;
  return d;
}

py::dict test_dict(const TestResult& r) {
  py::dict d;
  d["method"] = std::string(to_string(r.method));
  d["statistic"] = r.statistic;
  d["p"] = r.p;
  d["n"] = r.n;
  d["effect_r"] = r.effect_r ? py::object(py::float_(*r.effect_r)) : py::none();
  d["df"] = r.df ? py::object(py::int_(*r.df)) : py::none();
  d["z"] = r.z ? py::object(py::float_(*r.z)) : py::none();
  d["exact"] = r.exact;
  if (r.normality) d["normality"] = py::make_tuple(r.normality->W, r.normality->p);
  return d;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_errata, m) {
  m.doc() = "Spelling error analysis, exercise generation, scoring and study statistics";

  // ValueError subclass carrying the machine-readable code in `.code`
  static PyObject* errata_error = py::exception<Error>(m, "ErrataError", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto exc = py::reinterpret_borrow<py::object>(errata_error)(e.what());
      exc.attr("code") = std::string(e.name());
      PyErr_SetObject(errata_error, exc.ptr());
    }
  });

  m.def("damerau_distance", py::overload_cast<std::string_view, std::string_view>(&damerau_distance),
        py::arg("a"), py::arg("b"));

  m.def(
      "align",
      [](const std::string& wrong, const std::string& correct) {
        py::list out;
        for (const auto& op : align(wrong, correct)) {
          py::dict d;
          d["kind"] = std::string(to_string(op.kind));
          d["position"] = op.position;
          d["expected"] = op.expected;
          d["written"] = op.written;
          out.append(d);
        }
        return out;
      },
      py::arg("wrong"), py::arg("correct"));

  m.def(
      "classify_pair",
      [](const std::string& wrong, const std::string& correct, const std::string& language) {
        const auto ann = classify_pair(wrong, correct, parse_language(language));
        py::list instances;
        for (const auto& i : ann.instances) instances.append(instance_dict(i));
        py::dict d;
        d["wrong"] = ann.wrong;
        d["correct"] = ann.correct;
        d["instances"] = instances;
        d["error_count"] = count_errors(ann);
        return d;
      },
      py::arg("wrong"), py::arg("correct"), py::arg("language") = "es");

  m.def(
      "analyze_corpus",
      [](const std::filesystem::path& corpus, const std::string& language) {
        const auto lang = parse_language(language);
        return parse_json(to_json(extract_patterns(annotate(load_corpus(corpus), lang),
                                                   GraphemeClusterInventory::builtin(lang))));
      },
      py::arg("corpus"), py::arg("language") = "es", "Pattern bank of a wrong<TAB>correct corpus, as a dict.");

  m.def(
      "generate_bank",
      [](const std::filesystem::path& patterns, const std::filesystem::path& lexicon, std::size_t per_level,
         std::uint64_t seed, bool allow_shortfall) {
        const auto bank = load_pattern_bank(patterns);
        GenerationOptions options;
        options.seed = seed;
        options.allow_shortfall = allow_shortfall;
        std::string text;
        {
          py::gil_scoped_release release;
          text = to_json(generate_bank(Lexicon::load(lexicon, bank.language), bank, Quota::per_level(per_level),
                                       options));
        }
        return parse_json(text);
      },
      py::arg("patterns"), py::arg("lexicon"), py::arg("per_level"), py::arg("seed") = 1,
      py::arg("allow_shortfall") = false);

  m.def(
      "score_writing",
      [](const std::vector<std::string>& reference, const std::vector<std::string>& transcript,
         const std::string& language) {
        const auto s = score_writing(reference, transcript, parse_language(language));
        py::dict d;
        d["total_words"] = s.total_words;
        d["words_with_errors"] = s.words_with_errors;
        d["total_errors"] = s.total_errors;
        d["rate_words_with_errors"] = s.rate_words_with_errors;
        d["errors_per_word"] = s.errors_per_word;
        d["errors_per_wrong_word"] =
            s.errors_per_wrong_word ? py::object(py::float_(*s.errors_per_wrong_word)) : py::none();
        d["added_words"] = s.added_words;
        d["omitted_words"] = s.omitted_words;
        return d;
      },
      py::arg("reference"), py::arg("transcript"), py::arg("language") = "es");

  m.def(
      "score_reading",
      [](const std::vector<std::string>& reference, const std::vector<std::string>& spoken,
         const std::string& language) {
        const auto s = score_reading(reference, spoken, parse_language(language));
        py::dict d;
        d["total_words"] = s.total_words;
        d["total_errors"] = s.total_errors;
        d["errors_per_word"] = s.errors_per_word;
        d["added_words"] = s.added_words;
        d["omitted_words"] = s.omitted_words;
        return d;
      },
      py::arg("reference"), py::arg("spoken"), py::arg("language") = "es");

  m.def("delta", [](double pre, double post) { return delta(pre, post).change; }, py::arg("pre"), py::arg("post"));

  m.def(
      "shapiro_wilk",
      [](const std::vector<double>& xs) {
        const auto r = shapiro_wilk(xs);
        return py::make_tuple(r.W, r.p);
      },
      py::arg("xs"));
  m.def("paired_t", [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(paired_t(a, b)); },
        py::arg("a"), py::arg("b"));
  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& a, const std::vector<double>& b) { return test_dict(wilcoxon_signed_rank(a, b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "choose_and_run",
      [](const std::vector<double>& a, const std::vector<double>& b, double alpha) {
        return test_dict(choose_and_run(a, b, alpha));
      },
      py::arg("a"), py::arg("b"), py::arg("alpha") = kNormalityAlpha);

  m.def(
      "summarize_study",
      [](const std::filesystem::path& csv, double alpha) {
        return parse_json(to_json(summarize_study(load_study_csv(csv), alpha)));
      },
      py::arg("csv"), py::arg("alpha") = kNormalityAlpha);

  m.def(
      "replay",
      [](const std::filesystem::path& log) {
        py::dict out;
        for (const auto& [id, p] : replay(log)) out[py::str(id)] = parse_json(to_json(p));
        return out;
      },
      py::arg("log"), "Progress per player rebuilt from an events.jsonl log.");
}

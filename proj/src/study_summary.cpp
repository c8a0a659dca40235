#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "errata/error.hpp"
#include "errata/study_stats.hpp"
#include "errata/text_model.hpp"
#include "json.hpp"

namespace errata {

namespace {

constexpr std::string_view kHeader = "child_id,group,test_index,variable,value";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string signed_fmt(double v, int digits) {
  auto s = fmt(v, digits);
  return v >= 0 ? "+" + s : s;
}

}  // namespace

std::vector<StudyRecord> read_study_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<StudyRecord> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != kHeader) throw Error(Errc::DataFormat, "study csv must start with " + std::string(kHeader));
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    const auto where = "study csv line " + std::to_string(line_no);
    if (cells.size() != 5) throw Error(Errc::DataFormat, where + ": expected 5 fields");
    StudyRecord r;
    r.child_id = trim(cells[0]);
    const auto group = trim(cells[1]);
    if (group != "A" && group != "B") throw Error(Errc::DataFormat, where + ": group must be A or B");
    r.group = group[0];
    r.variable = trim(cells[3]);
    if (r.child_id.empty() || r.variable.empty()) throw Error(Errc::DataFormat, where + ": empty field");
    try {
      std::size_t used = 0;
      const auto ti = trim(cells[2]);
      r.test_index = std::stoi(ti, &used);
      if (used != ti.size()) throw std::invalid_argument("test_index");
      const auto vs = trim(cells[4]);
      r.value = std::stod(vs, &used);
      if (used != vs.size() || !std::isfinite(r.value)) throw std::invalid_argument("value");
    } catch (const std::logic_error&) {
      throw Error(Errc::DataFormat, where + ": bad number");
    }
    if (r.test_index < 1 || r.test_index > 3) throw Error(Errc::DataFormat, where + ": test_index must be 1, 2 or 3");
    out.push_back(std::move(r));
  }
  if (!header) throw Error(Errc::DataFormat, "study csv is empty");
  return out;
}

std::vector<StudyRecord> load_study_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::DataFormat, "cannot open " + path.string());
  return read_study_csv(in);
}

std::string to_csv(const std::vector<StudyRecord>& records) {
  std::ostringstream out;
  out << kHeader << '\n' << std::setprecision(17);
  for (const auto& r : records) {
    out << r.child_id << ',' << r.group << ',' << r.test_index << ',' << r.variable << ',' << r.value << '\n';
  }
  return out.str();
}

StudySummary summarize_study(const std::vector<StudyRecord>& records, double alpha) {
  struct Child {
    char group = 0;
    std::map<std::string, std::array<std::optional<double>, 3>> values;
  };
  std::vector<std::string> variables;
  std::vector<std::string> child_order;
  std::map<std::string, Child> children;
  for (const auto& r : records) {
    if (std::find(variables.begin(), variables.end(), r.variable) == variables.end()) variables.push_back(r.variable);
    auto [it, fresh] = children.try_emplace(r.child_id);
    if (fresh) child_order.push_back(r.child_id);
    auto& c = it->second;
    if (c.group != 0 && c.group != r.group) {
      throw Error(Errc::DataFormat, "child " + r.child_id + " appears in both groups");
    }
    c.group = r.group;
    auto& slot = c.values[r.variable][r.test_index - 1];
    if (slot) {
      throw Error(Errc::DataFormat, "duplicate value for child " + r.child_id + ", " + r.variable + ", test " +
                                        std::to_string(r.test_index));
    }
    slot = r.value;
  }

  StudySummary out;
  std::vector<const Child*> included;
  for (const auto& id : child_order) {
    const auto& c = children.at(id);
    std::string missing;
    for (const auto& v : variables) {
      const auto it = c.values.find(v);
      for (int t = 0; t < 3; ++t) {
        if (it == c.values.end() || !it->second[t]) {
          if (!missing.empty()) missing += ", ";
          missing += v + " test " + std::to_string(t + 1);
        }
      }
    }
    if (missing.empty()) {
      included.push_back(&c);
    } else {
      out.excluded.push_back({id, "missing " + missing});
    }
  }
  out.children = included.size();

  for (const auto& v : variables) {
    VariableSummary vs;
    vs.variable = v;
    std::vector<double> exp_pre, exp_post, ctl_pre, ctl_post;
    for (const auto* c : included) {
      const auto& t = c->values.at(v);
      const double t1 = *t[0], t2 = *t[1], t3 = *t[2];
      // A: experimental between tests 1 and 2; B: between 2 and 3
      const bool a = c->group == 'A';
      exp_pre.push_back(a ? t1 : t2);
      exp_post.push_back(a ? t2 : t3);
      ctl_pre.push_back(a ? t2 : t1);
      ctl_post.push_back(a ? t3 : t2);
      vs.experimental_changes.push_back(exp_post.back() - exp_pre.back());
      vs.control_changes.push_back(ctl_post.back() - ctl_pre.back());
    }
    vs.experimental = {mean(exp_pre), mean(exp_post), mean(vs.experimental_changes),
                       sample_sd(vs.experimental_changes)};
    vs.control = {mean(ctl_pre), mean(ctl_post), mean(vs.control_changes), sample_sd(vs.control_changes)};
    vs.data_points = vs.experimental_changes.size() + vs.control_changes.size();
    try {
      vs.test = choose_and_run(vs.experimental_changes, vs.control_changes, alpha);
    } catch (const Error& e) {
      vs.test_error = std::string(e.name());
    }
    out.variables.push_back(std::move(vs));
  }
  return out;
}

std::string to_text(const StudySummary& s) {
  std::ostringstream out;
  out << "children: " << s.children << ", excluded: " << s.excluded.size() << "\n";
  for (const auto& e : s.excluded) out << "  excluded " << e.child_id << ": " << e.reason << "\n";
  std::size_t width = 17;
  for (const auto& v : s.variables) width = std::max(width, v.variable.size() + 2);
  auto cond = [](const ConditionSummary& c) {
    std::ostringstream cell;
    cell << std::setw(8) << fmt(c.pre, 3) << std::setw(8) << fmt(c.post, 3) << std::setw(18)
         << (signed_fmt(c.change, 3) + " (" + fmt(c.change_sd, 3) + ")");
    return cell.str();
  };
  out << std::left << std::setw(static_cast<int>(width)) << "variable" << std::right << std::setw(34)
      << "experimental: pre  post  change (sd)" << std::setw(34) << "control: pre  post  change (sd)"
      << "   n    test\n";
  for (const auto& v : s.variables) {
    out << std::left << std::setw(static_cast<int>(width)) << v.variable << std::right << cond(v.experimental)
        << cond(v.control) << std::setw(5) << v.data_points << "    ";
    if (v.test) {
      const auto& t = *v.test;
      if (t.method == TestMethod::paired_t) {
        out << "t(" << *t.df << ") = " << fmt(t.statistic, 3);
      } else {
        out << "T = " << fmt(t.statistic, 1);
      }
      out << ", p = " << fmt(t.p, 3);
      if (t.effect_r) out << ", r = " << fmt(*t.effect_r, 3);
    } else {
      out << v.test_error;
    }
    out << "\n";
  }
  return out.str();
}

std::string to_json(const StudySummary& s) {
  using nlohmann::json;
  auto cond = [](const ConditionSummary& c) {
    return json{{"pre", c.pre}, {"post", c.post}, {"change", c.change}, {"change_sd", c.change_sd}};
  };
  json vars = json::array();
  for (const auto& v : s.variables) {
    json test = nullptr;
    if (v.test) {
      const auto& t = *v.test;
      test = {{"method", to_string(t.method)}, {"statistic", t.statistic}, {"p", t.p}, {"n", t.n}};
      test["df"] = t.df ? json(*t.df) : json(nullptr);
      test["effect_r"] = t.effect_r ? json(*t.effect_r) : json(nullptr);
      test["z"] = t.z ? json(*t.z) : json(nullptr);
      test["exact"] = t.exact;
      if (t.normality) test["normality"] = {{"W", t.normality->W}, {"p", t.normality->p}};
    }
    json entry = {{"variable", v.variable},
                  {"experimental", cond(v.experimental)},
                  {"control", cond(v.control)},
                  {"data_points", v.data_points},
                  {"test", test}};
    if (!v.test_error.empty()) entry["test_error"] = v.test_error;
    vars.push_back(entry);
  }
  json excluded = json::array();
  for (const auto& e : s.excluded) excluded.push_back({{"child_id", e.child_id}, {"reason", e.reason}});
  return json{{"children", s.children}, {"excluded", excluded}, {"variables", vars}}.dump(2) + "\n";
}

}  // namespace errata

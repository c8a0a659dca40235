#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace errata {

enum class TestMethod { paired_t, wilcoxon };
std::string_view to_string(TestMethod method) noexcept;

struct NormalityResult {
  double W = 1.0;
  double p = 1.0;
};

struct TestResult {
  TestMethod method = TestMethod::paired_t;
  double statistic = 0.0;  // t, or the smaller signed-rank sum T
  double p = 1.0;
  std::optional<double> effect_r;  // wilcoxon only: |Z| / sqrt(N)
  std::optional<int> df;           // paired_t only
  std::optional<double> z;         // wilcoxon only, tie and continuity corrected
  std::size_t n = 0;               // pairs entering the test
  bool exact = false;              // wilcoxon p from the exact null distribution
  std::optional<NormalityResult> normality;  // set by choose_and_run
};

/// Royston's approximation. 3 <= n <= 5000.
/// Throws Error(SampleTooSmall) or Error(DegenerateSample) for constant input.
NormalityResult shapiro_wilk(std::vector<double> xs);

/// Differences are a - b, two-sided.
/// Throws Error(SampleTooSmall) for n < 3 or unequal lengths (InvalidRequest),
/// Error(DegenerateDifferences) when the differences have no spread.
TestResult paired_t(const std::vector<double>& a, const std::vector<double>& b);

/// Zero differences are dropped and ties get mid-ranks. The p-value is exact
/// for at most kWilcoxonExactMax non-zero pairs, otherwise normal with tie
/// and continuity correction. Throws Error(AllZeroDifferences).
inline constexpr std::size_t kWilcoxonExactMax = 12;
TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr double kNormalityAlpha = 0.05;

/// Shapiro-Wilk on a - b decides: paired_t when p >= alpha, wilcoxon otherwise.
TestResult choose_and_run(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha = kNormalityAlpha);

double mean(const std::vector<double>& xs);
/// Sample standard deviation (n - 1). Zero for fewer than two values.
double sample_sd(const std::vector<double>& xs);

// --- within-subject crossover study -------------------------------------

/// One measurement: a child's value on one variable at test 1, 2 or 3.
/// Group A plays the experimental game between tests 1 and 2 and the control
/// between 2 and 3; group B the other way round.
struct StudyRecord {
  std::string child_id;
  char group = 'A';
  int test_index = 1;
  std::string variable;
  double value = 0.0;
};

/// Header: child_id,group,test_index,variable,value. Throws Error(DataFormat).
std::vector<StudyRecord> read_study_csv(std::istream& in);
std::vector<StudyRecord> load_study_csv(const std::filesystem::path& path);
std::string to_csv(const std::vector<StudyRecord>& records);

struct ConditionSummary {
  double pre = 0.0;
  double post = 0.0;
  double change = 0.0;
  double change_sd = 0.0;
};

struct VariableSummary {
  std::string variable;
  ConditionSummary experimental;
  ConditionSummary control;
  std::vector<double> experimental_changes;  // one per included child
  std::vector<double> control_changes;
  std::size_t data_points = 0;  // both conditions together
  std::optional<TestResult> test;
  std::string test_error;  // set when the test could not run
};

struct Exclusion {
  std::string child_id;
  std::string reason;
};

struct StudySummary {
  std::size_t children = 0;
  std::vector<Exclusion> excluded;
  std::vector<VariableSummary> variables;  // in order of first appearance
};

/// Children lacking any of the three tests of any variable are excluded from
/// both conditions. Throws Error(DataFormat) on duplicate or contradictory records.
StudySummary summarize_study(const std::vector<StudyRecord>& records, double alpha = kNormalityAlpha);

std::string to_text(const StudySummary& summary);
std::string to_json(const StudySummary& summary);

}  // namespace errata

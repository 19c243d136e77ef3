#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cobot/analytics/stats.hpp"

namespace cobot::analytics {

inline constexpr int kPatterns = 8;

struct TrialRecord {
    std::string subject;
    int actual = 1;
    int perceived = 1;
    double response_time = 1.0; ///< s
};

using Matrix8 = std::array<std::array<double, kPatterns>, kPatterns>;

struct ConfusionMatrix {
    std::array<std::array<std::int64_t, kPatterns>, kPatterns> counts{}; ///< rows actual, columns perceived
    Matrix8 rates{};
};

void validate(const TrialRecord& t);

ConfusionMatrix confusion_matrix(const std::vector<TrialRecord>& trials);

/// Wraps an already normalized table; every row must sum to 1 within `row_tolerance`.
ConfusionMatrix confusion_from_rates(const Matrix8& rates, double row_tolerance = 1e-9);

/// Unweighted mean of the diagonal.
double recognition_rate(const ConfusionMatrix& cm);

/// Per-subject recognition rate for each pattern: result[pattern][subject],
/// subjects in order of first appearance. Throws E_INCOMPLETE_DESIGN when a
/// subject never saw some pattern.
struct SubjectRates {
    std::vector<std::string> subjects;
    std::vector<std::vector<double>> by_pattern;
};

SubjectRates subject_rates(const std::vector<TrialRecord>& trials);

struct PairwiseTest {
    int a = 0;
    int b = 0;
    std::optional<TTestResult> result; ///< empty when the pair has identical rates
};

struct TrialReport {
    ConfusionMatrix cm;
    double recognition = 0.0;
    std::size_t trials = 0;
    std::size_t subjects = 0;
    std::optional<AnovaResult> oneway;
    std::optional<AnovaResult> repeated;
    std::vector<PairwiseTest> pairwise;
};

TrialReport analyze_trials(const std::vector<TrialRecord>& trials);

/// CSV with header `subject,actual,perceived,response_time_s`.
std::vector<TrialRecord> read_trials_csv(std::istream& in);
std::vector<TrialRecord> read_trials_csv(const std::string& path);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const TrialReport& r);
std::string format_report(const TrialReport& r);

} // namespace cobot::analytics

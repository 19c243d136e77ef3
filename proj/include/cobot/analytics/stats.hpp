#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cobot::analytics {

struct AnovaResult {
    double F = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p = 1.0;
    std::string design; ///< "one-way" | "repeated-measures"
};

/// Between-groups ANOVA. Groups may differ in size; each needs >= 2 values.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

/// Single-factor within-subjects ANOVA; `conditions[c][s]` is subject s under condition c.
AnovaResult anova_repeated(const std::vector<std::vector<double>>& conditions);

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p = 1.0;
    bool degenerate = false; ///< differences had zero spread but non-zero mean
};

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

double f_cdf(double x, double df1, double df2);
double t_cdf(double x, double df);

nlohmann::json to_json(const AnovaResult& r);
nlohmann::json to_json(const TTestResult& r);

} // namespace cobot::analytics

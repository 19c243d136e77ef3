#include "cobot/analytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "cobot/error.hpp"

namespace cobot::analytics {

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_df(double df) {
    if (!(df > 0.0) || !std::isfinite(df)) {
        throw Error("E_PARAMETER", "degrees of freedom must be positive");
    }
}

AnovaResult finish(double ss_effect, double ss_error, int df1, int df2, const char* design) {
    if (ss_error <= 0.0 && ss_effect <= 0.0) {
        throw Error("E_DEGENERATE", "no variance between or within groups");
    }
    AnovaResult r;
    r.df1 = df1;
    r.df2 = df2;
    r.design = design;
    if (ss_error <= 0.0) {
        r.F = std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.F = (ss_effect / df1) / (ss_error / df2);
    r.p = boost::math::ibetac(df1 / 2.0, df2 / 2.0, df1 * r.F / (df1 * r.F + df2));
    return r;
}

} // namespace

double f_cdf(double x, double df1, double df2) {
    check_df(df1);
    check_df(df2);
    if (std::isnan(x)) {
        throw Error("E_PARAMETER", "F statistic is NaN");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return boost::math::ibeta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

double t_cdf(double x, double df) {
    check_df(df);
    if (std::isnan(x)) {
        throw Error("E_PARAMETER", "t statistic is NaN");
    }
    if (std::isinf(x)) {
        return x > 0 ? 1.0 : 0.0;
    }
    const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, df / (df + x * x));
    return x >= 0.0 ? 1.0 - tail : tail;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) {
        throw Error("E_DEGENERATE", "ANOVA needs at least two groups");
    }
    std::size_t n = 0;
    double total = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) {
            throw Error("E_DEGENERATE", "each ANOVA group needs at least two values");
        }
        n += g.size();
        total += std::accumulate(g.begin(), g.end(), 0.0);
    }
    const double grand = total / static_cast<double>(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) {
            ssw += (v - m) * (v - m);
        }
    }
    const int k = static_cast<int>(groups.size());
    return finish(ssb, ssw, k - 1, static_cast<int>(n) - k, "one-way");
}

AnovaResult anova_repeated(const std::vector<std::vector<double>>& conditions) {
    if (conditions.size() < 2) {
        throw Error("E_DEGENERATE", "ANOVA needs at least two conditions");
    }
    const std::size_t n = conditions.front().size();
    if (n < 2) {
        throw Error("E_DEGENERATE", "repeated-measures ANOVA needs at least two subjects");
    }
    for (const auto& c : conditions) {
        if (c.size() != n) {
            throw Error("E_INCOMPLETE_DESIGN", "every condition needs one value per subject");
        }
    }
    const std::size_t k = conditions.size();
    double grand = 0.0;
    for (const auto& c : conditions) {
        grand += std::accumulate(c.begin(), c.end(), 0.0);
    }
    grand /= static_cast<double>(n * k);

    std::vector<double> subj(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& c : conditions) {
            subj[s] += c[s];
        }
        subj[s] /= static_cast<double>(k);
    }
    double ss_cond = 0.0, ss_error = 0.0;
    for (const auto& c : conditions) {
        const double m = mean(c);
        ss_cond += static_cast<double>(n) * (m - grand) * (m - grand);
        for (std::size_t s = 0; s < n; ++s) {
            const double e = c[s] - m - subj[s] + grand;
            ss_error += e * e;
        }
    }
    const int df1 = static_cast<int>(k) - 1;
    return finish(ss_cond, ss_error, df1, df1 * (static_cast<int>(n) - 1), "repeated-measures");
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error("E_DEGENERATE", "paired t-test needs two equal-length samples of size >= 2");
    }
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a[i] - b[i];
    }
    const double m = mean(d);
    double ss = 0.0;
    for (double v : d) {
        ss += (v - m) * (v - m);
    }
    TTestResult r;
    r.df = static_cast<int>(n) - 1;
    if (ss <= 0.0) {
        if (m == 0.0) {
            throw Error("E_DEGENERATE", "all paired differences are zero");
        }
        r.t = m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        r.degenerate = true;
        return r;
    }
    const double sd = std::sqrt(ss / r.df);
    r.t = m / (sd / std::sqrt(static_cast<double>(n)));
    r.p = std::min(1.0, boost::math::ibeta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t)));
    return r;
}

nlohmann::json to_json(const AnovaResult& r) {
    return {{"design", r.design}, {"F", r.F}, {"df1", r.df1}, {"df2", r.df2}, {"p", r.p}};
}

nlohmann::json to_json(const TTestResult& r) {
    nlohmann::json j = {{"df", r.df}, {"p", r.p}, {"degenerate", r.degenerate}};
    j["t"] = std::isfinite(r.t) ? nlohmann::json(r.t) : nlohmann::json(r.t > 0 ? "inf" : "-inf");
    return j;
}

} // namespace cobot::analytics

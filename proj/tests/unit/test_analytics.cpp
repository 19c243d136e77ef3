#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "cobot/analytics/stats.hpp"
#include "cobot/analytics/tlx.hpp"
#include "cobot/analytics/trials.hpp"
#include "cobot/error.hpp"

using namespace cobot::analytics;

namespace {

// Reference confusion table, percent / 100, rows = actual.
const Matrix8 kReference = {{
    {0.70, 0.10, 0.15, 0.05, 0, 0, 0, 0},
    {0.05, 0.83, 0.05, 0, 0, 0.03, 0.03, 0.03},
    {0.08, 0.08, 0.55, 0.28, 0.03, 0, 0, 0},
    {0.03, 0.05, 0.10, 0.75, 0.08, 0, 0, 0},
    {0.03, 0, 0, 0.03, 0.80, 0.13, 0.03, 0},
    {0.03, 0, 0, 0, 0.10, 0.73, 0.13, 0.03},
    {0.05, 0, 0, 0, 0, 0, 0.78, 0.18},
    {0.03, 0, 0, 0, 0, 0, 0.10, 0.88},
}};

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
    const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) {
        return left + right + (left + right - whole) / 15;
    }
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-13, 60);
}

double f_density(double x, double d1, double d2) {
    if (x <= 0) return d1 == 2 ? 1.0 : 0.0;
    const double lb = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
    return std::exp((d1 / 2) * std::log(d1 / d2) + (d1 / 2 - 1) * std::log(x) -
                    ((d1 + d2) / 2) * std::log1p(d1 * x / d2) - lb);
}

double t_density(double x, double v) {
    return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2) - 0.5 * std::log(v * M_PI) -
                    ((v + 1) / 2) * std::log1p(x * x / v));
}

std::vector<TrialRecord> perfect_log(int subjects, int reps) {
    std::vector<TrialRecord> out;
    for (int s = 0; s < subjects; ++s)
        for (int r = 0; r < reps; ++r)
            for (int p = 1; p <= 8; ++p)
                out.push_back({"s" + std::to_string(s), p, p, 1.5});
    return out;
}

} // namespace

TEST_CASE("confusion matrix basics") {
    const auto log = perfect_log(7, 5);
    const auto cm = confusion_matrix(log);
    std::int64_t total = 0;
    for (int a = 0; a < 8; ++a)
        for (int p = 0; p < 8; ++p) {
            total += cm.counts[a][p];
            CHECK(cm.rates[a][p] == (a == p ? 1.0 : 0.0));
        }
    CHECK(total == 280);
    CHECK(recognition_rate(cm) == 1.0);

    auto corrupted = log;
    corrupted[10].perceived = corrupted[10].actual % 8 + 1;
    const auto cm2 = confusion_matrix(corrupted);
    int changed_off = 0;
    for (int a = 0; a < 8; ++a)
        for (int p = 0; p < 8; ++p)
            if (a != p && cm2.counts[a][p] != cm.counts[a][p]) ++changed_off;
    CHECK(changed_off == 1);

    std::vector<TrialRecord> missing;
    for (const auto& t : log)
        if (t.actual != 4) missing.push_back(t);
    CHECK_THROWS_WITH_AS(confusion_matrix(missing), doctest::Contains("pattern 4"), cobot::Error);
    CHECK_THROWS_AS(confusion_matrix({{"a", 9, 1, 1.0}}), cobot::Error);
}

TEST_CASE("reference table rows and recognition rate") {
    for (const auto& row : kReference) {
        double sum = 0;
        for (double v : row) sum += v;
        CHECK(sum >= 0.98);
        CHECK(sum <= 1.03);
    }
    const auto cm = confusion_from_rates(kReference, 0.03);
    CHECK(std::abs(recognition_rate(cm) - 0.7525) <= 1e-12);
    CHECK_THROWS_AS(confusion_from_rates(kReference), cobot::Error);

    Matrix8 uniform;
    for (auto& r : uniform) r.fill(0.125);
    CHECK(recognition_rate(confusion_from_rates(uniform)) == doctest::Approx(0.125));
}

TEST_CASE("bundled confusion counts fixture") {
    const auto trials = read_trials_csv(std::string(COBOT_DATA_DIR) + "/data/confusion_counts.csv");
    CHECK(trials.size() == 800);
    const auto cm = confusion_matrix(trials);
    for (int a = 0; a < 8; ++a) {
        std::int64_t row = 0;
        for (auto c : cm.counts[a]) row += c;
        CHECK(row == 100);
        // diagonal exactly as in the reference, off-diagonals within the 2-point rounding slack
        CHECK(cm.counts[a][a] == std::llround(kReference[a][a] * 100));
        for (int p = 0; p < 8; ++p) {
            CHECK(std::abs(cm.rates[a][p] - kReference[a][p]) <= 0.02 + 1e-12);
        }
    }
    CHECK(std::abs(recognition_rate(cm) - 0.7525) <= 1e-4);
    const auto rates = subject_rates(trials);
    CHECK(rates.subjects.size() == 20);
}

TEST_CASE("one-way ANOVA") {
    const auto r = anova_oneway({{1, 3}, {2, 4}});
    CHECK(r.F == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.df1 == 1);
    CHECK(r.df2 == 2);
    CHECK(r.p == doctest::Approx(1 - std::sqrt(0.5 / 2.5)).epsilon(1e-10));

    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.7, 0.15);
    std::vector<std::vector<double>> groups(8, std::vector<double>(7));
    for (auto& g : groups)
        for (auto& v : g) v = n(rng);
    const auto base = anova_oneway(groups);
    CHECK(base.df1 == 7);
    CHECK(base.df2 == 48);
    CHECK(base.p >= 0.0);
    CHECK(base.p <= 1.0);

    auto shifted = groups, scaled = groups;
    for (auto& g : shifted)
        for (auto& v : g) v += 12.5;
    for (auto& g : scaled)
        for (auto& v : g) v *= -3.0;
    CHECK(std::abs(anova_oneway(shifted).F - base.F) <= 1e-9);
    CHECK(std::abs(anova_oneway(scaled).F - base.F) <= 1e-9);

    const auto rm = anova_repeated(groups);
    CHECK(rm.df1 == 7);
    CHECK(rm.df2 == 42);
    CHECK(rm.design == "repeated-measures");

    CHECK_THROWS_AS(anova_oneway({{2, 2}, {2, 2}}), cobot::Error);
    CHECK_THROWS_AS(anova_oneway({{1, 2}}), cobot::Error);
    CHECK(std::isinf(anova_oneway({{1, 1}, {2, 2}}).F));
}

TEST_CASE("repeated-measures ANOVA against a hand-computed table") {
    // subjects x conditions:
    //   s1: 1 2 6   s2: 2 4 6   s3: 3 3 9
    // grand 4; cond means 2,3,7 -> SS_cond = 3*(4+1+9) = 42
    // subject means 3,4,5 -> SS_subj = 3*(1+0+1) = 6; SS_total = 52 -> SS_err = 4
    const auto r = anova_repeated({{1, 2, 3}, {2, 4, 3}, {6, 6, 9}});
    CHECK(r.df1 == 2);
    CHECK(r.df2 == 4);
    CHECK(r.F == doctest::Approx((42.0 / 2) / (4.0 / 4)).epsilon(1e-12));
}

TEST_CASE("paired t-test") {
    const auto r = paired_ttest({1, 2, 3}, {0, 0, 0});
    CHECK(r.t == doctest::Approx(3.4641016151).epsilon(1e-9));
    CHECK(r.df == 2);
    // two-sided p for t(2): closed form 1 - t/sqrt(t^2 + 2)
    CHECK(r.p == doctest::Approx(1 - r.t / std::sqrt(r.t * r.t + 2)).epsilon(1e-10));
    const auto s = paired_ttest({0, 0, 0}, {1, 2, 3});
    CHECK(s.t == doctest::Approx(-r.t));
    CHECK(s.p == doctest::Approx(r.p));

    CHECK_THROWS_AS(paired_ttest({1, 2, 3}, {1, 2, 3}), cobot::Error);
    const auto d = paired_ttest({2, 3, 4}, {1, 2, 3});
    CHECK(d.degenerate);
    CHECK(d.p == 0.0);
    CHECK_THROWS_AS(paired_ttest({1}, {2}), cobot::Error);
}

TEST_CASE("distribution CDFs against quadrature of the densities") {
    CHECK(t_cdf(0.0, 3) == 0.5);
    CHECK(t_cdf(0.0, 48) == 0.5);
    double worst = 0.0;
    for (auto [d1, d2] : std::vector<std::pair<double, double>>{{2, 5}, {3, 10}, {7, 48}, {5, 2}, {10, 30}, {7, 42}}) {
        for (double x : {0.1, 0.5, 1.0, 2.077, 3.5, 6.0}) {
            const double q = integrate([&](double u) { return f_density(u, d1, d2); }, 0.0, x);
            worst = std::max(worst, std::abs(q - f_cdf(x, d1, d2)));
        }
    }
    for (double v : {1.0, 2.0, 5.0, 30.0}) {
        for (double x : {-4.0, -1.0, 0.3, 2.0, 5.0}) {
            const double q = 0.5 + (x >= 0 ? 1 : -1) * integrate([&](double u) { return t_density(u, v); }, 0.0, std::abs(x));
            worst = std::max(worst, std::abs(q - t_cdf(x, v)));
        }
    }
    MESSAGE("max |cdf - quadrature| = " << worst);
    CHECK(worst < 1e-8);

    const double p = 1 - f_cdf(2.077, 7, 48);
    MESSAGE("1 - F_cdf(2.077; 7, 48) = " << p);
    CHECK(std::abs(p - 0.064) <= 0.002);

    CHECK_THROWS_AS(f_cdf(1.0, 0, 3), cobot::Error);
    CHECK_THROWS_AS(t_cdf(1.0, -1), cobot::Error);
}

TEST_CASE("distribution CDFs are monotone") {
    for (auto [d1, d2] : std::vector<std::pair<double, double>>{{1, 1}, {2, 2}, {7, 48}, {20, 3}}) {
        double last = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double c = f_cdf(i * 0.01, d1, d2);
            REQUIRE(c >= last);
            REQUIRE(c <= 1.0);
            last = c;
        }
    }
    for (double v : {1.0, 4.0, 100.0}) {
        double last = 0.0;
        for (int i = -2000; i <= 2000; ++i) {
            const double c = t_cdf(i * 0.01, v);
            REQUIRE(c >= last);
            last = c;
        }
    }
}

TEST_CASE("analyze_trials report") {
    std::vector<TrialRecord> log;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < 7; ++s)
        for (int rep = 0; rep < 5; ++rep)
            for (int p = 1; p <= 8; ++p)
                log.push_back({"p" + std::to_string(s), p, u(rng) < 0.25 ? p % 8 + 1 : p, 2.0});
    const auto r = analyze_trials(log);
    CHECK(r.trials == 280);
    CHECK(r.subjects == 7);
    REQUIRE(r.oneway);
    CHECK(r.oneway->df1 == 7);
    CHECK(r.oneway->df2 == 48);
    REQUIRE(r.repeated);
    CHECK(r.repeated->df2 == 42);
    CHECK(r.pairwise.size() == 28);
    const auto j = to_json(r);
    CHECK(j["confusion"]["counts"].size() == 8);
    CHECK(format_report(r).find("F(7,48)") != std::string::npos);
}

TEST_CASE("trial CSV parsing") {
    std::istringstream ok("subject,actual,perceived,response_time_s\n# comment\na,1,2,1.5\n\nb,8,8,0.9\n");
    const auto t = read_trials_csv(ok);
    REQUIRE(t.size() == 2);
    CHECK(t[1].subject == "b");
    CHECK(t[0].response_time == 1.5);

    std::istringstream bad_header("who,actual,perceived,response_time_s\n");
    CHECK_THROWS_AS(read_trials_csv(bad_header), cobot::Error);
    std::istringstream bad_value("subject,actual,perceived,response_time_s\na,1,x,1.5\n");
    CHECK_THROWS_WITH_AS(read_trials_csv(bad_value), doctest::Contains("line 2"), cobot::Error);
    std::istringstream bad_range("subject,actual,perceived,response_time_s\na,0,1,1.5\n");
    CHECK_THROWS_AS(read_trials_csv(bad_range), cobot::Error);
    std::istringstream bad_time("subject,actual,perceived,response_time_s\na,1,1,0\n");
    CHECK_THROWS_AS(read_trials_csv(bad_time), cobot::Error);
}

TEST_CASE("TLX scoring") {
    TlxResponse zero;
    CHECK(tlx_score(zero).raw == 0.0);

    const TlxResponse reference_means{"mean", {1.33, 2.08, 1.58, 1.67, 1.75, 0.92}, std::nullopt};
    const auto s = tlx_score(reference_means);
    CHECK(std::abs(s.raw - 1.5550) <= 1e-6);
    CHECK_FALSE(s.weighted);

    TlxResponse w = reference_means;
    w.weights = std::array<double, 6>{2.5, 2.5, 2.5, 2.5, 2.5, 2.5};
    CHECK(std::abs(*tlx_score(w).weighted - s.raw) <= 1e-12);
    w.weights = std::array<double, 6>{5, 4, 3, 2, 1, 0};
    CHECK(*tlx_score(w).weighted == doctest::Approx((5 * 1.33 + 4 * 2.08 + 3 * 1.58 + 2 * 1.67 + 1.75) / 15));
    w.weights = std::array<double, 6>{5, 4, 3, 2, 1, 1};
    CHECK_THROWS_AS(tlx_score(w), cobot::Error);

    TlxResponse out = reference_means;
    out.ratings[2] = 11;
    CHECK_THROWS_AS(tlx_score(out), cobot::Error);
    CHECK_NOTHROW(tlx_score(out, {0, 20}));
}

TEST_CASE("TLX aggregation") {
    const TlxResponse a{"a", {1, 2, 3, 4, 5, 6}, std::nullopt};
    const TlxResponse b{"b", {3, 2, 1, 0, 5, 10}, std::nullopt};
    const auto one = aggregate_tlx({a});
    CHECK(one.means == a.ratings);
    const auto two = aggregate_tlx({a, b});
    for (std::size_t i = 0; i < 6; ++i) CHECK(two.means[i] == (a.ratings[i] + b.ratings[i]) / 2);
    CHECK_THROWS_AS(aggregate_tlx({}), cobot::Error);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 10);
    std::vector<TlxResponse> subjects(8);
    for (auto& r : subjects)
        for (auto& v : r.ratings) v = std::round(u(rng) * 4) / 4;
    const auto t = aggregate_tlx(subjects);
    double grand = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        double col = 0;
        for (const auto& r : subjects) col += r.ratings[i];
        col /= 8;
        CHECK(std::abs(t.means[i] - col) <= 1e-12);
        grand += col;
    }
    CHECK(std::abs(t.raw - grand / 6) <= 1e-12);

    std::istringstream csv(tlx_csv_header(false) + "\n" + tlx_csv_row(a) + "\n" + tlx_csv_row(b) + "\n");
    const auto parsed = read_tlx_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].ratings == b.ratings);
    CHECK(format_table(two).find("Physical Demand") != std::string::npos);
    CHECK(tlx_from_json(to_json(a)).ratings == a.ratings);
}

#include "cobot/analytics/trials.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "cobot/error.hpp"
#include "csv.hpp"

namespace cobot::analytics {

void validate(const TrialRecord& t) {
    if (t.actual < 1 || t.actual > kPatterns || t.perceived < 1 || t.perceived > kPatterns) {
        throw Error("E_INVALID_TRIAL", "pattern ids must lie in 1..8");
    }
    if (!(t.response_time > 0.0)) {
        throw Error("E_INVALID_TRIAL", "response time must be positive");
    }
}

ConfusionMatrix confusion_matrix(const std::vector<TrialRecord>& trials) {
    if (trials.empty()) {
        throw Error("E_INCOMPLETE_DESIGN", "no trials");
    }
    ConfusionMatrix cm;
    for (const auto& t : trials) {
        validate(t);
        ++cm.counts[t.actual - 1][t.perceived - 1];
    }
    for (int a = 0; a < kPatterns; ++a) {
        std::int64_t row = 0;
        for (auto c : cm.counts[a]) {
            row += c;
        }
        if (row == 0) {
            throw Error("E_INCOMPLETE_DESIGN", "actual pattern " + std::to_string(a + 1) + " never presented");
        }
        for (int p = 0; p < kPatterns; ++p) {
            cm.rates[a][p] = static_cast<double>(cm.counts[a][p]) / static_cast<double>(row);
        }
    }
    return cm;
}

ConfusionMatrix confusion_from_rates(const Matrix8& rates, double row_tolerance) {
    ConfusionMatrix cm;
    for (int a = 0; a < kPatterns; ++a) {
        double sum = 0.0;
        for (double v : rates[a]) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error("E_INVALID_MATRIX", "rates must lie in [0, 1]");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > row_tolerance) {
            throw Error("E_INVALID_MATRIX", "row " + std::to_string(a + 1) + " sums to " + std::to_string(sum));
        }
    }
    cm.rates = rates;
    return cm;
}

double recognition_rate(const ConfusionMatrix& cm) {
    double sum = 0.0;
    for (int i = 0; i < kPatterns; ++i) {
        sum += cm.rates[i][i];
    }
    return sum / kPatterns;
}

SubjectRates subject_rates(const std::vector<TrialRecord>& trials) {
    SubjectRates out;
    std::map<std::string, std::size_t> index;
    std::vector<std::array<std::array<int, 2>, kPatterns>> tally; // [subject][pattern] = {correct, total}
    for (const auto& t : trials) {
        validate(t);
        auto [it, fresh] = index.emplace(t.subject, out.subjects.size());
        if (fresh) {
            out.subjects.push_back(t.subject);
            tally.push_back({});
        }
        auto& cell = tally[it->second][t.actual - 1];
        cell[0] += t.actual == t.perceived;
        cell[1] += 1;
    }
    out.by_pattern.assign(kPatterns, std::vector<double>(out.subjects.size()));
    for (std::size_t s = 0; s < out.subjects.size(); ++s) {
        for (int p = 0; p < kPatterns; ++p) {
            const auto& cell = tally[s][p];
            if (cell[1] == 0) {
                throw Error("E_INCOMPLETE_DESIGN",
                            "subject " + out.subjects[s] + " has no trials for pattern " + std::to_string(p + 1));
            }
            out.by_pattern[p][s] = static_cast<double>(cell[0]) / cell[1];
        }
    }
    return out;
}

TrialReport analyze_trials(const std::vector<TrialRecord>& trials) {
    TrialReport r;
    r.cm = confusion_matrix(trials);
    r.recognition = recognition_rate(r.cm);
    r.trials = trials.size();

    SubjectRates rates;
    try {
        rates = subject_rates(trials);
    } catch (const Error& e) {
        if (std::string(e.code()) != "E_INCOMPLETE_DESIGN") {
            throw;
        }
        return r;
    }
    r.subjects = rates.subjects.size();
    if (r.subjects < 2) {
        return r;
    }
    try {
        r.oneway = anova_oneway(rates.by_pattern);
    } catch (const Error&) {
    }
    try {
        r.repeated = anova_repeated(rates.by_pattern);
    } catch (const Error&) {
    }
    for (int a = 0; a < kPatterns; ++a) {
        for (int b = a + 1; b < kPatterns; ++b) {
            PairwiseTest pt{a + 1, b + 1, std::nullopt};
            try {
                pt.result = paired_ttest(rates.by_pattern[a], rates.by_pattern[b]);
            } catch (const Error&) {
            }
            r.pairwise.push_back(pt);
        }
    }
    return r;
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
    std::vector<std::string> header;
    const auto rows = detail::read_csv(in, header);
    const std::vector<std::string> expected = {"subject", "actual", "perceived", "response_time_s"};
    if (header != expected) {
        throw Error("E_CSV", "trial CSV header must be subject,actual,perceived,response_time_s");
    }
    std::vector<TrialRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.cells.size() != 4) {
            throw Error("E_CSV", "line " + std::to_string(row.line) + ": expected 4 fields");
        }
        TrialRecord t{row.cells[0], detail::to_int(row, 1, "actual"), detail::to_int(row, 2, "perceived"),
                      detail::to_number(row, 3, "response_time_s")};
        try {
            validate(t);
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(row.line) + ": " + e.what());
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TrialRecord> read_trials_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("E_IO", "cannot open " + path);
    }
    return read_trials_csv(in);
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
    return {{"counts", cm.counts}, {"rates", cm.rates}};
}

nlohmann::json to_json(const TrialReport& r) {
    nlohmann::json j = {{"trials", r.trials},
                        {"subjects", r.subjects},
                        {"confusion", to_json(r.cm)},
                        {"recognition_rate", r.recognition},
                        {"anova_oneway", nullptr},
                        {"anova_repeated", nullptr},
                        {"pairwise", nlohmann::json::array()}};
    if (r.oneway) {
        j["anova_oneway"] = to_json(*r.oneway);
    }
    if (r.repeated) {
        j["anova_repeated"] = to_json(*r.repeated);
    }
    for (const auto& pt : r.pairwise) {
        nlohmann::json e = {{"a", pt.a}, {"b", pt.b}};
        if (pt.result) {
            e.update(to_json(*pt.result));
        } else {
            e["identical"] = true;
        }
        j["pairwise"].push_back(std::move(e));
    }
    return j;
}

std::string format_report(const TrialReport& r) {
    std::string out;
    char buf[160];
    out += "actual\\perceived";
    for (int p = 1; p <= kPatterns; ++p) {
        std::snprintf(buf, sizeof buf, "%6d", p);
        out += buf;
    }
    out += "\n";
    for (int a = 0; a < kPatterns; ++a) {
        std::snprintf(buf, sizeof buf, "%16d", a + 1);
        out += buf;
        for (int p = 0; p < kPatterns; ++p) {
            std::snprintf(buf, sizeof buf, "%6.2f", r.cm.rates[a][p]);
            out += buf;
        }
        out += "\n";
    }
    std::snprintf(buf, sizeof buf, "recognition rate: %.4f (%zu trials, %zu subjects)\n", r.recognition, r.trials,
                  r.subjects);
    out += buf;
    for (const auto* a : {&r.oneway, &r.repeated}) {
        if (*a) {
            std::snprintf(buf, sizeof buf, "ANOVA %s: F(%d,%d) = %.3f, p = %.3f\n", (*a)->design.c_str(), (*a)->df1,
                          (*a)->df2, (*a)->F, (*a)->p);
            out += buf;
        }
    }
    for (const auto& pt : r.pairwise) {
        if (pt.result && pt.result->p < 0.05) {
            std::snprintf(buf, sizeof buf, "paired t %d vs %d: t(%d) = %.3f, p = %.3f\n", pt.a, pt.b, pt.result->df,
                          pt.result->t, pt.result->p);
            out += buf;
        }
    }
    return out;
}

} // namespace cobot::analytics

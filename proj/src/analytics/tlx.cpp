#include "cobot/analytics/tlx.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cobot/error.hpp"
#include "csv.hpp"

namespace cobot::analytics {

void validate(const TlxResponse& r, const TlxScale& scale) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (!(r.ratings[i] >= scale.min && r.ratings[i] <= scale.max)) {
            throw Error("E_TLX_RANGE", std::string(kTlxScales[i]) + " rating outside the questionnaire scale");
        }
    }
    if (r.weights) {
        double sum = 0.0;
        for (double w : *r.weights) {
            if (!(w >= 0.0)) {
                throw Error("E_TLX_WEIGHTS", "weights must be non-negative");
            }
            sum += w;
        }
        if (std::abs(sum - 15.0) > 1e-9) {
            throw Error("E_TLX_WEIGHTS", "weights must sum to 15");
        }
    }
}

TlxScore tlx_score(const TlxResponse& r, const TlxScale& scale) {
    validate(r, scale);
    TlxScore s;
    for (double v : r.ratings) {
        s.raw += v;
    }
    s.raw /= 6.0;
    if (r.weights) {
        double w = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            w += r.ratings[i] * (*r.weights)[i];
        }
        s.weighted = w / 15.0;
    }
    return s;
}

TlxTable aggregate_tlx(const std::vector<TlxResponse>& responses, const TlxScale& scale) {
    if (responses.empty()) {
        throw Error("E_TLX_EMPTY", "no TLX responses");
    }
    TlxTable t;
    t.responses = responses.size();
    double weighted = 0.0;
    bool all_weighted = true;
    for (const auto& r : responses) {
        const auto s = tlx_score(r, scale);
        for (std::size_t i = 0; i < 6; ++i) {
            t.means[i] += r.ratings[i];
        }
        if (s.weighted) {
            weighted += *s.weighted;
        } else {
            all_weighted = false;
        }
    }
    const auto n = static_cast<double>(responses.size());
    double sum = 0.0;
    for (auto& m : t.means) {
        m /= n;
        sum += m;
    }
    t.raw = sum / 6.0;
    if (all_weighted) {
        t.weighted = weighted / n;
    }
    return t;
}

std::vector<TlxResponse> read_tlx_csv(std::istream& in) {
    std::vector<std::string> header;
    const auto rows = detail::read_csv(in, header);
    const bool weighted = header.size() == 13;
    if (header.size() != 7 && !weighted) {
        throw Error("E_CSV", "TLX CSV needs 7 columns (13 with weights)");
    }
    for (std::size_t i = 0; i < 6; ++i) {
        if (header[i + 1] != kTlxScales[i] || (weighted && header[i + 7] != std::string("w_") + kTlxScales[i])) {
            throw Error("E_CSV", "TLX CSV header must be " + tlx_csv_header(weighted));
        }
    }
    std::vector<TlxResponse> out;
    for (const auto& row : rows) {
        if (row.cells.size() != header.size()) {
            throw Error("E_CSV", "line " + std::to_string(row.line) + ": wrong number of fields");
        }
        TlxResponse r;
        r.subject = row.cells[0];
        for (std::size_t i = 0; i < 6; ++i) {
            r.ratings[i] = detail::to_number(row, i + 1, kTlxScales[i]);
        }
        if (weighted) {
            r.weights.emplace();
            for (std::size_t i = 0; i < 6; ++i) {
                (*r.weights)[i] = detail::to_number(row, i + 7, "weight");
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TlxResponse> read_tlx_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("E_IO", "cannot open " + path);
    }
    return read_tlx_csv(in);
}

std::string tlx_csv_header(bool with_weights) {
    std::string h = "subject";
    for (const char* s : kTlxScales) {
        h += std::string(",") + s;
    }
    if (with_weights) {
        for (const char* s : kTlxScales) {
            h += std::string(",w_") + s;
        }
    }
    return h;
}

std::string tlx_csv_row(const TlxResponse& r) {
    std::string row = r.subject;
    char buf[32];
    for (double v : r.ratings) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        row += buf;
    }
    if (r.weights) {
        for (double v : *r.weights) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            row += buf;
        }
    }
    return row;
}

TlxResponse tlx_from_json(const nlohmann::json& j) {
    TlxResponse r;
    try {
        r.subject = j.value("subject", std::string("anonymous"));
        const auto& ratings = j.at("ratings");
        for (std::size_t i = 0; i < 6; ++i) {
            r.ratings[i] = ratings.at(kTlxScales[i]).get<double>();
        }
        if (j.contains("weights") && !j["weights"].is_null()) {
            r.weights.emplace();
            for (std::size_t i = 0; i < 6; ++i) {
                (*r.weights)[i] = j["weights"].at(kTlxScales[i]).get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_TLX_FORMAT", e.what());
    }
    return r;
}

nlohmann::json to_json(const TlxResponse& r) {
    nlohmann::json ratings, weights;
    for (std::size_t i = 0; i < 6; ++i) {
        ratings[kTlxScales[i]] = r.ratings[i];
        if (r.weights) {
            weights[kTlxScales[i]] = (*r.weights)[i];
        }
    }
    return {{"subject", r.subject}, {"ratings", ratings}, {"weights", r.weights ? weights : nlohmann::json()}};
}

nlohmann::json to_json(const TlxTable& t) {
    nlohmann::json means;
    for (std::size_t i = 0; i < 6; ++i) {
        means[kTlxScales[i]] = t.means[i];
    }
    return {{"responses", t.responses},
            {"means", means},
            {"raw", t.raw},
            {"weighted", t.weighted ? nlohmann::json(*t.weighted) : nlohmann::json()}};
}

std::string format_table(const TlxTable& t) {
    static const char* labels[] = {"Mental Demand", "Physical Demand", "Temporal Demand",
                                   "Performance",   "Effort",          "Frustration"};
    std::string out;
    char buf[96];
    for (std::size_t i = 0; i < 6; ++i) {
        std::snprintf(buf, sizeof buf, "%-18s %6.2f\n", labels[i], t.means[i]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-18s %6.4f\n", "Raw TLX", t.raw);
    out += buf;
    if (t.weighted) {
        std::snprintf(buf, sizeof buf, "%-18s %6.4f\n", "Weighted TLX", *t.weighted);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "(%zu responses)\n", t.responses);
    return out + buf;
}

} // namespace cobot::analytics

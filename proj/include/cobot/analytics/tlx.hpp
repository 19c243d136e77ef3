#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cobot::analytics {

inline constexpr std::array<const char*, 6> kTlxScales = {"mental", "physical", "temporal",
                                                          "performance", "effort", "frustration"};

struct TlxScale {
    double min = 0.0;
    double max = 10.0;
};

struct TlxResponse {
    std::string subject;
    std::array<double, 6> ratings{};
    /// Tallies from the 15 pairwise comparisons, one per subscale.
    std::optional<std::array<double, 6>> weights;
};

struct TlxScore {
    double raw = 0.0;
    std::optional<double> weighted;
};

void validate(const TlxResponse& r, const TlxScale& scale = {});

TlxScore tlx_score(const TlxResponse& r, const TlxScale& scale = {});

struct TlxTable {
    std::size_t responses = 0;
    std::array<double, 6> means{};
    double raw = 0.0;
    std::optional<double> weighted; ///< only when every response carries weights
};

TlxTable aggregate_tlx(const std::vector<TlxResponse>& responses, const TlxScale& scale = {});

/// CSV header: subject,mental,physical,temporal,performance,effort,frustration
/// optionally followed by w_mental..w_frustration.
std::vector<TlxResponse> read_tlx_csv(std::istream& in);
std::vector<TlxResponse> read_tlx_csv(const std::string& path);
std::string tlx_csv_header(bool with_weights);
std::string tlx_csv_row(const TlxResponse& r);

TlxResponse tlx_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TlxResponse& r);
nlohmann::json to_json(const TlxTable& t);
std::string format_table(const TlxTable& t);

} // namespace cobot::analytics

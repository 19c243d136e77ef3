#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cobot/bus/message.hpp"
#include "cobot/error.hpp"

namespace cobot::bus {

enum class ClockMode { Wall, Virtual };

std::string_view to_string(ClockMode mode);
ClockMode clock_mode_from_string(std::string_view s);

struct LogHeader {
    ClockMode clock_mode = ClockMode::Virtual;
    std::int64_t start_stamp_us = 0;
    std::string config_digest;

    bool operator==(const LogHeader&) const = default;
};

/// JSON-lines session record: header on line 1, one BusMessage per following line,
/// in broker arrival order.
struct SessionLog {
    LogHeader header;
    std::vector<BusMessage> messages;
};

/// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest over the ordered message sequence (topics, seqs, stamps and payloads).
/// The header is not part of it, so a replay into a fresh broker reproduces it.
std::string log_digest(const std::vector<BusMessage>& messages);

void write_log(std::ostream& out, const SessionLog& log);
void write_log(const std::filesystem::path& path, const SessionLog& log);

/// Parses a log. A line that is not a complete message raises E_LOG_TRUNCATED
/// naming the last valid message index (-1 when none parsed).
SessionLog read_log(std::istream& in);
SessionLog read_log(const std::filesystem::path& path);

class LogTruncated : public Error {
public:
    LogTruncated(long long last_valid_index, const std::string& detail);
    long long last_valid_index() const noexcept { return last_valid_; }

private:
    long long last_valid_;
};

} // namespace cobot::bus

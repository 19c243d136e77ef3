#include "cobot/bus/session_log.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "cobot/error.hpp"

namespace cobot::bus {

std::string_view to_string(ClockMode mode) {
    return mode == ClockMode::Wall ? "wall" : "virtual";
}

ClockMode clock_mode_from_string(std::string_view s) {
    if (s == "wall") {
        return ClockMode::Wall;
    }
    if (s == "virtual") {
        return ClockMode::Virtual;
    }
    throw Error("E_CONFIG", "clock_mode must be 'wall' or 'virtual', got '" + std::string(s) + "'");
}

namespace {

struct DigestCtx {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    DigestCtx() { EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr); }
    ~DigestCtx() { EVP_MD_CTX_free(ctx); }
    DigestCtx(const DigestCtx&) = delete;
    DigestCtx& operator=(const DigestCtx&) = delete;

    void update(std::string_view bytes) { EVP_DigestUpdate(ctx, bytes.data(), bytes.size()); }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx, md, &len);
        std::ostringstream os;
        for (unsigned int i = 0; i < len; ++i) {
            os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
        }
        return os.str();
    }
};

} // namespace

std::string sha256_hex(std::string_view bytes) {
    DigestCtx ctx;
    ctx.update(bytes);
    return ctx.hex();
}

std::string log_digest(const std::vector<BusMessage>& messages) {
    DigestCtx ctx;
    for (const auto& m : messages) {
        ctx.update(canonical_line(m));
        ctx.update("\n");
    }
    return ctx.hex();
}

void write_log(std::ostream& out, const SessionLog& log) {
    const Json header{{"clock_mode", to_string(log.header.clock_mode)},
                      {"start_stamp_us", log.header.start_stamp_us},
                      {"config_digest", log.header.config_digest}};
    out << header.dump() << '\n';
    for (const auto& m : log.messages) {
        out << canonical_line(m) << '\n';
    }
}

void write_log(const std::filesystem::path& path, const SessionLog& log) {
    std::ofstream out(path);
    if (!out) {
        throw Error("E_FILE", "cannot write log file " + path.string());
    }
    write_log(out, log);
}

LogTruncated::LogTruncated(long long last_valid_index, const std::string& detail)
    : Error("E_LOG_TRUNCATED",
            "log truncated after message index " + std::to_string(last_valid_index) + ": " + detail),
      last_valid_(last_valid_index) {}

SessionLog read_log(std::istream& in) {
    SessionLog log;
    std::string line;
    if (!std::getline(in, line)) {
        throw LogTruncated(-1, "missing header line");
    }
    try {
        const auto h = Json::parse(line);
        log.header.clock_mode = clock_mode_from_string(h.at("clock_mode").get<std::string>());
        log.header.start_stamp_us = h.at("start_stamp_us").get<std::int64_t>();
        log.header.config_digest = h.value("config_digest", std::string{});
    } catch (const Json::exception& e) {
        throw LogTruncated(-1, std::string("bad header: ") + e.what());
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            log.messages.push_back(message_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw LogTruncated(static_cast<long long>(log.messages.size()) - 1, e.what());
        }
    }
    return log;
}

SessionLog read_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("E_FILE", "cannot open log file " + path.string());
    }
    return read_log(in);
}

} // namespace cobot::bus

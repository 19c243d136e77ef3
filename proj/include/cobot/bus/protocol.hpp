#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cobot/bus/broker.hpp"

namespace cobot::bus {

// Wire grammar shared by the TCP (newline-delimited) and WebSocket (one frame
// per text message) endpoints:
//
//   client -> broker  {"op":"pub","topic":T,"data":{...}}
//                     {"op":"sub","topic":P}        P: topic or "prefix/*"
//                     {"op":"unsub","topic":P}
//                     {"op":"tick","dt_us":N}       virtual clock only
//   broker -> client  {"op":"pub","topic":T,"seq":S,"stamp_us":U,"data":{...}}
//                     {"op":"ack","topic":T[,"seq":S]}
//                     {"op":"err","code":C,"message":M}
//
// An optional "id" on a request is echoed on its ack/err.

Json delivery_frame(const BusMessage& msg);
Json error_frame(std::string_view code, std::string_view message);

/// Applies one client frame to the broker. Never throws on bad input: every
/// failure becomes an "err" reply so the connection can stay open.
std::vector<Json> handle_frame(Broker& broker, ClientId client, std::string_view text);

} // namespace cobot::bus

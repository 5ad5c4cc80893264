#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "crisis/common/time.hpp"

namespace crisis::service {

enum class EventKind { segment_submitted, segment_reviewed, phase_advanced, export_created };
std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

/// One line of the append-only log. `seq` starts at 1 and has no gaps.
///
/// Payloads by kind:
///   segment_submitted {"segment": <segment JSON>, "imported": bool}
///   segment_reviewed  {"id", "verdict", "note", "reviewer"}
///   phase_advanced    {"pair", "from", "to", "by"}
///   export_created    {"receipt_id", "pair", "created_by", "options", "receipt"}
struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::segment_submitted;
  Timestamp at{};
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

nlohmann::ordered_json event_to_json(const Event& e);
/// Throws ParseError on a malformed record.
Event event_from_json(const nlohmann::ordered_json& j);

}  // namespace crisis::service

#include "crisis/service/events.hpp"

#include "crisis/common/error.hpp"

namespace crisis::service {

using Json = nlohmann::ordered_json;

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::segment_submitted: return "segment_submitted";
    case EventKind::segment_reviewed: return "segment_reviewed";
    case EventKind::phase_advanced: return "phase_advanced";
    case EventKind::export_created: return "export_created";
  }
  return "segment_submitted";
}

EventKind parse_event_kind(std::string_view s) {
  for (EventKind k : {EventKind::segment_submitted, EventKind::segment_reviewed, EventKind::phase_advanced,
                      EventKind::export_created}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown event kind '" + std::string(s) + "'");
}

Json event_to_json(const Event& e) {
  Json j;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  j["at"] = format_rfc3339(e.at);
  j["payload"] = e.payload;
  return j;
}

Event event_from_json(const Json& j) {
  try {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = parse_event_kind(j.at("kind").get<std::string>());
    e.at = parse_rfc3339(j.at("at").get<std::string>());
    e.payload = j.at("payload");
    if (!e.payload.is_object()) throw ParseError("event payload must be an object");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed event: ") + ex.what());
  }
}

}  // namespace crisis::service

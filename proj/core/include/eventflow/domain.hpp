#pragma once

#include "eventflow/time.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eventflow {

enum class EventType { concert, exhibition, sports, fireworks, fair, performance, religious };

inline constexpr std::array<EventType, 7> kAllEventTypes{EventType::concert,   EventType::exhibition,
                                                         EventType::sports,    EventType::fireworks,
                                                         EventType::fair,      EventType::performance,
                                                         EventType::religious};

/// Short identifier used in files and column names ("concert", "sports", ...).
std::string_view to_string(EventType t);
/// Descriptive label used in prompts ("music concerts", "sports competitions", ...).
std::string_view prompt_label(EventType t);
/// Accepts the short identifier or the prompt label, case-insensitively,
/// ignoring surrounding whitespace and trailing punctuation.
std::optional<EventType> parse_event_type(std::string_view text);

enum class EventSource { dedicated_site, tourism_board, mega_events, sports_list };

std::string_view to_string(EventSource s);
std::optional<EventSource> parse_event_source(std::string_view text);

struct RawEvent {
    std::string event_id;
    std::string title;
    std::string raw_time_text;
    std::string venue_text;
    std::string raw_description;
    EventSource source = EventSource::dedicated_site;
};

struct EventSession {
    std::string event_id;
    int sub_id = 1;
    DateTime start;
    DateTime end;

    friend bool operator==(const EventSession&, const EventSession&) = default;
};

struct Event {
    std::string event_id;
    std::string title;
    EventType event_type = EventType::concert;
    std::string summary;
    std::string venue;
    std::vector<EventSession> sessions;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Post {
    std::string post_id;
    std::string author_id;
    std::string title;
    std::string content;
    std::vector<std::string> hashtags;
    std::vector<std::string> geotags;
    DateTime created_at;
    std::int64_t likes = 0;
    std::int64_t collects = 0;

    friend bool operator==(const Post&, const Post&) = default;
};

}  // namespace eventflow

#include "eventflow/event_catalog.hpp"

#include "eventflow/error.hpp"
#include "eventflow/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace eventflow {

namespace {

struct TypeNames {
    EventType type;
    std::string_view id;
    std::string_view label;
    std::string_view singular;
};

constexpr TypeNames kTypeNames[] = {
    {EventType::concert, "concert", "music concerts", "music concert"},
    {EventType::exhibition, "exhibition", "exhibitions", "exhibition"},
    {EventType::sports, "sports", "sports competitions", "sports competition"},
    {EventType::fireworks, "fireworks", "fireworks displays", "fireworks display"},
    {EventType::fair, "fair", "fairs", "fair"},
    {EventType::performance, "performance", "performances", "performance"},
    {EventType::religious, "religious", "religious activities", "religious activity"},
};

std::vector<std::string> split_cells(const std::string& line) {
    char delimiter = ',';
    if (line.find('|') != std::string::npos) {
        delimiter = '|';
    } else if (line.find('\t') != std::string::npos) {
        delimiter = '\t';
    }
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == delimiter) {
            cells.push_back(text::trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(text::trim(cell));
    if (delimiter == '|') {
        // markdown rows carry outer pipes
        if (!cells.empty() && cells.front().empty()) cells.erase(cells.begin());
        if (!cells.empty() && cells.back().empty()) cells.pop_back();
    }
    return cells;
}

bool is_separator_row(const std::string& line) {
    return line.find('-') != std::string::npos &&
           std::all_of(line.begin(), line.end(), [](char c) { return c == '|' || c == '-' || c == ':' || c == ' ' || c == '+'; });
}

}  // namespace

std::string_view to_string(EventType t) {
    for (const auto& names : kTypeNames) {
        if (names.type == t) return names.id;
    }
    return "unknown";
}

std::string_view prompt_label(EventType t) {
    for (const auto& names : kTypeNames) {
        if (names.type == t) return names.label;
    }
    return "unknown";
}

std::optional<EventType> parse_event_type(std::string_view input) {
    std::string s = text::fold(input);
    while (!s.empty() && (s.back() == '.' || s.back() == '"' || s.back() == '\'' || s.back() == '*')) s.pop_back();
    while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '*')) s.erase(s.begin());
    s = text::trim(s);
    for (const auto& names : kTypeNames) {
        if (s == names.id || s == names.label || s == names.singular) return names.type;
    }
    return std::nullopt;
}

std::string_view to_string(EventSource s) {
    switch (s) {
        case EventSource::dedicated_site: return "dedicated-site";
        case EventSource::tourism_board: return "tourism-board";
        case EventSource::mega_events: return "mega-events";
        case EventSource::sports_list: return "sports-list";
    }
    return "unknown";
}

std::optional<EventSource> parse_event_source(std::string_view text) {
    for (auto s : {EventSource::dedicated_site, EventSource::tourism_board, EventSource::mega_events,
                   EventSource::sports_list}) {
        if (text == to_string(s)) return s;
    }
    return std::nullopt;
}

void FilterRules::validate() const {
    if (max_sessions < 1) throw ConfigError("event_catalog", "max_sessions must be >= 1");
}

void renumber_sessions(std::vector<EventSession>& sessions) {
    std::stable_sort(sessions.begin(), sessions.end(), [](const EventSession& a, const EventSession& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
    int sub_id = 1;
    for (auto& s : sessions) s.sub_id = sub_id++;
}

std::vector<EventSession> parse_session_table(std::string_view event_id, const std::string& model_output) {
    auto fail = [&](const std::string& why) {
        return UnparseableTime(fmt::format("event {}: {}", event_id, why), model_output);
    };
    std::vector<EventSession> sessions;
    std::set<int> seen_ids;
    std::istringstream lines(model_output);
    std::string raw_line;
    bool header_allowed = true;
    while (std::getline(lines, raw_line)) {
        const std::string line = text::trim(raw_line);
        if (line.empty() || line.starts_with("```") || is_separator_row(line)) continue;
        const auto cells = split_cells(line);
        if (cells.size() != 4) {
            throw fail(fmt::format("expected 4 columns, got {} in line '{}'", cells.size(), line));
        }
        if (header_allowed && text::fold(cells[0]) == "id" && text::fold(cells[1]) == "sub id") {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        if (cells[0] != event_id) throw fail(fmt::format("row for unexpected event id '{}'", cells[0]));
        int sub_id = 0;
        const auto res = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), sub_id);
        if (res.ec != std::errc{} || res.ptr != cells[1].data() + cells[1].size() || sub_id < 1) {
            throw fail(fmt::format("invalid sub id '{}'", cells[1]));
        }
        if (!seen_ids.insert(sub_id).second) throw fail(fmt::format("duplicate sub id {}", sub_id));
        const auto start = try_parse_datetime(cells[2]);
        const auto end = try_parse_datetime(cells[3]);
        if (!start || !end || cells[2][10] != ' ' || cells[3][10] != ' ') {
            throw fail(fmt::format("datetimes must be 'YYYY-MM-DD hh:mm:ss', got '{}' and '{}'", cells[2], cells[3]));
        }
        if (*end < *start) throw fail(fmt::format("session {} ends before it starts", sub_id));
        sessions.push_back({std::string(event_id), sub_id, *start, *end});
    }
    if (sessions.empty()) throw fail("no session rows in model output");
    renumber_sessions(sessions);
    return sessions;
}

std::vector<EventSession> structure_sessions(const RawEvent& raw, LlmGateway& gateway) {
    if (text::trim(raw.raw_time_text).empty()) {
        throw PreconditionError("event_catalog", fmt::format("event {} has empty raw_time_text", raw.event_id));
    }
    const std::string prompt = render(TemplateId::P1_time, {{"event_id", raw.event_id}, {"raw_time", raw.raw_time_text}});
    return parse_session_table(raw.event_id, gateway.complete(prompt));
}

std::string summarize_description(std::string_view raw_description, LlmGateway& gateway, std::size_t token_budget,
                                  std::string_view language) {
    if (text::trim(raw_description).empty()) {
        throw PreconditionError("event_catalog", "summarize_description needs a non-empty description");
    }
    if (token_budget == 0) throw PreconditionError("event_catalog", "token budget must be positive");
    const std::string prompt = render(TemplateId::P2_summary, {{"raw_description", std::string(raw_description)},
                                                               {"token_budget", std::to_string(token_budget)},
                                                               {"language", std::string(language)}});
    const std::string answer = gateway.complete(prompt);
    std::string summary = text::trim(answer);
    if (summary.empty()) throw GatewayError("model returned an empty summary", 0, answer);
    if (text::count_tokens(summary) > token_budget) {
        spdlog::debug("summary over budget ({} > {} tokens), truncating", text::count_tokens(summary), token_budget);
        summary = text::truncate_tokens(summary, token_budget);
    }
    return summary;
}

EventType classify(std::string_view title, std::string_view summary, LlmGateway& gateway,
                   std::string_view study_area) {
    if (text::trim(summary).empty()) throw PreconditionError("event_catalog", "classify needs a non-empty summary");
    std::vector<std::string_view> labels;
    for (auto t : kAllEventTypes) labels.push_back(prompt_label(t));
    const std::string prompt = render(TemplateId::P3_classify, {{"study_area", std::string(study_area)},
                                                                {"event_title", std::string(title)},
                                                                {"summary", std::string(summary)},
                                                                {"event_types", fmt::format("{}", fmt::join(labels, ", "))}});
    const std::string answer = gateway.complete(prompt);
    if (auto type = parse_event_type(answer)) return *type;
    throw ClassificationError(fmt::format("'{}' is not one of the predefined event types", text::trim(answer)), answer);
}

Event structure_event(const RawEvent& raw, LlmGateway& gateway, std::size_t token_budget, std::string_view language,
                      std::string_view study_area) {
    Event event;
    event.event_id = raw.event_id;
    event.title = raw.title;
    event.venue = text::trim(raw.venue_text);
    event.sessions = structure_sessions(raw, gateway);
    event.summary = summarize_description(raw.raw_description, gateway, token_budget, language);
    event.event_type = classify(raw.title, event.summary, gateway, study_area);
    return event;
}

std::vector<Event> filter_events(const std::vector<Event>& events, const FilterRules& rules) {
    std::set<std::string> whitelist;
    for (const auto& venue : rules.venue_whitelist) whitelist.insert(text::fold(venue));
    std::vector<Event> kept;
    for (const auto& event : events) {
        if (!rules.allowed_types.contains(event.event_type)) continue;
        if (static_cast<int>(event.sessions.size()) > rules.max_sessions) continue;
        if (!whitelist.empty() && !whitelist.contains(text::fold(event.venue))) continue;
        kept.push_back(event);
    }
    return kept;
}

void validate_event(const Event& event) {
    auto fail = [&](const std::string& why) {
        return PreconditionError("event_catalog", fmt::format("event {}: {}", event.event_id, why));
    };
    if (event.event_id.empty()) throw fail("empty event_id");
    if (event.sessions.empty()) throw fail("no sessions");
    for (std::size_t i = 0; i < event.sessions.size(); ++i) {
        const auto& s = event.sessions[i];
        if (s.end < s.start) throw fail(fmt::format("session {} ends before it starts", s.sub_id));
        if (s.sub_id != static_cast<int>(i) + 1) throw fail("sub ids must run 1..N");
        if (i > 0 && s.start < event.sessions[i - 1].start) throw fail("sessions not in chronological order");
    }
}

void validate_raw_catalog(const std::vector<RawEvent>& raw) {
    std::set<std::string> ids;
    for (const auto& r : raw) {
        if (r.event_id.empty()) throw PreconditionError("event_catalog", "raw event with empty event_id");
        if (!ids.insert(r.event_id).second) {
            throw PreconditionError("event_catalog", fmt::format("duplicate event_id {}", r.event_id));
        }
        if (text::trim(r.raw_time_text).empty()) {
            throw PreconditionError("event_catalog", fmt::format("event {} has empty raw_time_text", r.event_id));
        }
    }
}

}  // namespace eventflow

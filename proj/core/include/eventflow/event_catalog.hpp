#pragma once

#include "eventflow/domain.hpp"
#include "eventflow/llm_gateway.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace eventflow {

/// Heuristics that drop events unlikely to move cross-city travel demand.
struct FilterRules {
    std::set<EventType> allowed_types{EventType::concert, EventType::exhibition, EventType::sports,
                                      EventType::fireworks};
    int max_sessions = 30;
    /// Large-capacity venues. Empty disables the venue rule.
    std::vector<std::string> venue_whitelist;

    void validate() const;
};

/// Sorts sessions by (start, end) and renumbers sub ids 1..N.
void renumber_sessions(std::vector<EventSession>& sessions);

/// Strict reader for the four-column session table returned for Prompt 1.
/// Accepts '|', tab or ',' delimiters, an optional header row, markdown
/// separator rows and code fences; every other line must carry exactly
/// four cells. Throws UnparseableTime carrying the raw output.
std::vector<EventSession> parse_session_table(std::string_view event_id, const std::string& model_output);

/// Prompt 1: structured sessions for one raw event, renumbered in
/// chronological order.
std::vector<EventSession> structure_sessions(const RawEvent& raw, LlmGateway& gateway);

/// Prompt 2: summary of at most `token_budget` tokens (see text::count_tokens).
std::string summarize_description(std::string_view raw_description, LlmGateway& gateway,
                                  std::size_t token_budget = 120, std::string_view language = "Chinese");

/// Prompt 3: the event type, drawn from the predefined list.
EventType classify(std::string_view title, std::string_view summary, LlmGateway& gateway,
                   std::string_view study_area = "Hong Kong");

/// Full structuring of one raw event (sessions, summary, type).
Event structure_event(const RawEvent& raw, LlmGateway& gateway, std::size_t token_budget = 120,
                      std::string_view language = "Chinese", std::string_view study_area = "Hong Kong");

/// Keeps events whose type is allowed, whose session count is within the
/// limit and, when a whitelist is given, whose venue is whitelisted after
/// NFC normalization and case folding. Input order is preserved.
std::vector<Event> filter_events(const std::vector<Event>& events, const FilterRules& rules);

/// Throws PreconditionError when the event violates the catalog invariants.
void validate_event(const Event& event);

/// Checks event id uniqueness and non-empty time text across a raw catalog.
void validate_raw_catalog(const std::vector<RawEvent>& raw);

}  // namespace eventflow

#include "eventflow/prompts.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>

namespace eventflow {

namespace {

constexpr std::string_view kTimeBody =
    "Below is the raw description of an event's hosting time, including event ID: {event_id}, "
    "and event time: {raw_time}.\n"
    "\n"
    "Your task is to extract the exact start and end datetime for each event. If an event has multiple "
    "sessions, find the exact start and end datetime for each session. If a session does not have a specific "
    "start and end time, set the start time to \"00:00:00\" and the end time to \"23:59:59\" of the event day.\n"
    "\n"
    "Provide the output in four columns:\n"
    "- Id: The event ID.\n"
    "- Sub id: A unique number for each session of the event, starting from 1.\n"
    "- Start time: The start datetime of the event session in \"YYYY-MM-DD hh:mm:ss\" format.\n"
    "- End time: The end datetime of the event session in \"YYYY-MM-DD hh:mm:ss\" format.\n";

constexpr std::string_view kSummaryBody =
    "Please summarize the event information given the raw event description extracted from the web page: "
    "{raw_description}.\n"
    "\n"
    "Requirements are as follows:\n"
    "- Exclude details about time, location, registration, tickets, and payment; only focus on the event "
    "content.\n"
    "- Be concise within {token_budget} tokens.\n"
    "- Summarize in {language}.\n"
    "- Only provide the summarized event description without any additional explanations.\n";

constexpr std::string_view kClassifyBody =
    "Below is a description of an event that occurred in {study_area}, called {event_title}. {summary}. "
    "Please match the events into the following categories: {event_types}.\n"
    "\n"
    "Only provide the event type without any additional description.\n";

constexpr std::string_view kRelevanceBody =
    "Below, you will find a description of an event and the content of a social media post. Please compare "
    "their semantics and determine if the post {post_id} is related to the given event. Respond with \"Yes\" "
    "if the post is related, or \"No\" if it is not.\n"
    "\n"
    "Event Information:\n"
    "- Title: {event_title}\n"
    "- Type: {event_type}\n"
    "- Description: {summary}\n"
    "\n"
    "Social Media Post Details:\n"
    "- Title: {post_title}\n"
    "- Content: {post_content}\n"
    "- Geo-tags: {post_geotags}\n"
    "- Hashtags: {post_hashtags}\n"
    "\n"
    "Criteria for Relevance:\n"
    "- The post must reference an event occurring in {study_area}.\n"
    "- The post's content must demonstrate a clear connection to the event based on the provided event "
    "information.\n";

const std::array<PromptTemplate, 4> kTemplates{{
    {TemplateId::P1_time, kTimeBody},
    {TemplateId::P2_summary, kSummaryBody},
    {TemplateId::P3_classify, kClassifyBody},
    {TemplateId::P4_relevance, kRelevanceBody},
}};

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

struct Piece {
    bool placeholder;
    std::string_view text;  // literal text or placeholder name
};

std::vector<Piece> split_body(std::string_view body) {
    std::vector<Piece> pieces;
    std::size_t literal_start = 0;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() && is_name_char(body[j])) ++j;
            if (j < body.size() && body[j] == '}' && j > i + 1) {
                pieces.push_back({false, body.substr(literal_start, i - literal_start)});
                pieces.push_back({true, body.substr(i + 1, j - i - 1)});
                i = j + 1;
                literal_start = i;
                continue;
            }
        }
        ++i;
    }
    pieces.push_back({false, body.substr(literal_start)});
    return pieces;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> names;
    for (const auto& piece : split_body(body)) {
        if (!piece.placeholder) continue;
        std::string name(piece.text);
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
    }
    return names;
}

const PromptTemplate& prompt_template(TemplateId id) {
    return kTemplates[static_cast<std::size_t>(id)];
}

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::P1_time: return "P1_time";
        case TemplateId::P2_summary: return "P2_summary";
        case TemplateId::P3_classify: return "P3_classify";
        case TemplateId::P4_relevance: return "P4_relevance";
    }
    return "unknown";
}

std::string render(TemplateId id, const Bindings& bindings) {
    const auto pieces = split_body(prompt_template(id).body);
    std::vector<std::string> missing;
    for (const auto& piece : pieces) {
        if (piece.placeholder && !bindings.contains(piece.text) &&
            std::find(missing.begin(), missing.end(), piece.text) == missing.end()) {
            missing.emplace_back(piece.text);
        }
    }
    if (!missing.empty()) {
        throw MissingBinding(fmt::format("template {} has unbound placeholders: {}", to_string(id),
                                         fmt::join(missing, ", ")));
    }
    std::string out;
    for (const auto& piece : pieces) {
        if (piece.placeholder) {
            out += bindings.find(piece.text)->second;
        } else {
            out += piece.text;
        }
    }
    return out;
}

std::optional<Bindings> match(TemplateId id, std::string_view rendered) {
    const auto pieces = split_body(prompt_template(id).body);
    // pieces alternate literal, placeholder, literal, ..., literal
    const std::string_view head = pieces.front().text;
    const std::string_view tail = pieces.back().text;
    if (!rendered.starts_with(head) || !rendered.ends_with(tail) || rendered.size() < head.size() + tail.size()) {
        return std::nullopt;
    }
    Bindings out;
    std::size_t pos = head.size();
    const std::size_t limit = rendered.size() - tail.size();
    for (std::size_t k = 1; k + 1 < pieces.size(); k += 2) {
        const std::string_view name = pieces[k].text;
        const std::string_view next_literal = pieces[k + 1].text;
        std::size_t value_end = 0;
        if (k + 2 == pieces.size()) {
            value_end = limit;
        } else {
            value_end = rendered.find(next_literal, pos);
            if (value_end == std::string_view::npos || value_end > limit) return std::nullopt;
        }
        if (value_end < pos) return std::nullopt;
        std::string value(rendered.substr(pos, value_end - pos));
        if (auto it = out.find(name); it != out.end()) {
            if (it->second != value) return std::nullopt;
        } else {
            out.emplace(std::string(name), std::move(value));
        }
        pos = value_end + next_literal.size();
    }
    return out;
}

}  // namespace eventflow

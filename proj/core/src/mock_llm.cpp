#include "eventflow/mock_llm.hpp"

#include "eventflow/error.hpp"
#include "eventflow/prompts.hpp"
#include "eventflow/text.hpp"
#include "eventflow/time_expression.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <set>

namespace eventflow {

namespace {

bool contains_sequence(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

bool mentions_any(const std::vector<std::string>& tokens, const std::vector<std::string>& keywords) {
    return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& keyword) {
        return contains_sequence(tokens, text::word_tokens(keyword));
    });
}

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> sentences;
    std::string current;
    auto flush = [&] {
        auto t = text::trim(current);
        if (!t.empty()) sentences.push_back(std::move(t));
        current.clear();
    };
    std::size_t i = 0;
    while (i < s.size()) {
        bool boundary = false;
        std::size_t width = 1;
        if (s[i] == '.' || s[i] == '!' || s[i] == '?' || s[i] == '\n') {
            // "8.30" or "H.K." are not boundaries
            boundary = s[i] == '\n' || i + 1 == s.size() || s[i + 1] == ' ' || s[i + 1] == '\n';
        } else {
            for (std::string_view full_stop : {"。", "！", "？"}) {
                if (s.substr(i, full_stop.size()) == full_stop) {
                    boundary = true;
                    width = full_stop.size();
                    break;
                }
            }
        }
        current.append(s.substr(i, width));
        i += width;
        if (boundary) flush();
    }
    flush();
    return sentences;
}

std::string answer_time(const Bindings& b) {
    const std::string& event_id = b.at("event_id");
    const auto sessions = parse_time_expression(b.at("raw_time"));
    if (!sessions) return "Sorry, the event time could not be determined from the description.";
    std::string out = "Id | Sub id | Start time | End time\n";
    int sub_id = 1;
    for (const auto& [start, end] : *sessions) {
        out += fmt::format("{} | {} | {} | {}\n", event_id, sub_id++, format_datetime(start), format_datetime(end));
    }
    return out;
}

std::string answer_summary(const Bindings& b, const MockRuleSet& rules) {
    const std::string& description = b.at("raw_description");
    std::size_t budget = rules.echo_budget;
    const std::string& requested = b.at("token_budget");
    std::size_t parsed = 0;
    const auto res = std::from_chars(requested.data(), requested.data() + requested.size(), parsed);
    if (res.ec == std::errc{} && res.ptr == requested.data() + requested.size()) budget = std::min(budget, parsed);

    std::string kept;
    for (const auto& sentence : split_sentences(description)) {
        if (mentions_any(text::word_tokens(sentence), rules.summary_exclusions)) continue;
        if (!kept.empty()) kept += ' ';
        kept += sentence;
    }
    if (kept.empty()) kept = description;
    return text::truncate_tokens(kept, budget);
}

std::string answer_classify(const Bindings& b, const MockRuleSet& rules) {
    const auto tokens = text::word_tokens(b.at("event_title") + " " + b.at("summary"));
    for (const auto& [type, keywords] : rules.keyword_map) {
        if (mentions_any(tokens, keywords)) return std::string(prompt_label(type));
    }
    return "other";
}

std::string answer_relevance(const Bindings& b, const MockRuleSet& rules) {
    auto event_tokens = text::word_tokens(b.at("event_title"));
    if (const auto type = parse_event_type(b.at("event_type"))) {
        for (const auto& [t, keywords] : rules.keyword_map) {
            if (t != *type) continue;
            for (const auto& keyword : keywords) {
                const auto kt = text::word_tokens(keyword);
                event_tokens.insert(event_tokens.end(), kt.begin(), kt.end());
            }
        }
    }
    const auto post_tokens =
        text::word_tokens(b.at("post_title") + " " + b.at("post_content") + " " + b.at("post_hashtags"));
    return jaccard(event_tokens, post_tokens, rules.stopwords) >= rules.relevance_threshold ? "Yes" : "No";
}

}  // namespace

void MockRuleSet::validate() const {
    if (!(relevance_threshold >= 0.0 && relevance_threshold <= 1.0)) {
        throw ConfigError("llm_gateway", fmt::format("relevance_threshold {} outside [0, 1]", relevance_threshold));
    }
}

MockRuleSet default_mock_rules() {
    MockRuleSet rules;
    rules.keyword_map = {
        {EventType::concert, {"concert", "concerts", "live tour", "world tour", "gig", "演唱会", "演唱會", "音乐会"}},
        {EventType::exhibition, {"exhibition", "exhibitions", "expo", "museum", "gallery", "art fair", "展览", "展覽"}},
        {EventType::sports, {"marathon", "race", "match", "tournament", "championship", "sevens", "rugby",
                             "tennis", "golf", "football", "比赛", "比賽", "马拉松"}},
        {EventType::fireworks, {"fireworks", "firework", "pyrotechnic", "烟花", "煙花"}},
        {EventType::fair, {"fair", "bazaar", "market", "carnival", "市集"}},
        {EventType::performance, {"musical", "theatre", "theater", "drama", "opera", "ballet", "dance", "话剧"}},
        {EventType::religious, {"temple", "buddha", "church", "mass", "pilgrimage", "庙会", "祈福"}},
    };
    rules.summary_exclusions = {"ticket", "tickets", "price", "prices", "admission", "register", "registration",
                                "venue", "address", "payment", "pay", "booking", "pm", "am", "门票", "票价",
                                "地点", "时间", "报名", "购票"};
    rules.stopwords = {"the", "a",  "an", "of",   "and", "in",   "at",  "on",  "for", "to",   "with",
                       "is",  "are", "was", "were", "this", "that", "it",  "my",  "we",  "our", "i",
                       "you", "so", "just", "hong", "kong", "hk",  "香",  "港",  "的",  "了"};
    return rules;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::vector<std::string>& stopwords) {
    const std::set<std::string> stop(stopwords.begin(), stopwords.end());
    std::set<std::string> sa;
    std::set<std::string> sb;
    for (const auto& t : a) {
        if (!stop.contains(t)) sa.insert(t);
    }
    for (const auto& t : b) {
        if (!stop.contains(t)) sb.insert(t);
    }
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.contains(t) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::string mock_complete(std::string_view prompt, const MockRuleSet& rules) {
    if (auto b = match(TemplateId::P1_time, prompt)) return answer_time(*b);
    if (auto b = match(TemplateId::P2_summary, prompt)) return answer_summary(*b, rules);
    if (auto b = match(TemplateId::P3_classify, prompt)) return answer_classify(*b, rules);
    if (auto b = match(TemplateId::P4_relevance, prompt)) return answer_relevance(*b, rules);
    return "UNSUPPORTED PROMPT";
}

}  // namespace eventflow

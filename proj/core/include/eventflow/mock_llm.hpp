#pragma once

#include "eventflow/domain.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eventflow {

/// Deterministic stand-in for the chat model. Every answer is a pure
/// function of (prompt, rules).
struct MockRuleSet {
    /// Checked in order; the first type with a keyword present wins.
    std::vector<std::pair<EventType, std::vector<std::string>>> keyword_map;
    /// Jaccard threshold for the relevance rule, in [0, 1].
    double relevance_threshold = 0.12;
    /// Upper bound on the echo summary, in tokens.
    std::size_t echo_budget = 120;
    /// Sentences mentioning any of these are dropped from echo summaries
    /// (times, venues, tickets, payment).
    std::vector<std::string> summary_exclusions;
    /// Tokens ignored by the relevance rule.
    std::vector<std::string> stopwords;

    void validate() const;
};

MockRuleSet default_mock_rules();

/// Answers any of the four templates. Prompts that match no template get
/// the literal answer "UNSUPPORTED PROMPT".
std::string mock_complete(std::string_view prompt, const MockRuleSet& rules);

/// Jaccard similarity of two token sets after stopword removal.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::vector<std::string>& stopwords);

}  // namespace eventflow

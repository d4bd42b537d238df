#pragma once

#include "eventflow/time.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace eventflow {

/// Rule-based reader for the English event-time phrasings found on event
/// listing pages, used by the offline mock in place of a language model:
///
///   "16-17 Dec 2023 (Sat-Sun), 23-26 Dec 2023 8:00 pm - 8:10 pm"
///   "Every Fri 3-10 May 2024, 19:00-21:00"
///   "30 Jun 2023 - 2 Jul 2023 10:00-18:00"
///   "1 Jan 2024", "2024-01-01"
///
/// Parenthesised text is ignored. One clock range applies to every date; a
/// phrase without a clock range yields all-day sessions (00:00:00-23:59:59).
/// Returns the sessions in chronological order, or nullopt when the phrase
/// cannot be read.
std::optional<std::vector<std::pair<DateTime, DateTime>>> parse_time_expression(std::string_view text);

}  // namespace eventflow

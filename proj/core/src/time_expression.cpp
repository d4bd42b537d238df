#include "eventflow/time_expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>
#include <string>

namespace eventflow {

namespace {

using namespace std::chrono;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

std::string normalize(std::string_view input) {
    std::string s(input);
    for (std::string_view dash : {"–", "—", "‒", "～", "－", "~"}) replace_all(s, dash, "-");
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    replace_all(s, " to ", " - ");
    replace_all(s, " until ", " - ");
    std::string out;
    int depth = 0;
    for (char c : s) {
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            depth = std::max(0, depth - 1);
        } else if (depth == 0) {
            out += c;
        }
    }
    return out;
}

int month_from_name(std::string_view word) {
    static constexpr std::array<std::string_view, 12> names{"jan", "feb", "mar", "apr", "may", "jun",
                                                            "jul", "aug", "sep", "oct", "nov", "dec"};
    static constexpr std::array<std::string_view, 12> full{"january", "february", "march",     "april",
                                                           "may",     "june",     "july",      "august",
                                                           "september", "october", "november", "december"};
    for (std::size_t i = 0; i < 12; ++i) {
        if (word == names[i] || word == full[i] || (i == 8 && word == "sept")) return static_cast<int>(i) + 1;
    }
    return 0;
}

/// Monday = 0 ... Sunday = 6; -1 when not a weekday name.
int weekday_from_name(std::string_view word) {
    static constexpr std::array<std::string_view, 7> names{"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    static constexpr std::array<std::string_view, 7> full{"monday", "tuesday",  "wednesday", "thursday",
                                                          "friday", "saturday", "sunday"};
    for (std::size_t i = 0; i < 7; ++i) {
        if (word == names[i] || word == full[i] || word == std::string(full[i]) + "s" ||
            word == std::string(names[i]) + "s" || (i == 1 && word == "tues") || (i == 3 && word == "thur") ||
            (i == 3 && word == "thurs")) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

struct ClockRange {
    seconds start{0};
    seconds end{0};
};

int to_24h(int hour, const std::string& meridiem) {
    if (meridiem == "pm" && hour < 12) return hour + 12;
    if (meridiem == "am" && hour == 12) return 0;
    return hour;
}

/// Extracts and blanks out the first clock range. A lone clock time gives a
/// session running to the end of the day.
std::optional<ClockRange> take_clock_range(std::string& s, bool& malformed) {
    static const std::regex range_re(
        R"((\d{1,2})(?::(\d{2}))?\s*(am|pm|a\.m\.|p\.m\.)?\s*-\s*(\d{1,2})(?::(\d{2}))?\s*(am|pm|a\.m\.|p\.m\.)?)");
    static const std::regex single_re(R"((\d{1,2})(?::(\d{2}))\s*(am|pm)?|(\d{1,2})\s*(am|pm))");

    auto clean = [](std::string m) {
        replace_all(m, ".", "");
        return m;
    };
    for (std::sregex_iterator it(s.begin(), s.end(), range_re), end; it != end; ++it) {
        const auto& m = *it;
        const bool left_clock = m[2].matched || m[3].matched;
        const bool right_clock = m[5].matched || m[6].matched;
        if (!left_clock || !right_clock) continue;
        std::string left_mer = clean(m[3].str());
        const std::string right_mer = clean(m[6].str());
        int h1 = std::stoi(m[1].str());
        int h2 = std::stoi(m[4].str());
        const int m1 = m[2].matched ? std::stoi(m[2].str()) : 0;
        const int m2 = m[5].matched ? std::stoi(m[5].str()) : 0;
        if (left_mer.empty() && !right_mer.empty()) {
            // "8:00 - 10:00 pm": the trailing meridiem governs both ends when consistent.
            const int candidate = to_24h(h1, right_mer);
            left_mer = (candidate * 60 + m1 <= to_24h(h2, right_mer) * 60 + m2) ? right_mer : "";
        }
        h1 = to_24h(h1, left_mer);
        h2 = to_24h(h2, right_mer);
        if (h1 > 23 || h2 > 23 || m1 > 59 || m2 > 59) {
            malformed = true;
            return std::nullopt;
        }
        s.replace(static_cast<std::size_t>(m.position()), static_cast<std::size_t>(m.length()),
                  std::string(static_cast<std::size_t>(m.length()), ' '));
        return ClockRange{hours{h1} + minutes{m1}, hours{h2} + minutes{m2}};
    }
    std::smatch m;
    if (std::regex_search(s, m, single_re)) {
        int h = 0;
        int mi = 0;
        std::string mer;
        if (m[1].matched) {
            h = std::stoi(m[1].str());
            mi = std::stoi(m[2].str());
            mer = m[3].str();
        } else {
            h = std::stoi(m[4].str());
            mer = m[5].str();
        }
        h = to_24h(h, mer);
        if (h > 23 || mi > 59) {
            malformed = true;
            return std::nullopt;
        }
        s.replace(static_cast<std::size_t>(m.position()), static_cast<std::size_t>(m.length()),
                  std::string(static_cast<std::size_t>(m.length()), ' '));
        return ClockRange{hours{h} + minutes{mi}, hours{23} + minutes{59} + seconds{59}};
    }
    return std::nullopt;
}

/// Rewrites ISO dates into "d mon yyyy" so one grammar handles both.
std::string rewrite_iso_dates(const std::string& s) {
    static const std::regex iso_re(R"((\d{4})-(\d{2})-(\d{2}))");
    static constexpr std::array<std::string_view, 12> names{"jan", "feb", "mar", "apr", "may", "jun",
                                                            "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string out;
    auto begin = s.cbegin();
    std::smatch m;
    while (std::regex_search(begin, s.cend(), m, iso_re)) {
        out.append(begin, m[0].first);
        const int month = std::stoi(m[2].str());
        if (month < 1 || month > 12) return {};
        out += " " + std::to_string(std::stoi(m[3].str())) + " " + std::string(names[month - 1]) + " " + m[1].str() + " ";
        begin = m[0].second;
    }
    out.append(begin, s.cend());
    return out;
}

enum class TokKind { number, month, weekday, every, dash, separator };

struct Token {
    TokKind kind;
    int value = 0;
};

std::optional<std::vector<Token>> tokenize(const std::string& s) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            const int value = std::stoi(s.substr(i, j - i));
            // ordinal suffixes
            if (s.compare(j, 2, "st") == 0 || s.compare(j, 2, "nd") == 0 || s.compare(j, 2, "rd") == 0 ||
                s.compare(j, 2, "th") == 0) {
                j += 2;
            }
            tokens.push_back({TokKind::number, value});
            i = j;
        } else if (std::isalpha(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            const std::string word = s.substr(i, j - i);
            if (const int month = month_from_name(word); month != 0) {
                tokens.push_back({TokKind::month, month});
            } else if (const int wd = weekday_from_name(word); wd >= 0) {
                tokens.push_back({TokKind::weekday, wd});
            } else if (word == "every" || word == "each") {
                tokens.push_back({TokKind::every, 0});
            } else if (word == "and") {
                tokens.push_back({TokKind::separator, 0});
            }
            // other words ("from", "daily", ...) carry no date information
            i = j;
        } else if (c == '-') {
            tokens.push_back({TokKind::dash, 0});
            ++i;
        } else if (c == ',' || c == ';' || c == '&' || c == '/' || c == '|') {
            tokens.push_back({TokKind::separator, 0});
            ++i;
        } else {
            ++i;
        }
    }
    return tokens;
}

struct DateItem {
    int day = 0;
    int month = 0;
    int year = 0;
    bool range_to_next = false;
    int weekday_filter = -1;
};

std::optional<std::vector<std::pair<DateTime, DateTime>>> parse_impl(std::string_view text) {
    std::string s = normalize(text);
    bool malformed = false;
    const auto clock = take_clock_range(s, malformed);
    if (malformed) return std::nullopt;
    s = rewrite_iso_dates(s);
    if (s.empty()) return std::nullopt;
    const auto tokens = tokenize(s);
    if (!tokens) return std::nullopt;

    std::vector<DateItem> items;
    int weekday_filter = -1;
    bool pending_every = false;
    bool pending_dash = false;
    for (std::size_t i = 0; i < tokens->size(); ++i) {
        const Token& tok = (*tokens)[i];
        switch (tok.kind) {
            case TokKind::every:
                pending_every = true;
                weekday_filter = -1;
                break;
            case TokKind::weekday:
                if (pending_every) {
                    weekday_filter = tok.value;
                    pending_every = false;
                }
                // bare weekday names are informational
                break;
            case TokKind::number: {
                if (tok.value >= 1000) {
                    // year: applies to every preceding item still lacking one
                    if (items.empty()) return std::nullopt;
                    for (auto it = items.rbegin(); it != items.rend() && it->year == 0; ++it) it->year = tok.value;
                    break;
                }
                if (tok.value < 1 || tok.value > 31) return std::nullopt;
                if (pending_dash) {
                    if (items.empty()) return std::nullopt;
                    items.back().range_to_next = true;
                }
                pending_dash = false;
                items.push_back({tok.value, 0, 0, false, weekday_filter});
                break;
            }
            case TokKind::month:
                if (items.empty()) return std::nullopt;
                for (auto it = items.rbegin(); it != items.rend() && it->month == 0; ++it) it->month = tok.value;
                break;
            case TokKind::dash:
                if (items.empty()) break;  // e.g. "Sat-Sun" without days
                pending_dash = true;
                break;
            case TokKind::separator:
                pending_dash = false;
                break;
        }
    }
    if (items.empty()) return std::nullopt;

    // Items lacking a month or year borrow them from the next item that has one.
    for (std::size_t i = items.size(); i-- > 0;) {
        if (items[i].month == 0 && i + 1 < items.size()) items[i].month = items[i + 1].month;
        if (items[i].year == 0 && i + 1 < items.size()) items[i].year = items[i + 1].year;
    }

    std::set<Date> dates;
    auto to_date = [](const DateItem& item) -> std::optional<Date> {
        if (item.month == 0 || item.year == 0) return std::nullopt;
        const year_month_day ymd{year{item.year}, month{static_cast<unsigned>(item.month)},
                                 day{static_cast<unsigned>(item.day)}};
        if (!ymd.ok()) return std::nullopt;
        return sys_days{ymd};
    };
    auto accept = [&dates](Date d, int filter) {
        if (filter < 0 || weekday_index(d) == filter) dates.insert(d);
    };
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto first = to_date(items[i]);
        if (!first) return std::nullopt;
        if (items[i].range_to_next) {
            if (i + 1 >= items.size()) return std::nullopt;
            const auto last = to_date(items[i + 1]);
            if (!last || *last < *first) return std::nullopt;
            const int filter = items[i].weekday_filter;
            for (Date d = *first; d <= *last; d += days{1}) accept(d, filter);
            ++i;
        } else {
            accept(*first, items[i].weekday_filter);
        }
    }
    if (dates.empty()) return std::nullopt;

    std::vector<std::pair<DateTime, DateTime>> sessions;
    for (Date d : dates) {
        if (clock) {
            DateTime start = DateTime{d} + clock->start;
            DateTime end = DateTime{d} + clock->end;
            if (end < start) end += std::chrono::days{1};  // runs past midnight
            sessions.emplace_back(start, end);
        } else {
            sessions.emplace_back(DateTime{d}, DateTime{d} + hours{23} + minutes{59} + seconds{59});
        }
    }
    return sessions;
}

}  // namespace

std::optional<std::vector<std::pair<DateTime, DateTime>>> parse_time_expression(std::string_view text) {
    try {
        return parse_impl(text);
    } catch (const std::exception&) {
        // numeric overflow in a digit run
        return std::nullopt;
    }
}

}  // namespace eventflow

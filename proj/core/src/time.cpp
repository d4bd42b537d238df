#include "eventflow/time.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <charconv>

namespace eventflow {

namespace {

using namespace std::chrono;

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return res.ec == std::errc{};
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
    return sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

DateTime make_datetime(int year, unsigned month, unsigned day, int hour, int minute, int second) {
    return DateTime{make_date(year, month, day)} + hours{hour} + minutes{minute} + seconds{second};
}

std::optional<Date> try_parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, m) || !parse_fixed(text, 8, 2, d)) {
        return std::nullopt;
    }
    const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                             std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<DateTime> try_parse_datetime(std::string_view text) {
    if (text.size() != 19 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    auto date = try_parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed(text, 11, 2, hh) || !parse_fixed(text, 14, 2, mm) || !parse_fixed(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return DateTime{*date} + hours{hh} + minutes{mm} + seconds{ss};
}

Date parse_date(std::string_view text) {
    auto d = try_parse_date(text);
    if (!d) throw IoError("io", fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
    return *d;
}

DateTime parse_datetime(std::string_view text) {
    auto t = try_parse_datetime(text);
    if (!t) throw IoError("io", fmt::format("invalid datetime '{}', expected YYYY-MM-DD hh:mm:ss", text));
    return *t;
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

std::string format_datetime(DateTime t, bool iso_t) {
    const Date d = day_of(t);
    const hh_mm_ss hms{t - DateTime{d}};
    return fmt::format("{}{}{:02d}:{:02d}:{:02d}", format_date(d), iso_t ? 'T' : ' ', hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

int weekday_index(Date d) {
    return static_cast<int>(weekday{d}.iso_encoding()) - 1;
}

DateTime add_months(DateTime t, int months) {
    const Date d = day_of(t);
    const auto time_of_day = t - DateTime{d};
    year_month_day ymd{d};
    year_month shifted = ymd.year() / ymd.month();
    shifted += std::chrono::months{months};
    const auto last = (shifted / std::chrono::last).day();
    const auto day = ymd.day() > last ? last : ymd.day();
    return DateTime{sys_days{shifted / day}} + time_of_day;
}

}  // namespace eventflow

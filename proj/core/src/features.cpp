#include "eventflow/features.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eventflow {

namespace {

using std::chrono::days;

void sort_and_check(std::vector<HolidaySpan>& spans, std::string_view what) {
    std::sort(spans.begin(), spans.end(), [](const HolidaySpan& a, const HolidaySpan& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].end < spans[i].start) {
            throw ConfigError("features", fmt::format("{} span '{}' ends before it starts", what, spans[i].name));
        }
        if (i > 0 && spans[i].start <= spans[i - 1].end) {
            throw ConfigError("features", fmt::format("{} spans '{}' and '{}' overlap", what, spans[i - 1].name, spans[i].name));
        }
    }
}

const HolidaySpan* containing(const std::vector<HolidaySpan>& spans, Date d) {
    for (const auto& s : spans) {
        if (s.start <= d && d <= s.end) return &s;
    }
    return nullptr;
}

/// Calendar distance from a to b (a < b) with weekend days strictly between
/// them removed.
int working_distance(Date a, Date b) {
    int distance = static_cast<int>((b - a).count());
    for (Date d = a + days{1}; d < b; d += days{1}) {
        if (is_weekend(d)) --distance;
    }
    return distance;
}

std::string summarize_dates(const std::vector<Date>& missing) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) parts.push_back(format_date(missing[i]));
    std::string out = fmt::format("{}", fmt::join(parts, ", "));
    if (missing.size() > 10) out += fmt::format(" (+{} more)", missing.size() - 10);
    return out;
}

}  // namespace

void CalendarContext::validate() {
    sort_and_check(holidays, "holiday");
    sort_and_check(school_vacations, "school vacation");
    if (coverage_end < coverage_start) throw ConfigError("features", "calendar coverage ends before it starts");
}

HolidayFeatures holiday_features(Date date, const CalendarContext& cal) {
    if (date < cal.coverage_start || date > cal.coverage_end) {
        throw CalendarOutOfRange(fmt::format("{} outside calendar coverage {}..{}", format_date(date),
                                             format_date(cal.coverage_start), format_date(cal.coverage_end)));
    }
    HolidayFeatures f;
    const HolidaySpan* inside = containing(cal.holidays, date);
    if (inside != nullptr) f.holidays_remaining = static_cast<int>((inside->end - date).count()) + 1;

    const bool weekday = !is_weekend(date);
    std::optional<int> nearest;
    for (const auto& span : cal.holidays) {
        if (span.start == date + days{1} && weekday) f.day_before_holiday = 1;
        if (inside == nullptr && weekday) {
            const bool before = span.start - days{7} <= date && date < span.start;
            const bool after = span.end < date && date <= span.end + days{7};
            if (before || after) f.week_near_holiday = 1;
        }
        if (inside == nullptr) {
            int d = 0;
            if (span.start > date) {
                d = working_distance(date, span.start);
            } else {
                d = working_distance(span.end, date);
            }
            nearest = nearest ? std::min(*nearest, d) : d;
        }
    }
    f.days_to_nearest_holiday = inside != nullptr ? 0 : nearest.value_or(0);
    f.school_holiday = containing(cal.school_vacations, date) != nullptr ? 1 : 0;
    return f;
}

std::array<int, 6> dow_dummies(Date date) {
    std::array<int, 6> out{};
    const int wd = weekday_index(date);  // Monday = 0
    if (wd == 0) {
        out[0] = 1;
    } else if (wd >= 2) {
        out[static_cast<std::size_t>(wd - 1)] = 1;
    }
    return out;
}

double wma(std::span<const double> window) {
    if (window.empty()) throw InsufficientHistory("features", "wma needs at least one value");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (!std::isfinite(window[i])) throw PreconditionError("features", "wma input must be finite");
        const double weight = static_cast<double>(i + 1);  // newest gets P, oldest 1
        num += weight * window[i];
        den += weight;
    }
    return num / den;
}

double changing_rate(std::span<const double> series, std::size_t t, int period) {
    if (period < 1) throw PreconditionError("features", "wma period must be >= 1");
    const auto p = static_cast<std::size_t>(period);
    if (t < p + 1 || t >= series.size() + 1) {
        throw InsufficientHistory("features", fmt::format("changing rate at t={} needs {} prior values", t, p + 1));
    }
    const double m1 = wma(series.subspan(t - p, p));
    const double m2 = wma(series.subspan(t - p - 1, p));
    if (m2 == 0.0) throw DegenerateBaseline(fmt::format("weighted moving average is zero before t={}", t));
    return (m1 - m2) / m2;
}

std::string_view to_string(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::FS1: return "FS1";
        case FeatureSet::FS2: return "FS2";
        case FeatureSet::FS3: return "FS3";
        case FeatureSet::FS4: return "FS4";
        case FeatureSet::FS5: return "FS5";
    }
    return "FS?";
}

std::optional<FeatureSet> parse_feature_set(std::string_view text) {
    for (auto fs : {FeatureSet::FS1, FeatureSet::FS2, FeatureSet::FS3, FeatureSet::FS4, FeatureSet::FS5}) {
        if (text == to_string(fs)) return fs;
    }
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '5') return static_cast<FeatureSet>(text[0] - '0');
    return std::nullopt;
}

std::vector<std::string> feature_columns(FeatureSet fs, bool split_exhibition_wom) {
    std::vector<std::string> cols{"dow_mon",
                                  "dow_wed",
                                  "dow_thu",
                                  "dow_fri",
                                  "dow_sat",
                                  "dow_sun",
                                  "holidays_remaining",
                                  "day_before_holiday",
                                  "week_near_holiday",
                                  "days_to_nearest_holiday",
                                  "school_holiday",
                                  "rainfall_mm",
                                  "tmax_c",
                                  "typhoon",
                                  "wma_change_rate"};
    auto add_family = [&cols](std::string_view prefix) {
        for (auto t : kFeatureEventTypes) cols.push_back(fmt::format("{}_{}", prefix, to_string(t)));
    };
    switch (fs) {
        case FeatureSet::FS1: break;
        case FeatureSet::FS2: add_family("count"); break;
        case FeatureSet::FS3: add_family("overall"); break;
        case FeatureSet::FS4: add_family("promo"); break;
        case FeatureSet::FS5:
            add_family("promo");
            for (auto t : kWomEventTypes) {
                if (t == EventType::exhibition && split_exhibition_wom) {
                    cols.emplace_back("wom_exhibition_early");
                    cols.emplace_back("wom_exhibition_late");
                } else {
                    cols.push_back(fmt::format("wom_{}", to_string(t)));
                }
            }
            break;
    }
    return cols;
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<FlowRecord> select_segment(const std::vector<FlowRecord>& flows, const std::string& segment) {
    std::map<Date, double> by_date;
    for (const auto& f : flows) {
        if (!segment.empty() && f.segment != segment) continue;
        by_date[f.date] += f.arrivals;
    }
    if (!segment.empty() && by_date.empty()) {
        throw PreconditionError("features", fmt::format("no flows for segment '{}'", segment));
    }
    std::vector<FlowRecord> out;
    out.reserve(by_date.size());
    for (const auto& [date, arrivals] : by_date) out.push_back({date, arrivals, segment});
    return out;
}

FeatureMatrix assemble(Date first, Date last, const FeatureInputs& inputs, FeatureSet fs,
                       const AssembleOptions& options) {
    if (last < first) throw PreconditionError("features", "assemble range is empty");
    if (inputs.events.size() != inputs.metrics.size()) {
        throw PreconditionError("features", "metrics must be aligned with events");
    }
    const int history = kWmaWindow + 1;
    const Date history_start = first - days{history};

    std::map<Date, double> flow_by_date;
    for (const auto& f : inputs.flows) flow_by_date[f.date] += f.arrivals;
    std::map<Date, const WeatherRecord*> weather_by_date;
    for (const auto& w : inputs.weather) weather_by_date[w.date] = &w;

    std::vector<Date> missing_flows;
    std::vector<Date> missing_weather;
    std::vector<double> series;
    for (Date d = history_start; d <= last; d += days{1}) {
        const auto it = flow_by_date.find(d);
        if (it == flow_by_date.end()) {
            missing_flows.push_back(d);
            series.push_back(0.0);
        } else {
            series.push_back(it->second);
        }
        if (d >= first && !weather_by_date.contains(d)) missing_weather.push_back(d);
    }
    std::vector<std::string> gaps;
    if (!missing_flows.empty()) gaps.push_back(fmt::format("flows: {}", summarize_dates(missing_flows)));
    if (!missing_weather.empty()) gaps.push_back(fmt::format("weather: {}", summarize_dates(missing_weather)));
    if (first < inputs.calendar.coverage_start || last > inputs.calendar.coverage_end) {
        gaps.push_back(fmt::format("calendar: coverage {}..{} does not include {}..{}",
                                   format_date(inputs.calendar.coverage_start), format_date(inputs.calendar.coverage_end),
                                   format_date(first), format_date(last)));
    }
    if (!gaps.empty()) throw CoverageGap(fmt::format("missing inputs; {}", fmt::join(gaps, "; ")));

    FeatureMatrix fm;
    fm.feature_set = fs;
    const bool split = options.split_exhibition_wom && fs == FeatureSet::FS5;
    fm.columns = feature_columns(fs, split);
    const auto n_rows = static_cast<std::size_t>((last - first).count()) + 1;
    fm.values = Matrix::Zero(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(fm.columns.size()));
    fm.trend_column = 14;

    for (std::size_t r = 0; r < n_rows; ++r) {
        const Date d = first + days{static_cast<int>(r)};
        fm.dates.push_back(d);
        const auto t = static_cast<std::size_t>(history) + r;
        fm.target.push_back(series[t]);
        auto row = fm.values.row(static_cast<Eigen::Index>(r));

        const auto dow = dow_dummies(d);
        for (std::size_t k = 0; k < 6; ++k) row(static_cast<Eigen::Index>(k)) = dow[k];
        const auto h = holiday_features(d, inputs.calendar);
        row(6) = h.holidays_remaining;
        row(7) = h.day_before_holiday;
        row(8) = h.week_near_holiday;
        row(9) = h.days_to_nearest_holiday;
        row(10) = h.school_holiday;
        const WeatherRecord& w = *weather_by_date.at(d);
        row(11) = w.rainfall_mm;
        row(12) = w.tmax_c;
        row(13) = w.typhoon ? 1.0 : 0.0;
        row(14) = changing_rate(series, t, kWmaWindow);

        Eigen::Index col = 15;
        auto add_family = [&](AggregateKind kind) {
            for (auto type : kFeatureEventTypes) {
                row(col++) = daily_type_aggregate(inputs.events, inputs.metrics, d, type, kind);
            }
        };
        switch (fs) {
            case FeatureSet::FS1: break;
            case FeatureSet::FS2: add_family(AggregateKind::count); break;
            case FeatureSet::FS3: add_family(AggregateKind::overall); break;
            case FeatureSet::FS4: add_family(AggregateKind::promotional); break;
            case FeatureSet::FS5:
                add_family(AggregateKind::promotional);
                for (auto type : kWomEventTypes) {
                    if (type == EventType::exhibition && split) {
                        double early = 0.0;
                        double late = 0.0;
                        for (std::size_t e = 0; e < inputs.events.size(); ++e) {
                            const Event& ev = inputs.events[e];
                            if (ev.event_type != EventType::exhibition) continue;
                            const auto& womp = inputs.metrics[e].wom_per_session;
                            const Date first_day = day_of(ev.sessions.front().start);
                            for (std::size_t k = 0; k < ev.sessions.size(); ++k) {
                                if (day_of(ev.sessions[k].start) != d) continue;
                                ((day_of(ev.sessions[k].start) - first_day).count() < 4 ? early : late) += womp[k];
                            }
                        }
                        row(col++) = early;
                        row(col++) = late;
                    } else {
                        row(col++) = daily_type_aggregate(inputs.events, inputs.metrics, d, type, AggregateKind::wom);
                    }
                }
                break;
        }
    }
    return fm;
}

FeatureMatrix assemble_all(const FeatureInputs& inputs, FeatureSet fs, const AssembleOptions& options) {
    if (inputs.flows.empty()) throw CoverageGap("no flow records");
    Date first_flow = inputs.flows.front().date;
    Date last_flow = first_flow;
    for (const auto& f : inputs.flows) {
        first_flow = std::min(first_flow, f.date);
        last_flow = std::max(last_flow, f.date);
    }
    const Date first = first_flow + days{kWmaWindow + 1};
    if (first > last_flow) {
        throw InsufficientHistory("features", fmt::format("need more than {} days of flows", kWmaWindow + 1));
    }
    return assemble(first, last_flow, inputs, fs, options);
}

}  // namespace eventflow

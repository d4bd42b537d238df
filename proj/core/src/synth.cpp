#include "eventflow/synth.hpp"

#include "eventflow/error.hpp"
#include "eventflow/popularity.hpp"
#include "eventflow/tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace eventflow {

using nlohmann::json;
using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;

namespace {

/// Portable random draws on top of mt19937_64 (the standard distributions
/// are implementation-defined, which would break byte-identical output).
class Random {
public:
    explicit Random(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return uniform01(rng_); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(uniform_index(rng_, static_cast<std::uint64_t>(hi - lo + 1)));
    }
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        // sum of exponential gaps; fine for the small rates used here
        int k = 0;
        double t = -std::log(1.0 - uniform());
        while (t < lambda) {
            ++k;
            t += -std::log(1.0 - uniform());
        }
        return k;
    }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(items.size()) - 1))];
    }

private:
    std::mt19937_64 rng_;
};

HolidaySpan span(std::string name, int y0, unsigned m0, unsigned d0, int y1, unsigned m1, unsigned d1) {
    return HolidaySpan{std::move(name), make_date(y0, m0, d0), make_date(y1, m1, d1)};
}

struct TypeProfile {
    std::vector<int> session_counts;
    std::vector<int> gaps;  ///< days between consecutive sessions
    int start_minute;
    int end_minute;
    std::vector<std::string> titles;
    std::vector<std::string> venues;
    std::string blurb;
};

const TypeProfile& profile(EventType type) {
    static const std::map<EventType, TypeProfile> profiles{
        {EventType::concert,
         {{2, 3, 4}, {1, 1, 2, 6, 7}, 20 * 60, 22 * 60 + 30,
          {"Aurora Lin", "Neon Tide", "Jason Mak", "Echo Valley", "Silver Lantern", "Midnight Ferry", "Coral Bay",
           "Luna Chan", "Paper Planes", "Harbour Lights"},
          {"Hong Kong Coliseum", "AsiaWorld-Arena", "Kai Tak Stadium"},
          "brings a full band and a new stage show for one of the biggest concert nights of the year."}},
        {EventType::exhibition,
         {{4, 5, 6, 7, 8}, {1}, 10 * 60, 18 * 60,
          {"Dinosaur Kingdom", "Future Cities", "Ocean Worlds", "Silk Road Treasures", "Light and Shadow",
           "Robots Among Us", "Ancient Egypt", "Space Odyssey"},
          {"Hong Kong Convention and Exhibition Centre", "AsiaWorld-Expo"},
          "gathers rare pieces from collections around the world in an immersive exhibition."}},
        {EventType::sports,
         {{1, 2, 3, 4, 5}, {1, 1, 2}, 14 * 60, 17 * 60,
          {"Harbour Cup Football", "City Tennis Championship", "Rugby Sevens Invitational", "Island Golf Open",
           "Victoria Marathon", "Dragon Basketball Match"},
          {"Hong Kong Stadium", "Kai Tak Sports Park", "Victoria Park"},
          "sees top teams from the region compete in a championship weekend."}},
        {EventType::fireworks,
         {{1}, {1}, 21 * 60, 21 * 60 + 23,
          {"Harbour Fireworks", "Festival Fireworks Display", "Lunar New Year Fireworks"},
          {"Victoria Harbour"},
          "lights up the harbour with a choreographed fireworks display."}},
        {EventType::fair,
         {{2, 3, 4}, {1}, 11 * 60, 20 * 60,
          {"Winter Bazaar", "Weekend Craft Market", "Night Carnival", "Book Fair Preview"},
          {"PMQ", "Central Harbourfront"},
          "offers local stalls, food trucks and workshops for families."}},
        {EventType::performance,
         {{1, 2, 3, 4, 5}, {1}, 19 * 60 + 30, 22 * 60,
          {"Swan Lake Ballet", "Cantonese Opera Gala", "Les Miserables Musical", "Modern Drama Night"},
          {"Sheung Wan Civic Centre", "Tsuen Wan Town Hall"},
          "returns to the stage with a new cast and orchestra."}},
        {EventType::religious,
         {{1, 2, 3}, {1}, 9 * 60, 17 * 60,
          {"Tin Hau Temple Festival", "Buddha Birthday Blessing", "Che Kung Temple Prayer"},
          {"Joss House Bay", "Sha Tin"},
          "invites visitors to traditional rituals and blessings."}},
    };
    return profiles.at(type);
}

const std::vector<std::string>& chatter() {
    static const std::vector<std::string> lines{
        "Best egg tarts in Central, queue was worth it",
        "Rainy afternoon walk along the harbour",
        "Tried the new dim sum place near the ferry pier",
        "Shopping haul from Causeway Bay",
        "Sunset from the Peak tonight",
        "Weekend hike on Dragon's Back",
    };
    return lines;
}

std::string month_abbrev(unsigned m) {
    static const std::array<const char*, 12> names{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    return names[m - 1];
}

std::string clock(int minute_of_day) {
    return fmt::format("{:02}:{:02}", minute_of_day / 60, minute_of_day % 60);
}

/// Free-text schedule in the style of event listing sites.
std::string time_text(const std::vector<Date>& dates, const TypeProfile& p) {
    std::vector<std::string> parts;
    for (Date d : dates) {
        const std::chrono::year_month_day ymd(d);
        parts.push_back(fmt::format("{} {} {}", static_cast<unsigned>(ymd.day()),
                                    month_abbrev(static_cast<unsigned>(ymd.month())), static_cast<int>(ymd.year())));
    }
    return fmt::format("{} {}-{}", fmt::join(parts, ", "), clock(p.start_minute), clock(p.end_minute));
}

DateTime at(Date d, int minute_of_day) {
    return DateTime(d) + minutes{minute_of_day};
}

/// Random instant on day d between 08:00 and 23:00.
DateTime daytime(Random& r, Date d) {
    return DateTime(d) + seconds{r.integer(8 * 3600, 23 * 3600 - 1)};
}

DateTime between(Random& r, DateTime a, DateTime b) {
    return a + seconds{r.integer(0, (b - a).count() - 1)};
}

struct DraftPost {
    Post post;
    std::string event_id;
    bool related = true;
};

bool has_effect(EventType type, std::size_t sessions, const SynthConfig& cfg) {
    return sessions <= 30 && (cfg.beta.contains(type) || cfg.beta_wom.contains(type));
}

double lookup(const std::map<EventType, double>& m, EventType t) {
    const auto it = m.find(t);
    return it == m.end() ? 0.0 : it->second;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_days < kWmaWindow + 3) throw ConfigInvalid(fmt::format("n_days must be at least {}", kWmaWindow + 3));
    for (double b : weekly_base) {
        if (!(b >= 0.0)) throw ConfigInvalid("weekly base values must be >= 0");
    }
    auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigInvalid(fmt::format("{} must be finite and >= 0", what));
    };
    non_negative(holiday_lift, "holiday_lift");
    non_negative(day_before_lift, "day_before_lift");
    non_negative(school_lift, "school_lift");
    non_negative(rain_coef, "rain_coef");
    non_negative(typhoon_drop, "typhoon_drop");
    non_negative(long_events_per_week, "long_events_per_week");
    non_negative(engagement_sigma, "engagement_sigma");
    non_negative(noise_sigma, "noise_sigma");
    if (!std::isfinite(trend_per_day) || !std::isfinite(engagement_mu)) throw ConfigInvalid("trend and mu must be finite");
    if (engagement_mu > 12.0) throw ConfigInvalid("engagement_mu must be <= 12");
    for (const auto& [type, rate] : events_per_week) non_negative(rate, "event rate");
    for (const auto& [type, b] : beta) non_negative(b, "beta");
    for (const auto& [type, b] : beta_wom) non_negative(b, "beta_wom");
    if (conversion_lag < 0) throw ConfigInvalid("conversion_lag must be >= 0");
}

std::vector<HolidaySpan> default_public_holidays() {
    return {
        span("New Year", 2022, 1, 1, 2022, 1, 3),
        span("Spring Festival", 2022, 1, 31, 2022, 2, 6),
        span("Qingming", 2022, 4, 3, 2022, 4, 5),
        span("Labour Day", 2022, 4, 30, 2022, 5, 4),
        span("Dragon Boat", 2022, 6, 3, 2022, 6, 5),
        span("Mid-Autumn", 2022, 9, 10, 2022, 9, 12),
        span("National Day", 2022, 10, 1, 2022, 10, 7),
        span("New Year", 2022, 12, 31, 2023, 1, 2),
        span("Spring Festival", 2023, 1, 21, 2023, 1, 27),
        span("Qingming", 2023, 4, 5, 2023, 4, 5),
        span("Labour Day", 2023, 4, 29, 2023, 5, 3),
        span("Dragon Boat", 2023, 6, 22, 2023, 6, 24),
        span("Mid-Autumn and National Day", 2023, 9, 29, 2023, 10, 6),
        span("New Year", 2023, 12, 30, 2024, 1, 1),
        span("Spring Festival", 2024, 2, 10, 2024, 2, 17),
        span("Qingming", 2024, 4, 4, 2024, 4, 6),
        span("Labour Day", 2024, 5, 1, 2024, 5, 5),
        span("Dragon Boat", 2024, 6, 8, 2024, 6, 10),
        span("Mid-Autumn", 2024, 9, 15, 2024, 9, 17),
        span("National Day", 2024, 10, 1, 2024, 10, 7),
        span("New Year", 2025, 1, 1, 2025, 1, 1),
        span("Spring Festival", 2025, 1, 28, 2025, 2, 4),
        span("Qingming", 2025, 4, 4, 2025, 4, 6),
        span("Labour Day", 2025, 5, 1, 2025, 5, 5),
        span("Dragon Boat", 2025, 5, 31, 2025, 6, 2),
        span("National Day", 2025, 10, 1, 2025, 10, 8),
    };
}

std::vector<HolidaySpan> default_school_vacations() {
    return {
        span("Winter vacation", 2022, 1, 15, 2022, 2, 13),
        span("Summer vacation", 2022, 7, 9, 2022, 8, 31),
        span("Winter vacation", 2023, 1, 9, 2023, 2, 5),
        span("Summer vacation", 2023, 7, 9, 2023, 8, 31),
        span("Winter vacation", 2024, 1, 22, 2024, 2, 19),
        span("Summer vacation", 2024, 7, 6, 2024, 8, 31),
        span("Winter vacation", 2025, 1, 13, 2025, 2, 16),
        span("Summer vacation", 2025, 7, 5, 2025, 8, 31),
    };
}

SynthCorpus generate(const SynthConfig& cfg) {
    cfg.validate();
    SynthCorpus out;
    Random rng(cfg.seed);
    const Date first_day = cfg.start_date;
    const Date last_day = cfg.start_date + days{cfg.n_days - 1};

    // calendar
    CalendarContext& cal = out.calendar;
    cal.holidays = cfg.holidays.empty() ? default_public_holidays() : cfg.holidays;
    cal.school_vacations = cfg.school_vacations.empty() ? default_school_vacations() : cfg.school_vacations;
    int y0 = std::numeric_limits<int>::max();
    int y1 = std::numeric_limits<int>::min();
    for (const auto* list : {&cal.holidays, &cal.school_vacations}) {
        for (const auto& h : *list) {
            y0 = std::min(y0, static_cast<int>(std::chrono::year_month_day(h.start).year()));
            y1 = std::max(y1, static_cast<int>(std::chrono::year_month_day(h.end).year()));
        }
    }
    if (cal.holidays.empty()) throw ConfigInvalid("at least one public holiday is required");
    cal.coverage_start = make_date(y0, 1, 1);
    cal.coverage_end = make_date(y1, 12, 31);
    try {
        cal.validate();
    } catch (const Error& e) {
        throw ConfigInvalid(e.what());
    }
    if (first_day - days{kWmaWindow + 1} < cal.coverage_start || last_day > cal.coverage_end) {
        throw ConfigInvalid(fmt::format("calendar covers {}..{} but the corpus spans {}..{}",
                                        format_date(cal.coverage_start), format_date(cal.coverage_end),
                                        format_date(first_day), format_date(last_day)));
    }

    // weather
    for (int i = 0; i < cfg.n_days; ++i) {
        const Date d = first_day + days{i};
        const std::chrono::year_month_day ymd(d);
        const auto month = static_cast<unsigned>(ymd.month());
        const bool wet = month >= 5 && month <= 9;
        WeatherRecord w;
        w.date = d;
        const bool typhoon_season = month >= 7 && month <= 9;
        const bool continuing = !out.weather.empty() && out.weather.back().typhoon && rng.uniform() < 0.5;
        w.typhoon = continuing || (typhoon_season && rng.uniform() < 0.02);
        const double p_rain = wet ? 0.4 : 0.15;
        double rain = 0.0;
        if (w.typhoon) {
            rain = 80.0 + 120.0 * rng.uniform();
        } else if (rng.uniform() < p_rain) {
            rain = -std::log(1.0 - rng.uniform()) * (wet ? 15.0 : 5.0);
        }
        w.rainfall_mm = std::round(rain * 10.0) / 10.0;
        const double doy = static_cast<double>((d - make_date(static_cast<int>(ymd.year()), 1, 1)).count());
        const double season = std::sin(2.0 * std::numbers::pi * (doy - 110.0) / 365.0);
        w.tmax_c = std::round((25.0 + 6.0 * season + 1.5 * rng.normal()) * 10.0) / 10.0;
        out.weather.push_back(w);
    }

    // events: draw types, first days and sessions
    struct Draft {
        EventType type;
        std::vector<Date> dates;
        std::string title;
        std::string venue;
    };
    std::vector<Draft> drafts;
    const double weeks = static_cast<double>(cfg.n_days) / 7.0;
    for (EventType type : kAllEventTypes) {
        const int count = rng.poisson(lookup(cfg.events_per_week, type) * weeks);
        const TypeProfile& p = profile(type);
        for (int k = 0; k < count; ++k) {
            Draft d;
            d.type = type;
            Date day = first_day + days{rng.integer(-20, cfg.n_days - 1)};
            const int n = rng.pick(p.session_counts);
            for (int s = 0; s < n; ++s) {
                if (s > 0) day += days{rng.pick(p.gaps)};
                d.dates.push_back(day);
            }
            d.title = rng.pick(p.titles);
            d.venue = rng.pick(p.venues);
            drafts.push_back(std::move(d));
        }
    }
    const int long_count = rng.poisson(cfg.long_events_per_week * weeks);
    for (int k = 0; k < long_count; ++k) {
        const TypeProfile& p = profile(EventType::exhibition);
        Draft d;
        d.type = EventType::exhibition;
        Date day = first_day + days{rng.integer(-20, cfg.n_days - 1)};
        const auto n = rng.integer(35, 45);
        for (std::int64_t s = 0; s < n; ++s) d.dates.push_back(day + days{s});
        d.title = rng.pick(p.titles);
        d.venue = "Heritage Museum Annex";
        drafts.push_back(std::move(d));
    }
    std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
        if (a.dates.front() != b.dates.front()) return a.dates.front() < b.dates.front();
        return a.type < b.type;
    });

    std::vector<DraftPost> draft_posts;
    for (std::size_t e = 0; e < drafts.size(); ++e) {
        const Draft& d = drafts[e];
        const TypeProfile& p = profile(d.type);
        Event ev;
        ev.event_id = fmt::format("E{:04}", e + 1);
        const std::string suffix = d.type == EventType::concert      ? " Live Concert"
                                   : d.type == EventType::exhibition ? " Exhibition"
                                                                     : "";
        ev.title = fmt::format("{}{} {}", d.title, suffix, static_cast<int>(std::chrono::year_month_day(d.dates.front()).year()));
        ev.event_type = d.type;
        ev.venue = d.venue;
        ev.summary = fmt::format("{} {}", ev.title, p.blurb);
        for (std::size_t s = 0; s < d.dates.size(); ++s) {
            ev.sessions.push_back(EventSession{ev.event_id, static_cast<int>(s) + 1, at(d.dates[s], p.start_minute),
                                               at(d.dates[s], p.end_minute)});
        }

        RawEvent raw;
        raw.event_id = ev.event_id;
        raw.title = ev.title;
        raw.raw_time_text = time_text(d.dates, p);
        raw.venue_text = ev.venue;
        raw.raw_description = fmt::format("{} {} Tickets from HKD 380, booking through the official box office. "
                                          "Please arrive 30 minutes early.",
                                          ev.title, p.blurb);
        raw.source = d.type == EventType::sports ? EventSource::sports_list : EventSource::dedicated_site;

        // posts: promotional, too old to count, experience windows, after the event, unrelated candidates
        auto make_post = [&](DateTime created, bool related) {
            DraftPost dp;
            dp.event_id = ev.event_id;
            dp.related = related;
            Post& post = dp.post;
            post.author_id = fmt::format("U{:05}", rng.integer(1, 20000));
            if (related) {
                post.title = fmt::format("{} at {}", ev.title, ev.venue);
                post.content = fmt::format("Cannot wait for {} at {}!", ev.title, ev.venue);
                post.hashtags = {std::string(to_string(ev.event_type)), d.title};
                post.geotags = {ev.venue};
            } else {
                post.title = rng.pick(chatter());
                post.content = post.title + ". Weekend trip notes.";
                post.hashtags = {"travel"};
                post.geotags = {"Central"};
            }
            post.created_at = created;
            post.likes = std::llround(std::exp(cfg.engagement_mu + cfg.engagement_sigma * rng.normal()));
            post.collects = std::llround(static_cast<double>(post.likes) * (0.1 + 0.3 * rng.uniform()));
            draft_posts.push_back(std::move(dp));
        };
        const Date first_session_day = d.dates.front();
        const bool long_running = d.dates.size() > 30;
        for (auto k = rng.integer(5, 30); k > 0; --k) make_post(daytime(rng, first_session_day - days{rng.integer(1, 55)}), true);
        for (auto k = rng.integer(0, 3); k > 0; --k) make_post(daytime(rng, first_session_day - days{rng.integer(70, 100)}), true);
        if (!long_running) {
            for (std::size_t s = 0; s + 1 < ev.sessions.size(); ++s) {
                const DateTime from = ev.sessions[s].end;
                const DateTime until = DateTime(day_of(ev.sessions[s + 1].start));
                if (!(from < until)) continue;
                for (auto k = rng.integer(2, 7); k > 0; --k) make_post(between(rng, from, until), true);
            }
        }
        const Date last_session_day = d.dates.back();
        for (auto k = rng.integer(0, 8); k > 0; --k) make_post(daytime(rng, last_session_day + days{rng.integer(1, 20)}), true);
        for (auto k = rng.integer(0, 4); k > 0; --k) {
            make_post(daytime(rng, first_session_day + days{rng.integer(-30, 5)}), false);
        }

        out.raw_events.push_back(std::move(raw));
        out.events.push_back(std::move(ev));
    }

    std::stable_sort(draft_posts.begin(), draft_posts.end(),
                     [](const DraftPost& a, const DraftPost& b) { return a.post.created_at < b.post.created_at; });
    for (std::size_t i = 0; i < draft_posts.size(); ++i) {
        draft_posts[i].post.post_id = fmt::format("P{:06}", i + 1);
        out.posts.push_back(draft_posts[i].post);
        out.relevance.push_back(io::RelevanceLabel{draft_posts[i].event_id, draft_posts[i].post.post_id, draft_posts[i].related});
    }
    std::stable_sort(out.relevance.begin(), out.relevance.end(), [](const io::RelevanceLabel& a, const io::RelevanceLabel& b) {
        return std::tie(a.event_id, a.post_id) < std::tie(b.event_id, b.post_id);
    });

    // planted popularity, straight from post placement
    std::map<std::string, std::size_t> event_index;
    for (std::size_t e = 0; e < out.events.size(); ++e) event_index.emplace(out.events[e].event_id, e);
    std::vector<PlantedPopularity> planted(out.events.size());
    for (std::size_t e = 0; e < out.events.size(); ++e) {
        planted[e].event_id = out.events[e].event_id;
        planted[e].wom_raw.assign(out.events[e].sessions.size() - 1, 0.0);
    }
    for (const auto& dp : draft_posts) {
        if (!dp.related) continue;
        const std::size_t e = event_index.at(dp.event_id);
        const Event& ev = out.events[e];
        const double engagement = static_cast<double>(dp.post.likes + dp.post.collects);
        const DateTime t = dp.post.created_at;
        const DateTime first_start = ev.sessions.front().start;
        const DateTime window_start = add_months(first_start, -2);
        if (t < window_start) continue;  // too old for every metric
        if (t < first_start) {
            planted[e].promotional += engagement;
            planted[e].overall += engagement;
            continue;
        }
        if (t < add_months(ev.sessions.back().end, 2)) planted[e].overall += engagement;
        for (std::size_t s = 0; s + 1 < ev.sessions.size(); ++s) {
            if (ev.sessions[s].end <= t && t < ev.sessions[s + 1].start) planted[e].wom_raw[s] += engagement;
        }
    }
    for (auto& pp : planted) pp.womp = wom_popularity(pp.wom_raw, static_cast<int>(pp.wom_raw.size() + 1));

    // per-day effects of the events that move arrivals
    std::map<Date, std::map<EventType, double>> promo_effect;
    std::map<Date, std::map<EventType, double>> wom_effect;
    for (std::size_t e = 0; e < out.events.size(); ++e) {
        const Event& ev = out.events[e];
        if (!has_effect(ev.event_type, ev.sessions.size(), cfg)) continue;
        for (std::size_t s = 0; s < ev.sessions.size(); ++s) {
            const Date day = day_of(ev.sessions[s].start) + days{cfg.conversion_lag};
            promo_effect[day][ev.event_type] += lookup(cfg.beta, ev.event_type) * planted[e].promotional;
            wom_effect[day][ev.event_type] += lookup(cfg.beta_wom, ev.event_type) * planted[e].womp[s];
        }
        out.truth.events.push_back(planted[e]);
    }

    // arrivals, including the history days before the first feature row
    out.truth.beta = cfg.beta;
    out.truth.beta_wom = cfg.beta_wom;
    for (int i = 0; i < cfg.n_days; ++i) {
        const Date d = first_day + days{i};
        DayTruth day;
        day.date = d;
        const double raw_base = cfg.weekly_base[static_cast<std::size_t>(weekday_index(d))] * (1.0 + cfg.trend_per_day * i);
        day.base = std::llround(raw_base);
        const HolidayFeatures h = holiday_features(d, cal);
        day.holiday = std::llround(raw_base * (cfg.holiday_lift * h.holidays_remaining + cfg.day_before_lift * h.day_before_holiday));
        day.school = std::llround(raw_base * cfg.school_lift * h.school_holiday);
        const WeatherRecord& w = out.weather[static_cast<std::size_t>(i)];
        day.weather = -std::llround(cfg.rain_coef * w.rainfall_mm + (w.typhoon ? cfg.typhoon_drop : 0.0));
        std::int64_t events_total = 0;
        for (EventType type : kAllEventTypes) {
            const auto promo = promo_effect.contains(d) && promo_effect[d].contains(type) ? promo_effect[d][type] : 0.0;
            const auto wom = wom_effect.contains(d) && wom_effect[d].contains(type) ? wom_effect[d][type] : 0.0;
            if (!has_effect(type, 0, cfg)) continue;
            const std::int64_t wom_term = std::llround(wom);
            day.wom[type] = wom_term;
            day.events[type] = std::llround(promo) + wom_term;
            events_total += day.events[type];
        }
        day.noise = std::llround(cfg.noise_sigma * rng.normal());
        day.flow = day.base + day.holiday + day.school + day.weather + events_total + day.noise;
        out.flows.push_back(FlowRecord{d, static_cast<double>(day.flow), {}});
        out.truth.days.push_back(std::move(day));
    }
    return out;
}

json ground_truth_json(const GroundTruth& truth) {
    auto type_map = [](const auto& m) {
        json out = json::object();
        for (const auto& [type, v] : m) out[std::string(to_string(type))] = v;
        return out;
    };
    json days = json::array();
    for (const auto& d : truth.days) {
        days.push_back({{"date", format_date(d.date)},
                        {"flow", d.flow},
                        {"base", d.base},
                        {"holiday", d.holiday},
                        {"school", d.school},
                        {"weather", d.weather},
                        {"events", type_map(d.events)},
                        {"wom", type_map(d.wom)},
                        {"noise", d.noise}});
    }
    json events = json::array();
    for (const auto& e : truth.events) {
        events.push_back({{"event_id", e.event_id},
                          {"overall", e.overall},
                          {"promotional", e.promotional},
                          {"wom_raw", e.wom_raw},
                          {"womp", e.womp}});
    }
    return json{{"beta", type_map(truth.beta)}, {"beta_wom", type_map(truth.beta_wom)}, {"days", days}, {"events", events}};
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    io::write_file_atomic(dir / "flows.csv", io::flows_csv(corpus.flows));
    io::write_file_atomic(dir / "weather.csv", io::weather_csv(corpus.weather));
    io::write_file_atomic(dir / "holidays.csv", io::holidays_csv(corpus.calendar));
    io::write_file_atomic(dir / "events.json", io::dump_json(io::events_to_json(corpus.events)));
    io::write_file_atomic(dir / "events_raw.jsonl", io::raw_events_jsonl(corpus.raw_events));
    io::write_file_atomic(dir / "posts.jsonl", io::posts_jsonl(corpus.posts));
    io::write_file_atomic(dir / "relevance.csv", io::relevance_csv(corpus.relevance));
    io::write_file_atomic(dir / "ground_truth.json", io::dump_json(ground_truth_json(corpus.truth)));
}

}  // namespace eventflow

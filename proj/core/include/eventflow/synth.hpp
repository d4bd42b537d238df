#pragma once

#include "eventflow/domain.hpp"
#include "eventflow/features.hpp"
#include "eventflow/io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace eventflow {

struct SynthConfig {
    int n_days = 440;
    Date start_date = make_date(2023, 3, 1);
    std::uint64_t seed = 7;

    /// Mean arrivals Monday..Sunday before any other term.
    std::array<double, 7> weekly_base{70000, 66000, 67000, 70000, 80000, 88000, 76000};
    /// Linear growth of the weekly base per day.
    double trend_per_day = 0.0006;

    /// Public holidays and school vacations; empty lists use built-in
    /// 2022-2025 mainland calendars.
    std::vector<HolidaySpan> holidays;
    std::vector<HolidaySpan> school_vacations;
    /// Fractional lift per remaining holiday day, on the day's base.
    double holiday_lift = 0.06;
    double day_before_lift = 0.12;
    double school_lift = 0.05;

    double rain_coef = 40.0;       ///< arrivals lost per mm of rain
    double typhoon_drop = 15000.0;

    /// Expected new events per week, by type.
    std::map<EventType, double> events_per_week{
        {EventType::concert, 1.2},   {EventType::exhibition, 0.4}, {EventType::sports, 0.5},
        {EventType::fireworks, 0.1}, {EventType::fair, 0.3},       {EventType::performance, 0.3},
        {EventType::religious, 0.1}};
    /// Rate of long-running exhibitions with more than 30 sessions.
    double long_events_per_week = 0.05;

    /// Post engagement: likes ~ round(exp(N(mu, sigma))).
    double engagement_mu = 6.0;
    double engagement_sigma = 1.0;

    /// Arrivals per unit of promotional popularity on each session day.
    std::map<EventType, double> beta{{EventType::concert, 0.6},
                                     {EventType::exhibition, 0.15},
                                     {EventType::sports, 0.3},
                                     {EventType::fireworks, 0.4}};
    /// Arrivals per unit of WOM popularity of the session held that day.
    std::map<EventType, double> beta_wom{
        {EventType::concert, 1.0}, {EventType::exhibition, 1.0}, {EventType::sports, 1.0}};

    double noise_sigma = 2500.0;
    /// Days between a session and the arrivals it induces.
    int conversion_lag = 0;

    /// Throws ConfigInvalid.
    void validate() const;
};

/// Built-in mainland public-holiday spans, 2022-2025.
std::vector<HolidaySpan> default_public_holidays();
/// Built-in mainland school vacations, 2022-2025.
std::vector<HolidaySpan> default_school_vacations();

/// Integer decomposition of one day's arrivals:
/// flow = base + holiday + school + weather + sum(events) + noise.
struct DayTruth {
    Date date;
    std::int64_t flow = 0;
    std::int64_t base = 0;
    std::int64_t holiday = 0;
    std::int64_t school = 0;
    std::int64_t weather = 0;
    std::map<EventType, std::int64_t> events;  ///< promotional plus WOM term per type
    std::map<EventType, std::int64_t> wom;     ///< WOM part of `events`
    std::int64_t noise = 0;
};

struct PlantedPopularity {
    std::string event_id;
    double overall = 0.0;
    double promotional = 0.0;
    std::vector<double> wom_raw;
    std::vector<double> womp;
};

struct GroundTruth {
    std::map<EventType, double> beta;
    std::map<EventType, double> beta_wom;
    std::vector<DayTruth> days;
    std::vector<PlantedPopularity> events;  ///< events with planted effects
};

struct SynthCorpus {
    std::vector<FlowRecord> flows;
    std::vector<WeatherRecord> weather;
    CalendarContext calendar;
    std::vector<RawEvent> raw_events;
    std::vector<Event> events;  ///< every generated event, distractors included
    std::vector<Post> posts;
    std::vector<io::RelevanceLabel> relevance;
    GroundTruth truth;
};

SynthCorpus generate(const SynthConfig& cfg);

nlohmann::json ground_truth_json(const GroundTruth& truth);

/// Writes flows.csv, weather.csv, holidays.csv, events.json,
/// events_raw.jsonl, posts.jsonl, relevance.csv and ground_truth.json.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace eventflow

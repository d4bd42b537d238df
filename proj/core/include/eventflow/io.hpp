#pragma once

#include "eventflow/attribution.hpp"
#include "eventflow/domain.hpp"
#include "eventflow/features.hpp"
#include "eventflow/popularity.hpp"
#include "eventflow/rolling.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace eventflow::io {

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold commas, quotes ("") and newlines.
std::vector<CsvRow> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);
std::string csv_line(const CsvRow& row);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
nlohmann::json read_json(const std::filesystem::path& path);
/// Two-space indented JSON followed by a newline.
std::string dump_json(const nlohmann::json& doc);

std::vector<RawEvent> parse_raw_events_jsonl(const std::string& text);
std::string raw_events_jsonl(const std::vector<RawEvent>& events);

nlohmann::json events_to_json(const std::vector<Event>& events);
std::vector<Event> events_from_json(const nlohmann::json& doc);

std::vector<Post> parse_posts_jsonl(const std::string& text);
std::string posts_jsonl(const std::vector<Post>& posts);

struct RelevanceLabel {
    std::string event_id;
    std::string post_id;
    bool related = false;
};
std::vector<RelevanceLabel> parse_relevance_csv(const std::string& text);
std::string relevance_csv(const std::vector<RelevanceLabel>& labels);

/// One row per session: event_id, sub_id, overall, promotional, womp.
std::string popularity_csv(const std::vector<Event>& events, const std::vector<PopularityMetrics>& metrics);

std::vector<FlowRecord> parse_flows_csv(const std::string& text);
std::string flows_csv(const std::vector<FlowRecord>& flows);

std::vector<WeatherRecord> parse_weather_csv(const std::string& text);
std::string weather_csv(const std::vector<WeatherRecord>& weather);

/// Columns start, end, name, kind (public | school). Coverage spans from
/// January 1 of the earliest year to December 31 of the latest year listed.
CalendarContext parse_holidays_csv(const std::string& text);
std::string holidays_csv(const CalendarContext& calendar);

/// Header: date, every feature column, arrivals.
std::string features_csv(const FeatureMatrix& fm);
/// Inverse of features_csv; the feature set is recognised from the header.
FeatureMatrix parse_features_csv(const std::string& text);

std::string grid_results_csv(const GridResult& result);
std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string shap_values_csv(const ShapResult& shap, const std::vector<Date>& dates);
std::string summary_points_csv(const ImportanceReport& report, const std::vector<Date>& dates);

}  // namespace eventflow::io

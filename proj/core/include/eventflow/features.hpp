#pragma once

#include "eventflow/domain.hpp"
#include "eventflow/popularity.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eventflow {

/// Row-major design matrix used by every model.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct HolidaySpan {
    std::string name;
    Date start;
    Date end;  ///< inclusive
};

struct CalendarContext {
    std::vector<HolidaySpan> holidays;        ///< public holidays of the visitors' origin
    std::vector<HolidaySpan> school_vacations;
    Date coverage_start;                       ///< dates outside [start, end] are rejected
    Date coverage_end;

    /// Sorts spans and checks start <= end and no overlap within each list.
    void validate();
};

struct HolidayFeatures {
    int holidays_remaining = 0;
    int day_before_holiday = 0;
    int week_near_holiday = 0;
    int days_to_nearest_holiday = 0;
    int school_holiday = 0;

    friend bool operator==(const HolidayFeatures&, const HolidayFeatures&) = default;
};

HolidayFeatures holiday_features(Date date, const CalendarContext& cal);

/// Mon, Wed, Thu, Fri, Sat, Sun indicators; Tuesday is the reference level.
std::array<int, 6> dow_dummies(Date date);

inline constexpr int kWmaWindow = 10;

/// Linearly weighted moving average of the last window values, oldest
/// first: weight P - p for the value p days before the newest.
double wma(std::span<const double> window);

/// C_t = (M_{t-1} - M_{t-2}) / M_{t-2} where M is the WMA over `period`
/// days. Needs t >= period + 1 (0-based).
double changing_rate(std::span<const double> series, std::size_t t, int period = kWmaWindow);

struct WeatherRecord {
    Date date;
    double rainfall_mm = 0.0;
    double tmax_c = 0.0;
    bool typhoon = false;
};

struct FlowRecord {
    Date date;
    double arrivals = 0.0;
    std::string segment;  ///< empty when the file has no segment column
};

enum class FeatureSet { FS1 = 1, FS2, FS3, FS4, FS5 };

std::string_view to_string(FeatureSet fs);
std::optional<FeatureSet> parse_feature_set(std::string_view text);

/// Column names for a feature set, in matrix order.
std::vector<std::string> feature_columns(FeatureSet fs, bool split_exhibition_wom = false);

inline constexpr std::array<EventType, 4> kFeatureEventTypes{EventType::concert, EventType::fireworks,
                                                             EventType::exhibition, EventType::sports};
inline constexpr std::array<EventType, 3> kWomEventTypes{EventType::concert, EventType::exhibition,
                                                         EventType::sports};

struct FeatureMatrix {
    FeatureSet feature_set = FeatureSet::FS1;
    std::vector<Date> dates;
    std::vector<std::string> columns;
    Matrix values;                ///< dates.size() x columns.size()
    std::vector<double> target;   ///< y_t
    /// Index of the flow-derived trend column; forecasters freeze it at the
    /// origin so multi-step forecasts see no flows past the origin.
    std::optional<std::size_t> trend_column;

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return columns.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
};

struct FeatureInputs {
    std::vector<FlowRecord> flows;       ///< daily, one series (segments already resolved)
    std::vector<WeatherRecord> weather;
    CalendarContext calendar;
    std::vector<Event> events;
    std::vector<PopularityMetrics> metrics;  ///< aligned with events
};

/// Daily series for one segment, or the per-date sum over segments when
/// `segment` is empty.
std::vector<FlowRecord> select_segment(const std::vector<FlowRecord>& flows, const std::string& segment);

struct AssembleOptions {
    bool split_exhibition_wom = false;  ///< FS5 only: early/late exhibition WOM instead of one column
};

/// Builds the design matrix for every date in [first, last]. Flow history
/// must cover kWmaWindow + 1 days before `first`. Throws CoverageGap
/// naming each source's missing dates.
FeatureMatrix assemble(Date first, Date last, const FeatureInputs& inputs, FeatureSet fs,
                       const AssembleOptions& options = {});

/// Whole available range: from the first date with enough flow history to
/// the last flow date.
FeatureMatrix assemble_all(const FeatureInputs& inputs, FeatureSet fs, const AssembleOptions& options = {});

}  // namespace eventflow

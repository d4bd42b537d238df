#include "eventflow/error.hpp"
#include "eventflow/features.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace eventflow {
namespace {

using std::chrono::days;

CalendarContext national_day_calendar() {
    CalendarContext cal;
    cal.holidays = {{"spring", make_date(2024, 2, 10), make_date(2024, 2, 17)},
                    {"national", make_date(2023, 10, 2), make_date(2023, 10, 6)}};
    cal.school_vacations = {{"summer", make_date(2023, 7, 1), make_date(2023, 8, 31)}};
    cal.coverage_start = make_date(2023, 1, 1);
    cal.coverage_end = make_date(2024, 12, 31);
    cal.validate();
    return cal;
}

TEST(HolidayFeatures, FrozenCalendarExamples) {
    const auto cal = national_day_calendar();
    // Tuesday inside the span.
    EXPECT_EQ(holiday_features(make_date(2023, 10, 3), cal), (HolidayFeatures{4, 0, 0, 0, 0}));
    // Sunday before a Monday start: weekend days never count as "day before".
    EXPECT_EQ(holiday_features(make_date(2023, 10, 1), cal), (HolidayFeatures{0, 0, 0, 1, 0}));
    // Friday, weekend in between.
    EXPECT_EQ(holiday_features(make_date(2023, 9, 29), cal), (HolidayFeatures{0, 0, 1, 1, 0}));
    EXPECT_EQ(holiday_features(make_date(2023, 9, 22), cal), (HolidayFeatures{0, 0, 0, 6, 0}));
    // Tuesday after the span.
    EXPECT_EQ(holiday_features(make_date(2023, 10, 10), cal), (HolidayFeatures{0, 0, 1, 2, 0}));
    // Friday right before a Saturday start.
    EXPECT_EQ(holiday_features(make_date(2024, 2, 9), cal), (HolidayFeatures{0, 1, 1, 1, 0}));
    EXPECT_EQ(holiday_features(make_date(2024, 2, 17), cal).holidays_remaining, 1);
    EXPECT_EQ(holiday_features(make_date(2023, 8, 1), cal).school_holiday, 1);
}

TEST(HolidayFeatures, OutOfCoverageThrows) {
    const auto cal = national_day_calendar();
    EXPECT_THROW(holiday_features(make_date(2022, 12, 31), cal), CalendarOutOfRange);
    EXPECT_THROW(holiday_features(make_date(2025, 1, 1), cal), CalendarOutOfRange);
}

TEST(HolidayFeatures, NoHolidaysGivesZeroDistance) {
    CalendarContext cal;
    cal.coverage_start = make_date(2023, 1, 1);
    cal.coverage_end = make_date(2023, 12, 31);
    EXPECT_EQ(holiday_features(make_date(2023, 6, 1), cal), HolidayFeatures{});
}

TEST(HolidayFeatures, OverlappingSpansRejected) {
    CalendarContext cal;
    cal.holidays = {{"a", make_date(2023, 1, 1), make_date(2023, 1, 5)}, {"b", make_date(2023, 1, 5), make_date(2023, 1, 6)}};
    cal.coverage_start = make_date(2023, 1, 1);
    cal.coverage_end = make_date(2023, 12, 31);
    EXPECT_THROW(cal.validate(), ConfigError);
}

TEST(HolidayFeatures, RemainingCountsDownInsideEverySpan) {
    const auto cal = national_day_calendar();
    for (const auto& span : cal.holidays) {
        int expected = static_cast<int>((span.end - span.start).count()) + 1;
        for (Date d = span.start; d <= span.end; d += days{1}) {
            const auto f = holiday_features(d, cal);
            EXPECT_EQ(f.holidays_remaining, expected--);
            EXPECT_EQ(f.week_near_holiday, 0);
            EXPECT_EQ(f.days_to_nearest_holiday, 0);
        }
    }
}

TEST(DowDummies, TuesdayIsReference) {
    EXPECT_EQ(dow_dummies(make_date(2023, 10, 10)), (std::array<int, 6>{0, 0, 0, 0, 0, 0}));
    EXPECT_EQ(dow_dummies(make_date(2023, 10, 9)), (std::array<int, 6>{1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(dow_dummies(make_date(2023, 10, 1)), (std::array<int, 6>{0, 0, 0, 0, 0, 1}));
    for (int k = 0; k < 7; ++k) {
        const auto d = dow_dummies(make_date(2023, 10, 9) + days{k});
        int sum = 0;
        for (int v : d) sum += v;
        EXPECT_EQ(sum, k == 1 ? 0 : 1);
    }
}

TEST(Wma, FrozenValue) {
    // (1*1 + 2*2 + 3*3) / 6
    const std::vector<double> w{1.0, 2.0, 3.0};
    EXPECT_DOUBLE_EQ(wma(w), 14.0 / 6.0);
}

TEST(Wma, MatchesDirectFormula) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1000.0, 90000.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(40);
        for (auto& v : s) v = u(rng);
        for (std::size_t t = kWmaWindow + 1; t <= s.size(); ++t) {
            const double expected = testing::changing_rate_direct(s, t, kWmaWindow);
            EXPECT_NEAR(changing_rate(s, t), expected, 1e-12);
            EXPECT_NEAR(wma(std::span<const double>(s).subspan(t - kWmaWindow, kWmaWindow)),
                        testing::wma_direct(s, t - 1, kWmaWindow), 1e-12 * s[t - 1]);
        }
    }
}

TEST(ChangingRate, ConstantSeriesIsExactlyZero) {
    for (double level : {1.0, 3.3, 12345.678, 1e9}) {
        const std::vector<double> s(30, level);
        for (std::size_t t = kWmaWindow + 1; t < s.size(); ++t) EXPECT_EQ(changing_rate(s, t), 0.0);
    }
}

TEST(ChangingRate, NeedsHistoryAndNonZeroBaseline) {
    const std::vector<double> s(20, 1.0);
    EXPECT_THROW(changing_rate(s, kWmaWindow), InsufficientHistory);
    const std::vector<double> zeros(20, 0.0);
    EXPECT_THROW(changing_rate(zeros, 15), DegenerateBaseline);
}

TEST(FeatureColumns, NestedFamiliesAndCounts) {
    EXPECT_EQ(feature_columns(FeatureSet::FS1).size(), 15u);
    EXPECT_EQ(feature_columns(FeatureSet::FS2).size(), 19u);
    EXPECT_EQ(feature_columns(FeatureSet::FS3).size(), 19u);
    EXPECT_EQ(feature_columns(FeatureSet::FS4).size(), 19u);
    EXPECT_EQ(feature_columns(FeatureSet::FS5).size(), 22u);
    EXPECT_EQ(feature_columns(FeatureSet::FS5, true).size(), 23u);
    const auto base = feature_columns(FeatureSet::FS1);
    for (auto fs : {FeatureSet::FS2, FeatureSet::FS3, FeatureSet::FS4, FeatureSet::FS5}) {
        const auto cols = feature_columns(fs);
        EXPECT_TRUE(std::equal(base.begin(), base.end(), cols.begin()));
    }
    EXPECT_EQ(parse_feature_set("FS3"), FeatureSet::FS3);
    EXPECT_EQ(parse_feature_set("4"), FeatureSet::FS4);
    EXPECT_FALSE(parse_feature_set("FS6").has_value());
}

FeatureInputs small_inputs() {
    FeatureInputs in;
    const Date start = make_date(2024, 1, 1);
    for (int i = 0; i < 40; ++i) {
        const Date d = start + days{i};
        in.flows.push_back({d, 1000.0 + 10.0 * i + (i % 7) * 50.0, ""});
        in.weather.push_back({d, static_cast<double>(i % 5), 15.0 + 0.1 * i, i == 25});
    }
    in.calendar.holidays = {{"spring", make_date(2024, 2, 10), make_date(2024, 2, 17)}};
    in.calendar.coverage_start = make_date(2024, 1, 1);
    in.calendar.coverage_end = make_date(2024, 12, 31);

    Event concert;
    concert.event_id = "C";
    concert.event_type = EventType::concert;
    concert.sessions = {{"C", 1, make_datetime(2024, 1, 20, 20), make_datetime(2024, 1, 20, 22)},
                        {"C", 2, make_datetime(2024, 1, 21, 20), make_datetime(2024, 1, 21, 22)}};
    Event show;
    show.event_id = "X";
    show.event_type = EventType::exhibition;
    for (int k = 0; k < 6; ++k) {
        show.sessions.push_back({"X", k + 1, make_datetime(2024, 1, 15 + k, 10), make_datetime(2024, 1, 15 + k, 18)});
    }
    in.events = {concert, show};
    PopularityMetrics mc{"C", 500.0, 300.0, {0.0, 40.0}, {40.0}};
    PopularityMetrics mx{"X", 90.0, 20.0, {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {5, 5, 5, 5, 5}};
    in.metrics = {mc, mx};
    return in;
}

TEST(Assemble, RowsMatchInputs) {
    const auto in = small_inputs();
    const auto fm = assemble_all(in, FeatureSet::FS5);
    ASSERT_EQ(fm.rows(), 40u - (kWmaWindow + 1));
    EXPECT_EQ(fm.dates.front(), make_date(2024, 1, 12));
    EXPECT_EQ(fm.cols(), 22u);
    EXPECT_EQ(fm.trend_column, std::optional<std::size_t>(14));
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        const auto i = static_cast<std::size_t>((fm.dates[r] - make_date(2024, 1, 1)).count());
        EXPECT_EQ(fm.target[r], in.flows[i].arrivals);
        EXPECT_EQ(fm.values(static_cast<Eigen::Index>(r), 11), in.weather[i].rainfall_mm);
    }
    const auto row_of = [&](Date d) { return static_cast<Eigen::Index>((d - fm.dates.front()).count()); };
    const auto col = [&](std::string_view name) { return static_cast<Eigen::Index>(*fm.column_index(name)); };
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 20)), col("promo_concert")), 300.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 20)), col("wom_concert")), 0.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 21)), col("wom_concert")), 40.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 22)), col("promo_concert")), 0.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 18)), col("wom_exhibition")), 3.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 26)), col("typhoon")), 1.0);

    const auto fs2 = assemble_all(in, FeatureSet::FS2);
    EXPECT_EQ(fs2.values(row_of(make_date(2024, 1, 21)), static_cast<Eigen::Index>(*fs2.column_index("count_concert"))), 1.0);
    const auto fs3 = assemble_all(in, FeatureSet::FS3);
    EXPECT_EQ(fs3.values(row_of(make_date(2024, 1, 21)), static_cast<Eigen::Index>(*fs3.column_index("overall_concert"))), 500.0);
}

TEST(Assemble, SplitExhibitionWom) {
    const auto in = small_inputs();
    const auto fm = assemble_all(in, FeatureSet::FS5, AssembleOptions{true});
    const auto early = static_cast<Eigen::Index>(*fm.column_index("wom_exhibition_early"));
    const auto late = static_cast<Eigen::Index>(*fm.column_index("wom_exhibition_late"));
    const auto row_of = [&](Date d) { return static_cast<Eigen::Index>((d - fm.dates.front()).count()); };
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 18)), early), 3.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 19)), early), 0.0);
    EXPECT_EQ(fm.values(row_of(make_date(2024, 1, 19)), late), 4.0);
}

TEST(Assemble, TrendUsesOnlyEarlierFlows) {
    auto in = small_inputs();
    const auto before = assemble_all(in, FeatureSet::FS1);
    in.flows[30].arrivals += 5000.0;
    const auto after = assemble_all(in, FeatureSet::FS1);
    const auto r = static_cast<Eigen::Index>((in.flows[30].date - before.dates.front()).count());
    for (Eigen::Index k = 0; k <= r; ++k) EXPECT_EQ(before.values(k, 14), after.values(k, 14));
    EXPECT_NE(before.values(r + 1, 14), after.values(r + 1, 14));
}

TEST(Assemble, ReportsEveryGap) {
    auto in = small_inputs();
    in.weather.erase(in.weather.begin() + 20);
    in.flows.erase(in.flows.begin() + 3);
    try {
        assemble(make_date(2024, 1, 15), make_date(2024, 1, 30), in, FeatureSet::FS1);
        FAIL() << "expected CoverageGap";
    } catch (const CoverageGap& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("weather: 2024-01-21"), std::string::npos) << msg;
        EXPECT_NE(msg.find("flows: 2024-01-04"), std::string::npos) << msg;
    }
}

TEST(SelectSegment, SumsOrFilters) {
    std::vector<FlowRecord> flows{{make_date(2024, 1, 2), 5, "rail"},
                                  {make_date(2024, 1, 1), 3, "metro"},
                                  {make_date(2024, 1, 1), 4, "rail"}};
    const auto all = select_segment(flows, "");
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].arrivals, 7.0);
    const auto rail = select_segment(flows, "rail");
    ASSERT_EQ(rail.size(), 2u);
    EXPECT_EQ(rail[0].arrivals, 4.0);
    EXPECT_THROW(select_segment(flows, "air"), PreconditionError);
}

}  // namespace
}  // namespace eventflow

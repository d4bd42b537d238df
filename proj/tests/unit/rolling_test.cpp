#include "eventflow/error.hpp"
#include "eventflow/rolling.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>

namespace eventflow {
namespace {

/// Forecast for target row s issued at origin t: 1000 * t + s.
Forecaster tagging_forecaster() {
    return [](std::size_t origin, int steps) {
        std::vector<double> out;
        for (int j = 1; j <= steps; ++j) out.push_back(1000.0 * static_cast<double>(origin) + static_cast<double>(origin + j));
        return out;
    };
}

FeatureMatrix random_matrix(std::uint64_t seed, int rows, int cols) {
    std::mt19937_64 rng(seed);
    FeatureMatrix fm;
    fm.feature_set = FeatureSet::FS1;
    fm.values = testing::random_design(rng, rows, cols);
    fm.target = testing::random_target(rng, fm.values);
    for (int c = 0; c < cols; ++c) fm.columns.push_back("x" + std::to_string(c));
    for (int r = 0; r < rows; ++r) fm.dates.push_back(make_date(2024, 1, 1) + std::chrono::days{r});
    return fm;
}

TEST(Score, FrozenValues) {
    const std::vector<double> y{1, 2, 3, 4};
    const std::vector<double> p{1, 2, 3, 5};
    const auto s = score(y, p);
    EXPECT_DOUBLE_EQ(s.mae, 0.25);
    EXPECT_DOUBLE_EQ(s.r2, 1.0 - 1.0 / 5.0);
}

TEST(Score, ConstantTargetCarriesMae) {
    const std::vector<double> y{3, 3, 3};
    const std::vector<double> p{2, 3, 5};
    try {
        score(y, p);
        FAIL();
    } catch (const ZeroVariance& e) {
        EXPECT_DOUBLE_EQ(e.mae(), 1.0);
    }
}

TEST(Roll, HorizonOneIsRawForecast) {
    const std::vector<double> y(12, 1.0);
    const auto rep = roll(y, 4, 1, tagging_forecaster());
    ASSERT_EQ(rep.rows.size(), 7u);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const std::size_t s = rep.rows[i];
        EXPECT_EQ(rep.predicted[i], 1000.0 * static_cast<double>(s - 1) + static_cast<double>(s));
        EXPECT_EQ(rep.contributors[i], 1);
    }
    EXPECT_FALSE(rep.r2.has_value());
}

TEST(Roll, HandUnrolledHorizonTwo) {
    // Six rows, first origin 1: origins 1..4, targets 2..5.
    const std::vector<double> y{0, 0, 0, 0, 0, 0};
    const auto rep = roll(y, 1, 2, tagging_forecaster());
    ASSERT_EQ(rep.rows, (std::vector<std::size_t>{2, 3, 4, 5}));
    EXPECT_EQ(rep.predicted[0], 1002.0);                      // origin 1 only
    EXPECT_EQ(rep.predicted[1], (1003.0 + 2003.0) / 2.0);     // origins 1, 2
    EXPECT_EQ(rep.predicted[2], (2004.0 + 3004.0) / 2.0);     // origins 2, 3
    EXPECT_EQ(rep.predicted[3], (3005.0 + 4005.0) / 2.0);     // origins 3, 4 (origin 4 has one step)
    EXPECT_EQ(rep.contributors, (std::vector<int>{1, 2, 2, 2}));
    ASSERT_EQ(rep.raw.size(), 7u);
    EXPECT_EQ(rep.raw.back().origin, 4u);
    EXPECT_EQ(rep.raw.back().lead, 1);
}

TEST(Roll, ParallelMatchesSerial) {
    std::mt19937_64 rng(3);
    std::vector<double> y(60);
    for (auto& v : y) v = uniform01(rng);
    const auto a = roll(y, 10, 3, tagging_forecaster(), 1);
    const auto b = roll(y, 10, 3, tagging_forecaster(), 4);
    EXPECT_EQ(a.predicted, b.predicted);
    EXPECT_EQ(a.mae, b.mae);
}

TEST(Roll, ErrorsNameTheOrigin) {
    const std::vector<double> y(20, 1.0);
    const Forecaster failing = [](std::size_t origin, int steps) -> std::vector<double> {
        if (origin >= 7) throw SingularSystem("boom");
        return std::vector<double>(static_cast<std::size_t>(steps), 0.0);
    };
    try {
        roll(y, 3, 1, failing, 3);
        FAIL();
    } catch (const OriginError& e) {
        EXPECT_EQ(e.origin(), 7u);
    }
    EXPECT_THROW(roll(y, 19, 1, tagging_forecaster()), InsufficientHistory);
}

TEST(RollingConfig, HorizonBounds) {
    RollingConfig cfg;
    cfg.first_origin = 5;
    for (int h = 1; h <= kMaxHorizon; ++h) {
        cfg.horizon = h;
        EXPECT_NO_THROW(cfg.validate());
    }
    cfg.horizon = 8;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.horizon = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ModelForecaster, IgnoresDataAfterOrigin) {
    auto fm = random_matrix(4, 80, 5);
    fm.trend_column = 4;
    ModelSpec spec;
    spec.gbdt.n_estimators = 30;
    const std::size_t origin = 50;
    const int steps = 3;
    const auto before = model_forecaster(fm, spec)(origin, steps);
    auto perturbed = fm;
    for (std::size_t r = origin + 1; r < fm.rows(); ++r) perturbed.target[r] += 1e4;
    for (Eigen::Index r = static_cast<Eigen::Index>(origin) + 2; r < perturbed.values.rows(); ++r) perturbed.values(r, 4) = 99.0;
    for (Eigen::Index r = static_cast<Eigen::Index>(origin) + steps + 1; r < perturbed.values.rows(); ++r) {
        perturbed.values.row(r).setConstant(-7.0);
    }
    EXPECT_EQ(model_forecaster(perturbed, spec)(origin, steps), before);
}

TEST(ModelForecaster, TrendColumnFrozenAtOrigin) {
    auto fm = random_matrix(5, 60, 3);
    fm.trend_column = 2;
    ModelSpec spec;
    spec.kind = ModelKind::linear;
    const std::size_t origin = 40;
    const auto fitted = fit_model(spec, fm.values.topRows(41), std::span<const double>(fm.target.data(), 41));
    Matrix ahead = fm.values.middleRows(41, 2);
    ahead.col(2).setConstant(fm.values(41, 2));
    EXPECT_EQ(model_forecaster(fm, spec)(origin, 2), predict_rows(fitted, ahead));
}

TEST(RunRolling, MatchesManualLoop) {
    const auto fm = random_matrix(6, 50, 4);
    RollingConfig cfg;
    cfg.first_origin = 40;
    cfg.model.kind = ModelKind::linear;
    const auto rep = run_rolling(fm, cfg);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const std::size_t s = rep.rows[i];
        const auto model = fit_model(cfg.model, fm.values.topRows(static_cast<Eigen::Index>(s)),
                                     std::span<const double>(fm.target.data(), s));
        EXPECT_EQ(rep.predicted[i], predict_rows(model, fm.values.middleRows(static_cast<Eigen::Index>(s), 1))[0]);
    }
}

TEST(RunRolling, ArimaUsesTargetOnly) {
    auto fm = random_matrix(7, 120, 2);
    RollingConfig cfg;
    cfg.first_origin = 100;
    cfg.model.kind = ModelKind::arima;
    cfg.horizon = 3;
    const auto a = run_rolling(fm, cfg);
    fm.values.setZero();
    const auto b = run_rolling(fm, cfg);
    EXPECT_EQ(a.predicted, b.predicted);
}

TEST(GridSpec, DefaultAxesAndValidation) {
    GridSpec g;
    EXPECT_EQ(g.size(), 3u * 3u * 4u * 7u);
    g.learning_rates.clear();
    EXPECT_THROW(g.validate(), ConfigError);
}

TEST(SelectBest, TieBreaks) {
    auto row = [](double r2, double lr, int depth, int trees, double decay) {
        GridRow g;
        g.params.learning_rate = lr;
        g.params.max_depth = depth;
        g.params.n_estimators = trees;
        g.params.weight_decay = decay;
        g.r2 = r2;
        return g;
    };
    std::vector<GridRow> rows{row(0.5, 0.1, 3, 100, 0.0), row(0.7, 0.1, 5, 500, 0.0), row(0.7, 0.1, 7, 200, 0.0),
                              row(0.7, 0.05, 7, 200, 0.0), row(0.7, 0.05, 7, 200, 0.001)};
    EXPECT_EQ(select_best(rows), 3u);
    rows.push_back(row(0.9, 0.1, 3, 100, 0.0));
    rows.back().r2.reset();
    EXPECT_EQ(select_best(rows), 3u);
}

TEST(GridSearch, EveryRowMatchesIndependentRollingRun) {
    const auto fm = random_matrix(8, 45, 3);
    RollingConfig cfg;
    cfg.first_origin = 38;
    GridSpec g;
    g.learning_rates = {0.05, 0.1};
    g.max_depths = {2, 3};
    g.n_estimators = {10, 25};
    g.weight_decays = {0.0, 0.01};
    const auto result = grid_search(fm, cfg, g);
    ASSERT_EQ(result.rows.size(), 16u);
    for (const auto& r : result.rows) {
        RollingConfig one = cfg;
        one.model.gbdt = r.params;
        const auto rep = run_rolling(fm, one);
        EXPECT_EQ(rep.mae, r.mae);
        EXPECT_EQ(rep.r2, r.r2);
    }
    EXPECT_EQ(result.best, select_best(result.rows));
    EXPECT_EQ(result.rows.front().params.learning_rate, 0.05);
    EXPECT_EQ(result.rows.front().params.max_depth, 2);
    EXPECT_EQ(result.rows.front().params.n_estimators, 10);
    EXPECT_EQ(result.rows[1].params.weight_decay, 0.01);
}

TEST(Ablation, RequiresSharedDates) {
    auto a = random_matrix(9, 30, 2);
    auto b = random_matrix(10, 30, 3);
    b.feature_set = FeatureSet::FS2;
    RollingConfig cfg;
    cfg.first_origin = 25;
    cfg.model.kind = ModelKind::linear;
    const auto rows = ablation({a, b}, cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].columns, 3u);
    EXPECT_EQ(rows[0].scored, 4u);
    b.dates[0] = make_date(2020, 1, 1);
    EXPECT_THROW(ablation({a, b}, cfg), PreconditionError);
}

}  // namespace
}  // namespace eventflow

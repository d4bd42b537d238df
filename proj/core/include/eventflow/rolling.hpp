#pragma once

#include "eventflow/features.hpp"
#include "eventflow/model.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace eventflow {

inline constexpr int kMaxHorizon = 7;

struct RollingConfig {
    /// Row index of the first origin; training at origin t uses rows 0..t.
    std::size_t first_origin = 0;
    int horizon = 1;
    ModelSpec model;
    /// Worker threads used to evaluate origins.
    int jobs = 1;

    void validate() const;
};

struct Scores {
    double mae = 0.0;
    double r2 = 0.0;
};

/// MAE and R^2 = 1 - SSE/SST. Throws ZeroVariance (carrying the MAE) for a
/// constant y.
Scores score(std::span<const double> y, std::span<const double> y_hat);

struct RawForecast {
    std::size_t origin = 0;
    std::size_t target = 0;
    int lead = 1;
    double value = 0.0;
};

struct LeadScore {
    int lead = 1;
    std::size_t count = 0;
    double mae = 0.0;
    std::optional<double> r2;
};

struct RollingReport {
    std::vector<std::size_t> rows;       ///< scored row indices, ascending
    std::vector<double> actual;
    std::vector<double> predicted;       ///< mean of the forecasts targeting each row
    std::vector<int> contributors;       ///< forecasts averaged per row
    std::vector<RawForecast> raw;        ///< ordered by (origin, lead)
    double mae = 0.0;
    std::optional<double> r2;            ///< empty when the scored target is constant
    std::vector<LeadScore> per_lead;
};

/// Forecasts for rows origin+1 .. origin+steps, using only data up to the
/// origin.
using Forecaster = std::function<std::vector<double>(std::size_t origin, int steps)>;

/// Rolling loop over a target series with an arbitrary forecaster. Origins
/// run from first_origin to n-2; each target row s is predicted by the mean
/// of the forecasts issued at origins max(first_origin, s - horizon)..s-1.
RollingReport roll(std::span<const double> y, std::size_t first_origin, int horizon, const Forecaster& forecaster,
                   int jobs = 1);

/// Forecaster that refits cfg.model at every origin on rows 0..t. The
/// flow-derived trend column of every target row is replaced by its value
/// on row t+1, the last one computable from flows up to the origin.
Forecaster model_forecaster(const FeatureMatrix& data, const ModelSpec& spec);

RollingReport run_rolling(const FeatureMatrix& data, const RollingConfig& cfg);

nlohmann::json report_to_json(const RollingReport& report, const FeatureMatrix& data, const RollingConfig& cfg);

struct GridSpec {
    std::vector<double> learning_rates{0.01, 0.05, 0.1};
    std::vector<int> max_depths{3, 5, 7};
    std::vector<int> n_estimators{100, 200, 500, 1000};
    std::vector<double> weight_decays{0.0, 0.001, 0.002, 0.003, 0.004, 0.005, 0.006};

    void validate() const;
    std::size_t size() const;
};

struct GridRow {
    GbdtParams params;
    double mae = 0.0;
    std::optional<double> r2;
};

struct GridResult {
    std::vector<GridRow> rows;  ///< learning rate, depth, trees, decay in nested axis order
    std::size_t best = 0;
};

/// Index of the best row: highest R^2, ties to fewer trees, then shallower
/// depth, then smaller learning rate, then smaller decay. Rows without R^2
/// rank last.
std::size_t select_best(const std::vector<GridRow>& rows);

/// Evaluates every GBDT combination at horizon 1 with cfg's first origin.
/// Other GBDT fields (min_samples_leaf, seed) come from cfg.model.gbdt.
GridResult grid_search(const FeatureMatrix& data, const RollingConfig& cfg, const GridSpec& grid);

struct AblationRow {
    FeatureSet feature_set = FeatureSet::FS1;
    std::size_t columns = 0;
    std::size_t scored = 0;
    double mae = 0.0;
    std::optional<double> r2;
};

/// One rolling run per matrix with an identical config; all matrices must
/// share the same dates.
std::vector<AblationRow> ablation(const std::vector<FeatureMatrix>& matrices, const RollingConfig& cfg);

}  // namespace eventflow

#pragma once

#include "eventflow/forest.hpp"
#include "eventflow/gbdt.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eventflow {

struct ShapResult {
    double base_value = 0.0;
    Matrix values;  ///< samples x features, in target units
    std::vector<std::string> features;
};

/// Path-dependent tree SHAP for one tree; adds each feature's contribution
/// for sample x into phi. Node covers act as the background distribution.
void tree_shap(const RegressionTree& tree, std::span<const double> x, std::span<double> phi);

/// Ensemble attribution: base = base_score + rate * sum of tree expectations,
/// contributions = rate * sum of per-tree contributions. Throws
/// SchemaMismatch when X has the wrong number of columns.
ShapResult tree_shap(const Ensemble& model, const Matrix& x, std::vector<std::string> names = {}, int jobs = 1);
/// Forest attribution: the mean over member trees.
ShapResult tree_shap(const Forest& model, const Matrix& x, std::vector<std::string> names = {}, int jobs = 1);

struct FeatureImportance {
    std::string feature;
    std::size_t index = 0;
    double value = 0.0;   ///< mean |SHAP| or mean metric degradation
    double spread = 0.0;  ///< std deviation over repeats (permutation only)
};

/// (feature value, contribution) pairs for beeswarm-style plots.
struct SummaryPoint {
    std::string feature;
    std::size_t sample = 0;
    double feature_value = 0.0;
    double contribution = 0.0;
};

struct ImportanceReport {
    std::vector<FeatureImportance> ranking;  ///< descending by value, ties by column index
    std::vector<SummaryPoint> points;
};

enum class ErrorMetric { mae, mse };

using Predictor = std::function<std::vector<double>(const Matrix&)>;

/// Mean increase of `metric` over `repeats` shuffles of each column.
/// Shuffles come from one mt19937_64 stream seeded with `seed`, visited in
/// column-major then repeat order.
ImportanceReport permutation_importance(const Predictor& predict, const Matrix& x, std::span<const double> y,
                                        ErrorMetric metric, int repeats, std::uint64_t seed,
                                        std::vector<std::string> names = {});

/// Ranking by mean |contribution| truncated to top_k (0 keeps all), plus
/// summary points for the ranked features. `feature_values` supplies the
/// raw values the contributions were computed for.
ImportanceReport export_summary(const ShapResult& shap, const Matrix& feature_values, std::size_t top_k = 10);

nlohmann::json importance_to_json(const ImportanceReport& report, double base_value);

}  // namespace eventflow

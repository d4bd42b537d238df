#pragma once

#include "eventflow/tree.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace eventflow {

struct GbdtParams {
    double learning_rate = 0.05;
    int max_depth = 3;
    int n_estimators = 500;
    double weight_decay = 0.005;
    int min_samples_leaf = 5;
    std::uint64_t random_seed = 0;

    void validate() const;
    friend bool operator==(const GbdtParams&, const GbdtParams&) = default;
};

/// w_t = max(1 - (T - t) * decay, 0) for t = 1..T. Decays with a short
/// decimal form (0.001, 0.0025) give the correctly rounded weight of that
/// decimal value.
std::vector<double> sample_weights(std::size_t length, double decay);

struct Ensemble {
    double base_score = 0.0;
    double learning_rate = 1.0;
    std::vector<RegressionTree> trees;
    std::size_t n_features = 0;

    double predict_row(std::span<const double> x) const;
};

/// Squared-error gradient boosting. Rows with zero weight are removed
/// before fitting, so their presence never changes the model.
Ensemble fit_gbdt(const Matrix& x, std::span<const double> y, std::span<const double> w, const GbdtParams& params);
/// Uses sample_weights(rows, params.weight_decay).
Ensemble fit_gbdt(const Matrix& x, std::span<const double> y, const GbdtParams& params);

std::vector<double> predict_gbdt(const Ensemble& model, const Matrix& x);

/// Shared argument checks for the tabular learners.
void check_training_data(const Matrix& x, std::span<const double> y, std::span<const double> w);

/// Copies of the rows with positive weight.
struct CompactData {
    Matrix x;
    std::vector<double> y;
    std::vector<double> w;
};
CompactData drop_zero_weight(const Matrix& x, std::span<const double> y, std::span<const double> w);

}  // namespace eventflow

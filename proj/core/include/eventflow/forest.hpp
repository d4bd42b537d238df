#pragma once

#include "eventflow/tree.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace eventflow {

struct ForestParams {
    int n_trees = 200;
    int max_depth = 8;
    int min_samples_leaf = 5;
    /// Features tried per split; 0 means one third of the columns (at least 1).
    int max_features = 0;
    bool bootstrap = true;
    std::uint64_t random_seed = 0;

    void validate() const;
    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct Forest {
    std::vector<RegressionTree> trees;
    std::size_t n_features = 0;

    /// Unweighted mean of the member trees.
    double predict_row(std::span<const double> x) const;
};

/// Bagged regression trees. Each bootstrap draws n rows with probability
/// proportional to w; the draw counts become the tree's row weights.
Forest fit_rf(const Matrix& x, std::span<const double> y, std::span<const double> w, const ForestParams& params);

std::vector<double> predict_rf(const Forest& model, const Matrix& x);

}  // namespace eventflow

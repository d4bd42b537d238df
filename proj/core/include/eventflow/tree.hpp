#pragma once

#include "eventflow/features.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace eventflow {

/// Internal nodes send x[feature] < threshold left. Leaves have feature -1.
/// `cover` is the total training weight that reached the node.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double cover = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    double predict(std::span<const double> x) const;
    /// Index of the leaf reached by x.
    int leaf_index(std::span<const double> x) const;
    int depth() const;
    /// Cover-weighted mean of the leaf values.
    double expected_value() const;
    /// Largest feature index used by a split, or -1 for a stump.
    int max_feature() const;
};

struct TreeParams {
    int max_depth = 3;
    int min_samples_leaf = 5;
    /// Features drawn per node; 0 or >= column count means all features.
    int max_features = 0;
};

/// Exact greedy regression-tree fitting over one design matrix. Column
/// orderings are computed once, so many trees (boosting rounds, forest
/// members) can be grown on the same rows cheaply.
///
/// Splits maximise the weighted variance reduction
/// SL^2/WL + SR^2/WR - S^2/W over midpoints between consecutive distinct
/// values; ties keep the lowest feature index, then the lowest threshold.
/// Rows with zero weight are invisible: they neither count toward
/// min_samples_leaf nor contribute candidate thresholds.
class TreeBuilder {
public:
    explicit TreeBuilder(const Matrix& x);

    /// Grows one tree on (target, weight). `rng` is only consulted when
    /// params.max_features subsamples the columns.
    RegressionTree fit(std::span<const double> target, std::span<const double> weight, const TreeParams& params,
                       std::mt19937_64* rng = nullptr);

    /// Leaf node index of every training row in the last fitted tree
    /// (-1 for zero-weight rows).
    const std::vector<int>& leaf_of_rows() const { return node_of_; }

private:
    const Matrix& x_;
    std::vector<std::vector<std::uint32_t>> order_;  // per feature, rows by ascending value
    std::vector<int> node_of_;
};

/// Uniform double in [0, 1) from 53 random bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng);
/// Uniform integer in [0, n).
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

}  // namespace eventflow

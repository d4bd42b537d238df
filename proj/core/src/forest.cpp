#include "eventflow/forest.hpp"

#include "eventflow/error.hpp"
#include "eventflow/gbdt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace eventflow {

void ForestParams::validate() const {
    if (n_trees < 1) throw ConfigError("forecast_models", "n_trees must be >= 1");
    if (max_depth < 0) throw ConfigError("forecast_models", "max_depth must be >= 0");
    if (min_samples_leaf < 1) throw ConfigError("forecast_models", "min_samples_leaf must be >= 1");
    if (max_features < 0) throw ConfigError("forecast_models", "max_features must be >= 0");
}

double Forest::predict_row(std::span<const double> x) const {
    if (x.size() != n_features) {
        throw DimensionMismatch(fmt::format("expected {} features, got {}", n_features, x.size()));
    }
    double acc = 0.0;
    for (const auto& tree : trees) acc += tree.predict(x);
    return acc / static_cast<double>(trees.size());
}

Forest fit_rf(const Matrix& x, std::span<const double> y, std::span<const double> w, const ForestParams& params) {
    params.validate();
    check_training_data(x, y, w);
    const CompactData data = drop_zero_weight(x, y, w);
    const std::size_t n = data.y.size();
    const int p = static_cast<int>(x.cols());

    Forest forest;
    forest.n_features = static_cast<std::size_t>(p);
    TreeParams tree_params{params.max_depth, params.min_samples_leaf,
                           params.max_features > 0 ? params.max_features : std::max(1, p / 3)};

    std::vector<double> cumulative(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += data.w[i];
        cumulative[i] = total;
    }

    std::mt19937_64 rng(params.random_seed);
    TreeBuilder builder(data.x);
    std::vector<double> counts(n);
    forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        if (params.bootstrap) {
            std::fill(counts.begin(), counts.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const double u = uniform01(rng) * total;
                auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
                if (it == cumulative.end()) --it;
                counts[static_cast<std::size_t>(it - cumulative.begin())] += 1.0;
            }
        } else {
            counts = data.w;
        }
        forest.trees.push_back(builder.fit(data.y, counts, tree_params, &rng));
    }
    return forest;
}

std::vector<double> predict_rf(const Forest& model, const Matrix& x) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        out[static_cast<std::size_t>(r)] =
            model.predict_row(std::span<const double>(x.row(r).data(), static_cast<std::size_t>(x.cols())));
    }
    return out;
}

}  // namespace eventflow

#include "eventflow/attribution.hpp"

#include "eventflow/error.hpp"
#include "eventflow/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eventflow {

using nlohmann::json;

namespace {

struct PathElement {
    int feature = -1;
    double zero_fraction = 0.0;
    double one_fraction = 0.0;
    double weight = 0.0;
};

using Path = std::vector<PathElement>;

void extend(Path& path, double zero_fraction, double one_fraction, int feature) {
    const std::size_t depth = path.size();
    path.push_back(PathElement{feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0});
    const auto l = static_cast<double>(depth);
    for (std::size_t k = depth; k-- > 0;) {
        const auto i = static_cast<double>(k);
        path[k + 1].weight += one_fraction * path[k].weight * (i + 1.0) / (l + 1.0);
        path[k].weight = zero_fraction * path[k].weight * (l - i) / (l + 1.0);
    }
}

void unwind(Path& path, std::size_t index) {
    const std::size_t last = path.size() - 1;
    const auto l = static_cast<double>(last);
    const double one = path[index].one_fraction;
    const double zero = path[index].zero_fraction;
    double next = path[last].weight;
    for (std::size_t k = last; k-- > 0;) {
        const auto j = static_cast<double>(k);
        if (one != 0.0) {
            const double tmp = path[k].weight;
            path[k].weight = next * (l + 1.0) / ((j + 1.0) * one);
            next = tmp - path[k].weight * zero * (l - j) / (l + 1.0);
        } else {
            path[k].weight = path[k].weight * (l + 1.0) / (zero * (l - j));
        }
    }
    for (std::size_t k = index; k < last; ++k) {
        path[k].feature = path[k + 1].feature;
        path[k].zero_fraction = path[k + 1].zero_fraction;
        path[k].one_fraction = path[k + 1].one_fraction;
    }
    path.pop_back();
}

double unwound_sum(const Path& path, std::size_t index) {
    const std::size_t last = path.size() - 1;
    const auto l = static_cast<double>(last);
    const double one = path[index].one_fraction;
    const double zero = path[index].zero_fraction;
    double next = path[last].weight;
    double total = 0.0;
    for (std::size_t k = last; k-- > 0;) {
        const auto j = static_cast<double>(k);
        if (one != 0.0) {
            const double tmp = next * (l + 1.0) / ((j + 1.0) * one);
            total += tmp;
            next = path[k].weight - tmp * zero * (l - j) / (l + 1.0);
        } else {
            total += path[k].weight / zero * (l + 1.0) / (l - j);
        }
    }
    return total;
}

void recurse(const RegressionTree& tree, std::span<const double> x, std::span<double> phi, int node_index, Path path,
             double zero_fraction, double one_fraction, int feature) {
    extend(path, zero_fraction, one_fraction, feature);
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    if (node.is_leaf()) {
        for (std::size_t i = 1; i < path.size(); ++i) {
            const double w = unwound_sum(path, i);
            phi[static_cast<std::size_t>(path[i].feature)] +=
                w * (path[i].one_fraction - path[i].zero_fraction) * node.value;
        }
        return;
    }
    const bool go_left = x[static_cast<std::size_t>(node.feature)] < node.threshold;
    const int hot = go_left ? node.left : node.right;
    const int cold = go_left ? node.right : node.left;
    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path[k].feature == node.feature) {
            incoming_zero = path[k].zero_fraction;
            incoming_one = path[k].one_fraction;
            unwind(path, k);
            break;
        }
    }
    const double cover = node.cover;
    const double hot_cover = tree.nodes[static_cast<std::size_t>(hot)].cover;
    const double cold_cover = tree.nodes[static_cast<std::size_t>(cold)].cover;
    recurse(tree, x, phi, hot, path, incoming_zero * hot_cover / cover, incoming_one, node.feature);
    recurse(tree, x, phi, cold, path, incoming_zero * cold_cover / cover, 0.0, node.feature);
}

std::vector<std::string> default_names(std::vector<std::string> names, std::size_t count) {
    if (names.empty()) {
        for (std::size_t j = 0; j < count; ++j) names.push_back(fmt::format("x{}", j));
    }
    if (names.size() != count) {
        throw SchemaMismatch(fmt::format("{} feature names for {} columns", names.size(), count));
    }
    return names;
}

ShapResult shap_trees(const std::vector<RegressionTree>& trees, double base, double scale, std::size_t n_features,
                      const Matrix& x, std::vector<std::string> names, int jobs) {
    if (static_cast<std::size_t>(x.cols()) != n_features) {
        throw SchemaMismatch(fmt::format("model expects {} features, matrix has {}", n_features, x.cols()));
    }
    ShapResult result;
    result.features = default_names(std::move(names), n_features);
    double expected = 0.0;
    for (const auto& tree : trees) expected += tree.expected_value();
    result.base_value = base + scale * expected;
    result.values = Matrix::Zero(x.rows(), x.cols());
    parallel_for(static_cast<std::size_t>(x.rows()), jobs, [&](std::size_t r) {
        const auto row = static_cast<Eigen::Index>(r);
        const std::span<const double> sample(x.row(row).data(), n_features);
        std::vector<double> phi(n_features, 0.0);
        for (const auto& tree : trees) tree_shap(tree, sample, phi);
        for (std::size_t j = 0; j < n_features; ++j) result.values(row, static_cast<Eigen::Index>(j)) = scale * phi[j];
    });
    return result;
}

void sort_ranking(std::vector<FeatureImportance>& ranking) {
    std::stable_sort(ranking.begin(), ranking.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.index < b.index;
    });
}

}  // namespace

void tree_shap(const RegressionTree& tree, std::span<const double> x, std::span<double> phi) {
    if (tree.nodes.empty()) return;
    const int used = tree.max_feature();
    if (used >= 0 && (static_cast<std::size_t>(used) >= x.size() || static_cast<std::size_t>(used) >= phi.size())) {
        throw SchemaMismatch("tree splits on a feature the sample does not have");
    }
    Path path;
    path.reserve(static_cast<std::size_t>(tree.depth()) + 2);
    recurse(tree, x, phi, 0, std::move(path), 1.0, 1.0, -1);
}

ShapResult tree_shap(const Ensemble& model, const Matrix& x, std::vector<std::string> names, int jobs) {
    return shap_trees(model.trees, model.base_score, model.learning_rate, model.n_features, x, std::move(names), jobs);
}

ShapResult tree_shap(const Forest& model, const Matrix& x, std::vector<std::string> names, int jobs) {
    if (model.trees.empty()) throw SchemaMismatch("forest has no trees");
    return shap_trees(model.trees, 0.0, 1.0 / static_cast<double>(model.trees.size()), model.n_features, x,
                      std::move(names), jobs);
}

ImportanceReport permutation_importance(const Predictor& predict, const Matrix& x, std::span<const double> y,
                                        ErrorMetric metric, int repeats, std::uint64_t seed,
                                        std::vector<std::string> names) {
    if (repeats < 1) throw PreconditionError("attribution", "repeats must be >= 1");
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw SchemaMismatch(fmt::format("{} rows but {} targets", x.rows(), y.size()));
    }
    const auto p = static_cast<std::size_t>(x.cols());
    names = default_names(std::move(names), p);
    auto error = [&](const std::vector<double>& y_hat) {
        double total = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - y_hat[i];
            total += metric == ErrorMetric::mae ? std::abs(e) : e * e;
        }
        return total / static_cast<double>(y.size());
    };
    const double baseline = error(predict(x));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(static_cast<std::size_t>(x.rows()));
    ImportanceReport report;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> deltas;
        for (int r = 0; r < repeats; ++r) {
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = perm.size(); i > 1; --i) {
                std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
            }
            Matrix shuffled = x;
            const auto col = static_cast<Eigen::Index>(j);
            for (std::size_t i = 0; i < perm.size(); ++i) {
                shuffled(static_cast<Eigen::Index>(i), col) = x(static_cast<Eigen::Index>(perm[i]), col);
            }
            deltas.push_back(error(predict(shuffled)) - baseline);
        }
        const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(repeats);
        double var = 0.0;
        for (double d : deltas) var += (d - mean) * (d - mean);
        report.ranking.push_back(
            FeatureImportance{names[j], j, mean, std::sqrt(var / static_cast<double>(repeats))});
    }
    sort_ranking(report.ranking);
    return report;
}

ImportanceReport export_summary(const ShapResult& shap, const Matrix& feature_values, std::size_t top_k) {
    if (feature_values.rows() != shap.values.rows() || feature_values.cols() != shap.values.cols()) {
        throw SchemaMismatch("feature values do not match the attribution matrix");
    }
    ImportanceReport report;
    const auto n = static_cast<double>(std::max<Eigen::Index>(shap.values.rows(), 1));
    for (Eigen::Index j = 0; j < shap.values.cols(); ++j) {
        const double mean_abs = shap.values.col(j).cwiseAbs().sum() / n;
        report.ranking.push_back(
            FeatureImportance{shap.features.at(static_cast<std::size_t>(j)), static_cast<std::size_t>(j), mean_abs, 0.0});
    }
    sort_ranking(report.ranking);
    if (top_k > 0 && report.ranking.size() > top_k) report.ranking.resize(top_k);
    for (const auto& f : report.ranking) {
        const auto col = static_cast<Eigen::Index>(f.index);
        for (Eigen::Index r = 0; r < shap.values.rows(); ++r) {
            report.points.push_back(SummaryPoint{f.feature, static_cast<std::size_t>(r), feature_values(r, col),
                                                 shap.values(r, col)});
        }
    }
    return report;
}

json importance_to_json(const ImportanceReport& report, double base_value) {
    json ranking = json::array();
    for (std::size_t i = 0; i < report.ranking.size(); ++i) {
        const auto& f = report.ranking[i];
        ranking.push_back({{"rank", i + 1}, {"feature", f.feature}, {"column", f.index}, {"mean_abs_shap", f.value}});
    }
    return json{{"base_value", base_value}, {"ranking", ranking}};
}

}  // namespace eventflow

#include "eventflow/gbdt.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace eventflow {

void GbdtParams::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("forecast_models", "learning_rate must be > 0");
    if (max_depth < 0) throw ConfigError("forecast_models", "max_depth must be >= 0");
    if (n_estimators < 1) throw ConfigError("forecast_models", "n_estimators must be >= 1");
    if (!(weight_decay >= 0.0)) throw ConfigError("forecast_models", "weight_decay must be >= 0");
    if (min_samples_leaf < 1) throw ConfigError("forecast_models", "min_samples_leaf must be >= 1");
}

namespace {

/// decay as num/den when its shortest decimal form has at most 9 fractional
/// digits, so weights can be rounded once from exact integers.
std::optional<std::pair<std::int64_t, std::int64_t>> decimal_fraction(double decay) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), decay, std::chars_format::fixed);
    if (res.ec != std::errc{}) return std::nullopt;
    const std::string_view text(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (frac.size() > 9 || whole.size() > 6) return std::nullopt;
    std::int64_t num = 0;
    std::int64_t den = 1;
    for (char c : whole) num = num * 10 + (c - '0');
    for (char c : frac) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    return std::pair{num, den};
}

}  // namespace

std::vector<double> sample_weights(std::size_t length, double decay) {
    if (length < 1) throw PreconditionError("forecast_models", "sample_weights needs length >= 1");
    if (!(decay >= 0.0) || !std::isfinite(decay)) throw PreconditionError("forecast_models", "weight decay must be >= 0");
    std::vector<double> w(length);
    const auto frac = decimal_fraction(decay);
    for (std::size_t t = 1; t <= length; ++t) {
        const std::size_t age = length - t;
        std::int64_t scaled = 0;
        if (frac && age < (std::size_t{1} << 20) &&
            !__builtin_mul_overflow(static_cast<std::int64_t>(age), frac->first, &scaled) &&
            scaled < (std::int64_t{1} << 53)) {
            const std::int64_t num = frac->second - scaled;
            w[t - 1] = num > 0 ? static_cast<double>(num) / static_cast<double>(frac->second) : 0.0;
        } else {
            w[t - 1] = std::max(std::fma(-static_cast<double>(age), decay, 1.0), 0.0);
        }
    }
    return w;
}

double Ensemble::predict_row(std::span<const double> x) const {
    if (x.size() != n_features) {
        throw DimensionMismatch(fmt::format("expected {} features, got {}", n_features, x.size()));
    }
    double acc = base_score;
    for (const auto& tree : trees) acc += learning_rate * tree.predict(x);
    return acc;
}

void check_training_data(const Matrix& x, std::span<const double> y, std::span<const double> w) {
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.size() != w.size()) {
        throw DimensionMismatch(
                                fmt::format("rows {}, targets {}, weights {}", x.rows(), y.size(), w.size()));
    }
    if (y.size() < 2) throw DimensionMismatch("at least two training rows required");
    if (!x.allFinite()) throw NonFiniteInput("design matrix has non-finite values");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) throw NonFiniteInput(fmt::format("target {} is not finite", i));
        if (!std::isfinite(w[i]) || w[i] < 0.0) {
            throw NonFiniteInput(fmt::format("weight {} must be finite and >= 0", i));
        }
    }
}

CompactData drop_zero_weight(const Matrix& x, std::span<const double> y, std::span<const double> w) {
    CompactData out;
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) keep.push_back(static_cast<Eigen::Index>(i));
    }
    if (keep.empty()) throw PreconditionError("forecast_models", "all sample weights are zero");
    out.x.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.x.row(static_cast<Eigen::Index>(k)) = x.row(keep[k]);
        out.y.push_back(y[static_cast<std::size_t>(keep[k])]);
        out.w.push_back(w[static_cast<std::size_t>(keep[k])]);
    }
    return out;
}

Ensemble fit_gbdt(const Matrix& x, std::span<const double> y, std::span<const double> w, const GbdtParams& params) {
    params.validate();
    check_training_data(x, y, w);
    const CompactData data = drop_zero_weight(x, y, w);
    const std::size_t n = data.y.size();

    Ensemble model;
    model.learning_rate = params.learning_rate;
    model.n_features = static_cast<std::size_t>(x.cols());
    double sw = 0.0;
    double swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += data.w[i];
        swy += data.w[i] * data.y[i];
    }
    model.base_score = swy / sw;

    TreeBuilder builder(data.x);
    const TreeParams tree_params{params.max_depth, params.min_samples_leaf, 0};
    std::vector<double> fitted(n, model.base_score);
    std::vector<double> residual(n);
    model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
    for (int i = 0; i < params.n_estimators; ++i) {
        for (std::size_t r = 0; r < n; ++r) residual[r] = data.y[r] - fitted[r];
        RegressionTree tree = builder.fit(residual, data.w, tree_params);
        const auto& leaf = builder.leaf_of_rows();
        for (std::size_t r = 0; r < n; ++r) {
            fitted[r] += params.learning_rate * tree.nodes[static_cast<std::size_t>(leaf[r])].value;
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

Ensemble fit_gbdt(const Matrix& x, std::span<const double> y, const GbdtParams& params) {
    params.validate();
    const auto w = sample_weights(static_cast<std::size_t>(x.rows()), params.weight_decay);
    return fit_gbdt(x, y, w, params);
}

std::vector<double> predict_gbdt(const Ensemble& model, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.n_features) {
        throw DimensionMismatch(
                                fmt::format("expected {} features, got {}", model.n_features, x.cols()));
    }
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        out[static_cast<std::size_t>(r)] = model.predict_row(std::span<const double>(x.row(r).data(), static_cast<std::size_t>(x.cols())));
    }
    return out;
}

}  // namespace eventflow

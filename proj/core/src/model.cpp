#include "eventflow/model.hpp"

#include "eventflow/error.hpp"

#include <fmt/format.h>

#include <array>
#include <utility>

namespace eventflow {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatTag = "eventflow-model";

constexpr std::array<std::pair<ModelKind, std::string_view>, 4> kKindNames{{
    {ModelKind::gbdt, "gbdt"},
    {ModelKind::rf, "rf"},
    {ModelKind::linear, "linear"},
    {ModelKind::arima, "arima"},
}};

json node_to_json(const RegressionTree& tree, int index) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(index)];
    json out{{"cover", n.cover}, {"value", n.value}};
    if (!n.is_leaf()) {
        out["split_feature"] = n.feature;
        out["threshold"] = n.threshold;
        out["left"] = node_to_json(tree, n.left);
        out["right"] = node_to_json(tree, n.right);
    }
    return out;
}

int node_from_json(const json& doc, RegressionTree& tree) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    TreeNode node;
    node.cover = doc.at("cover").get<double>();
    node.value = doc.at("value").get<double>();
    if (doc.contains("split_feature")) {
        node.feature = doc.at("split_feature").get<int>();
        node.threshold = doc.at("threshold").get<double>();
        if (node.feature < 0) throw SchemaMismatch("split_feature must be >= 0");
        node.left = node_from_json(doc.at("left"), tree);
        node.right = node_from_json(doc.at("right"), tree);
    }
    tree.nodes[static_cast<std::size_t>(index)] = node;
    return index;
}

json trees_to_json(const std::vector<RegressionTree>& trees) {
    json out = json::array();
    for (const auto& tree : trees) out.push_back(node_to_json(tree, 0));
    return out;
}

std::vector<RegressionTree> trees_from_json(const json& doc, std::size_t n_features) {
    std::vector<RegressionTree> trees;
    for (const auto& item : doc) {
        RegressionTree tree;
        node_from_json(item, tree);
        if (tree.max_feature() >= static_cast<int>(n_features)) {
            throw SchemaMismatch("tree splits on a feature beyond n_features");
        }
        trees.push_back(std::move(tree));
    }
    return trees;
}

std::span<const double> row_span(const Matrix& x, Eigen::Index r) {
    return {x.row(r).data(), static_cast<std::size_t>(x.cols())};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

double ModelSpec::weight_decay() const {
    return kind == ModelKind::gbdt ? gbdt.weight_decay : baseline_decay;
}

void ModelSpec::validate() const {
    switch (kind) {
        case ModelKind::gbdt: gbdt.validate(); break;
        case ModelKind::rf: rf.validate(); break;
        case ModelKind::linear: break;
        case ModelKind::arima: arima.validate(); break;
    }
    if (!(baseline_decay >= 0.0)) throw ConfigError("forecast_models", "weight decay must be >= 0");
}

json spec_to_json(const ModelSpec& spec) {
    json out{{"kind", to_string(spec.kind)}};
    switch (spec.kind) {
        case ModelKind::gbdt:
            out["learning_rate"] = spec.gbdt.learning_rate;
            out["max_depth"] = spec.gbdt.max_depth;
            out["n_estimators"] = spec.gbdt.n_estimators;
            out["weight_decay"] = spec.gbdt.weight_decay;
            out["min_samples_leaf"] = spec.gbdt.min_samples_leaf;
            out["random_seed"] = spec.gbdt.random_seed;
            break;
        case ModelKind::rf:
            out["n_trees"] = spec.rf.n_trees;
            out["max_depth"] = spec.rf.max_depth;
            out["min_samples_leaf"] = spec.rf.min_samples_leaf;
            out["max_features"] = spec.rf.max_features;
            out["bootstrap"] = spec.rf.bootstrap;
            out["random_seed"] = spec.rf.random_seed;
            out["weight_decay"] = spec.baseline_decay;
            break;
        case ModelKind::linear:
            out["weight_decay"] = spec.baseline_decay;
            break;
        case ModelKind::arima:
            out["p"] = spec.arima.p;
            out["d"] = spec.arima.d;
            out["q"] = spec.arima.q;
            break;
    }
    return out;
}

ModelKind kind_of(const FittedModel& model) {
    return static_cast<ModelKind>(model.index());
}

FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y) {
    spec.validate();
    switch (spec.kind) {
        case ModelKind::gbdt: return fit_gbdt(x, y, spec.gbdt);
        case ModelKind::rf: {
            const auto w = sample_weights(y.size(), spec.weight_decay());
            return fit_rf(x, y, w, spec.rf);
        }
        case ModelKind::linear: {
            const auto w = sample_weights(y.size(), spec.weight_decay());
            return fit_linear(x, y, w);
        }
        case ModelKind::arima: return fit_arima(y, spec.arima);
    }
    throw PreconditionError("forecast_models", "unknown model kind");
}

double predict_row(const FittedModel& model, std::span<const double> x) {
    switch (kind_of(model)) {
        case ModelKind::gbdt: return std::get<Ensemble>(model).predict_row(x);
        case ModelKind::rf: return std::get<Forest>(model).predict_row(x);
        case ModelKind::linear: return std::get<LinearModel>(model).predict_row(x);
        case ModelKind::arima: break;
    }
    throw PreconditionError("forecast_models", "ARIMA models forecast from their own history, not from rows");
}

std::vector<double> predict_rows(const FittedModel& model, const Matrix& x) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = predict_row(model, row_span(x, r));
    return out;
}

json model_to_json(const FittedModel& model, const std::vector<std::string>& columns) {
    json doc{{"format", kFormatTag}, {"version", kModelFormatVersion}, {"kind", to_string(kind_of(model))}};
    if (!columns.empty()) doc["columns"] = columns;
    switch (kind_of(model)) {
        case ModelKind::gbdt: {
            const auto& m = std::get<Ensemble>(model);
            doc["base_score"] = m.base_score;
            doc["learning_rate"] = m.learning_rate;
            doc["n_features"] = m.n_features;
            doc["trees"] = trees_to_json(m.trees);
            break;
        }
        case ModelKind::rf: {
            const auto& m = std::get<Forest>(model);
            doc["n_features"] = m.n_features;
            doc["trees"] = trees_to_json(m.trees);
            break;
        }
        case ModelKind::linear: {
            const auto& m = std::get<LinearModel>(model);
            doc["intercept"] = m.intercept;
            doc["coefficients"] = m.coefficients;
            doc["ridge_fallback"] = m.ridge_fallback;
            break;
        }
        case ModelKind::arima: {
            const auto& m = std::get<ArimaModel>(model);
            doc["order"] = {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}};
            doc["ar"] = m.ar;
            doc["ma"] = m.ma;
            doc["intercept"] = m.intercept;
            doc["sigma2"] = m.sigma2;
            doc["stationary"] = m.stationary;
            doc["diff_tail"] = m.diff_tail;
            doc["residual_tail"] = m.residual_tail;
            doc["anchors"] = m.anchors;
            break;
        }
    }
    return doc;
}

LoadedModel model_from_json(const json& doc) {
    try {
        if (doc.value("format", std::string{}) != kFormatTag) throw SchemaMismatch("not an eventflow model document");
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw SchemaMismatch(fmt::format("unsupported model version {}", version));
        }
        const auto kind = parse_model_kind(doc.at("kind").get<std::string>());
        if (!kind) throw SchemaMismatch("unknown model kind");
        LoadedModel out;
        if (doc.contains("columns")) out.columns = doc.at("columns").get<std::vector<std::string>>();
        switch (*kind) {
            case ModelKind::gbdt: {
                Ensemble m;
                m.base_score = doc.at("base_score").get<double>();
                m.learning_rate = doc.at("learning_rate").get<double>();
                m.n_features = doc.at("n_features").get<std::size_t>();
                m.trees = trees_from_json(doc.at("trees"), m.n_features);
                out.model = std::move(m);
                break;
            }
            case ModelKind::rf: {
                Forest m;
                m.n_features = doc.at("n_features").get<std::size_t>();
                m.trees = trees_from_json(doc.at("trees"), m.n_features);
                if (m.trees.empty()) throw SchemaMismatch("forest has no trees");
                out.model = std::move(m);
                break;
            }
            case ModelKind::linear: {
                LinearModel m;
                m.intercept = doc.at("intercept").get<double>();
                m.coefficients = doc.at("coefficients").get<std::vector<double>>();
                m.ridge_fallback = doc.value("ridge_fallback", false);
                out.model = std::move(m);
                break;
            }
            case ModelKind::arima: {
                ArimaModel m;
                const auto& order = doc.at("order");
                m.order = ArimaOrder{order.at("p").get<int>(), order.at("d").get<int>(), order.at("q").get<int>()};
                m.ar = doc.at("ar").get<std::vector<double>>();
                m.ma = doc.at("ma").get<std::vector<double>>();
                m.intercept = doc.at("intercept").get<double>();
                m.sigma2 = doc.at("sigma2").get<double>();
                m.stationary = doc.at("stationary").get<bool>();
                m.diff_tail = doc.at("diff_tail").get<std::vector<double>>();
                m.residual_tail = doc.at("residual_tail").get<std::vector<double>>();
                m.anchors = doc.at("anchors").get<std::vector<double>>();
                out.model = std::move(m);
                break;
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw SchemaMismatch(fmt::format("malformed model document: {}", e.what()));
    }
}

}  // namespace eventflow

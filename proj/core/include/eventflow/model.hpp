#pragma once

#include "eventflow/arima.hpp"
#include "eventflow/forest.hpp"
#include "eventflow/gbdt.hpp"
#include "eventflow/linear.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eventflow {

enum class ModelKind { gbdt, rf, linear, arima };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

/// Learner choice plus the parameters of every learner; only the block for
/// `kind` is used.
struct ModelSpec {
    ModelKind kind = ModelKind::gbdt;
    GbdtParams gbdt;
    ForestParams rf;
    ArimaOrder arima;
    /// Recency decay for the rf and linear learners (gbdt carries its own).
    double baseline_decay = 0.0;

    double weight_decay() const;
    void validate() const;
    /// True for learners that consume the design matrix.
    bool tabular() const { return kind != ModelKind::arima; }
};

/// Parameters of the selected learner, for report echoes.
nlohmann::json spec_to_json(const ModelSpec& spec);

using FittedModel = std::variant<Ensemble, Forest, LinearModel, ArimaModel>;

ModelKind kind_of(const FittedModel& model);

/// Fits on all rows with sample_weights(rows, spec.weight_decay()). ARIMA
/// ignores `x` and fits the target series.
FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y);

/// Predictions for tabular models.
std::vector<double> predict_rows(const FittedModel& model, const Matrix& x);
double predict_row(const FittedModel& model, std::span<const double> x);

/// Versioned JSON document; trees are nested node records. Loading an
/// emitted document reproduces every prediction exactly.
nlohmann::json model_to_json(const FittedModel& model, const std::vector<std::string>& columns = {});

struct LoadedModel {
    FittedModel model;
    std::vector<std::string> columns;
};

/// Throws SchemaMismatch on an unknown format, version or kind.
LoadedModel model_from_json(const nlohmann::json& doc);

inline constexpr int kModelFormatVersion = 1;

}  // namespace eventflow

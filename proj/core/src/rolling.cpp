#include "eventflow/rolling.hpp"

#include "eventflow/error.hpp"
#include "eventflow/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace eventflow {

using nlohmann::json;

void RollingConfig::validate() const {
    if (horizon < 1 || horizon > kMaxHorizon) {
        throw ConfigError("rolling_eval", fmt::format("horizon must be in 1..{}, got {}", kMaxHorizon, horizon));
    }
    if (first_origin < 1) throw ConfigError("rolling_eval", "first_origin must leave at least two training rows");
    if (jobs < 1) throw ConfigError("rolling_eval", "jobs must be >= 1");
    model.validate();
}

Scores score(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size()) {
        throw PreconditionError("rolling_eval", fmt::format("lengths differ: {} vs {}", y.size(), y_hat.size()));
    }
    if (y.size() < 2) throw PreconditionError("rolling_eval", "scoring needs at least two days");
    const auto n = static_cast<double>(y.size());
    double abs_sum = 0.0;
    double sse = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double err = y[i] - y_hat[i];
        abs_sum += std::abs(err);
        sse += err * err;
        mean += y[i];
    }
    mean /= n;
    double sst = 0.0;
    for (double v : y) sst += (v - mean) * (v - mean);
    const double mae = abs_sum / n;
    if (sst == 0.0) throw ZeroVariance("R^2 is undefined for a constant target", mae);
    return Scores{mae, 1.0 - sse / sst};
}

namespace {

/// Score that tolerates a constant target.
std::pair<double, std::optional<double>> score_lenient(std::span<const double> y, std::span<const double> y_hat) {
    try {
        const Scores s = score(y, y_hat);
        return {s.mae, s.r2};
    } catch (const ZeroVariance& e) {
        return {e.mae(), std::nullopt};
    }
}

}  // namespace

RollingReport roll(std::span<const double> y, std::size_t first_origin, int horizon, const Forecaster& forecaster,
                   int jobs) {
    const std::size_t n = y.size();
    if (horizon < 1) throw ConfigError("rolling_eval", "horizon must be >= 1");
    if (n < 2 || first_origin + 1 >= n) {
        throw InsufficientHistory("rolling_eval", fmt::format("first origin {} leaves no day to score in {} rows", first_origin, n));
    }
    const std::size_t last_origin = n - 2;
    const std::size_t n_origins = last_origin - first_origin + 1;

    std::vector<std::vector<double>> issued(n_origins);
    parallel_for(n_origins, jobs, [&](std::size_t k) {
        const std::size_t origin = first_origin + k;
        const int steps = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(horizon), n - 1 - origin));
        std::vector<double> values;
        try {
            values = forecaster(origin, steps);
        } catch (const Error& e) {
            throw OriginError(origin, fmt::format("origin {}: {}: {}", origin, e.module(), e.what()));
        }
        if (values.size() != static_cast<std::size_t>(steps)) {
            throw OriginError(origin, fmt::format("origin {}: forecaster returned {} values, expected {}", origin,
                                                  values.size(), steps));
        }
        issued[k] = std::move(values);
    });

    RollingReport report;
    for (std::size_t k = 0; k < n_origins; ++k) {
        for (std::size_t j = 0; j < issued[k].size(); ++j) {
            report.raw.push_back(RawForecast{first_origin + k, first_origin + k + j + 1, static_cast<int>(j) + 1, issued[k][j]});
        }
    }
    for (std::size_t s = first_origin + 1; s < n; ++s) {
        const std::size_t lo = s > first_origin + static_cast<std::size_t>(horizon) ? s - static_cast<std::size_t>(horizon) : first_origin;
        double sum = 0.0;
        int count = 0;
        for (std::size_t origin = lo; origin < s; ++origin) {
            sum += issued[origin - first_origin][s - origin - 1];
            ++count;
        }
        report.rows.push_back(s);
        report.actual.push_back(y[s]);
        report.predicted.push_back(count == 1 ? sum : sum / count);
        report.contributors.push_back(count);
    }
    if (report.rows.size() >= 2) {
        std::tie(report.mae, report.r2) = score_lenient(report.actual, report.predicted);
    } else {
        report.mae = std::abs(report.actual[0] - report.predicted[0]);
    }
    for (int lead = 1; lead <= horizon; ++lead) {
        std::vector<double> actual;
        std::vector<double> predicted;
        for (const auto& f : report.raw) {
            if (f.lead != lead) continue;
            actual.push_back(y[f.target]);
            predicted.push_back(f.value);
        }
        if (actual.empty()) continue;
        LeadScore ls;
        ls.lead = lead;
        ls.count = actual.size();
        if (actual.size() >= 2) {
            std::tie(ls.mae, ls.r2) = score_lenient(actual, predicted);
        } else {
            ls.mae = std::abs(actual[0] - predicted[0]);
        }
        report.per_lead.push_back(ls);
    }
    return report;
}

Forecaster model_forecaster(const FeatureMatrix& data, const ModelSpec& spec) {
    spec.validate();
    if (data.target.size() != data.rows() || static_cast<std::size_t>(data.values.rows()) != data.rows()) {
        throw PreconditionError("rolling_eval", "feature matrix rows and targets disagree");
    }
    return [&data, spec](std::size_t origin, int steps) {
        const auto train_rows = static_cast<Eigen::Index>(origin + 1);
        const std::span<const double> y(data.target.data(), origin + 1);
        if (spec.kind == ModelKind::arima) {
            const FittedModel model = fit_model(spec, Matrix(), y);
            return forecast(std::get<ArimaModel>(model), steps);
        }
        const Matrix train = data.values.topRows(train_rows);
        const FittedModel model = fit_model(spec, train, y);
        Matrix ahead = data.values.middleRows(train_rows, steps);
        if (data.trend_column) {
            const auto col = static_cast<Eigen::Index>(*data.trend_column);
            ahead.col(col).setConstant(data.values(train_rows, col));
        }
        return predict_rows(model, ahead);
    };
}

RollingReport run_rolling(const FeatureMatrix& data, const RollingConfig& cfg) {
    cfg.validate();
    if (cfg.first_origin + 1 >= data.rows()) {
        throw InsufficientHistory("rolling_eval", fmt::format("first origin {} leaves no day to score in {} rows",
                                                              cfg.first_origin, data.rows()));
    }
    return roll(data.target, cfg.first_origin, cfg.horizon, model_forecaster(data, cfg.model), cfg.jobs);
}

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json report_to_json(const RollingReport& report, const FeatureMatrix& data, const RollingConfig& cfg) {
    json config{{"feature_set", to_string(data.feature_set)},
                {"columns", data.columns},
                {"first_origin", cfg.first_origin},
                {"first_origin_date", format_date(data.dates.at(cfg.first_origin))},
                {"horizon", cfg.horizon},
                {"model", spec_to_json(cfg.model)}};
    json days = json::array();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        days.push_back({{"date", format_date(data.dates.at(report.rows[i]))},
                        {"actual", report.actual[i]},
                        {"predicted", report.predicted[i]},
                        {"forecasts", report.contributors[i]}});
    }
    json leads = json::array();
    for (const auto& l : report.per_lead) {
        leads.push_back({{"lead", l.lead}, {"count", l.count}, {"mae", l.mae}, {"r2", optional_number(l.r2)}});
    }
    json raw = json::array();
    for (const auto& f : report.raw) {
        raw.push_back({{"origin", format_date(data.dates.at(f.origin))},
                       {"target", format_date(data.dates.at(f.target))},
                       {"lead", f.lead},
                       {"value", f.value}});
    }
    return json{{"config", config},
                {"metrics", {{"mae", report.mae}, {"r2", optional_number(report.r2)}, {"scored_days", report.rows.size()}}},
                {"per_lead", leads},
                {"days", days},
                {"raw_forecasts", raw}};
}

void GridSpec::validate() const {
    if (learning_rates.empty() || max_depths.empty() || n_estimators.empty() || weight_decays.empty()) {
        throw ConfigError("rolling_eval", "every grid axis needs at least one value");
    }
}

std::size_t GridSpec::size() const {
    return learning_rates.size() * max_depths.size() * n_estimators.size() * weight_decays.size();
}

std::size_t select_best(const std::vector<GridRow>& rows) {
    if (rows.empty()) throw PreconditionError("rolling_eval", "no grid rows to choose from");
    auto key = [](const GridRow& r) {
        const double r2 = r.r2 ? *r.r2 : -std::numeric_limits<double>::infinity();
        // larger is better for R^2; smaller wins every tie-break
        return std::make_tuple(-r2, r.params.n_estimators, r.params.max_depth, r.params.learning_rate,
                               r.params.weight_decay);
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (key(rows[i]) < key(rows[best])) best = i;
    }
    return best;
}

GridResult grid_search(const FeatureMatrix& data, const RollingConfig& cfg, const GridSpec& grid) {
    grid.validate();
    RollingConfig base = cfg;
    base.horizon = 1;
    base.model.kind = ModelKind::gbdt;
    base.validate();
    if (base.first_origin + 1 >= data.rows()) {
        throw InsufficientHistory("rolling_eval", "first origin leaves no day to score");
    }
    const std::size_t n = data.rows();
    const std::size_t n_origins = n - 1 - base.first_origin;

    // A boosted model with I trees is the I-tree prefix of any longer run with
    // the same other parameters, so each (rate, depth, decay) is fitted once
    // with the most trees and every shorter count reads a prefix.
    int max_trees = 0;
    for (int i : grid.n_estimators) {
        if (i < 1) throw ConfigError("rolling_eval", "n_estimators values must be >= 1");
        max_trees = std::max(max_trees, i);
    }
    struct Group {
        double rate;
        int depth;
        double decay;
    };
    std::vector<Group> groups;
    for (double g : grid.learning_rates) {
        for (int d : grid.max_depths) {
            for (double delta : grid.weight_decays) groups.push_back(Group{g, d, delta});
        }
    }
    // forecasts[group][tree count index][origin]
    std::vector<std::vector<std::vector<double>>> forecasts(
        groups.size(), std::vector<std::vector<double>>(grid.n_estimators.size(), std::vector<double>(n_origins)));
    parallel_for(groups.size() * n_origins, cfg.jobs, [&](std::size_t task) {
        const std::size_t gi = task / n_origins;
        const std::size_t k = task % n_origins;
        const std::size_t origin = base.first_origin + k;
        GbdtParams params = base.model.gbdt;
        params.learning_rate = groups[gi].rate;
        params.max_depth = groups[gi].depth;
        params.weight_decay = groups[gi].decay;
        params.n_estimators = max_trees;
        const auto rows = static_cast<Eigen::Index>(origin + 1);
        Ensemble model;
        try {
            model = fit_gbdt(data.values.topRows(rows), std::span<const double>(data.target.data(), origin + 1), params);
        } catch (const Error& e) {
            throw OriginError(origin, fmt::format("origin {}: {}: {}", origin, e.module(), e.what()));
        }
        const std::span<const double> x(data.values.row(rows).data(), data.cols());
        std::vector<double> prefix(static_cast<std::size_t>(max_trees) + 1);
        double acc = model.base_score;
        prefix[0] = acc;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            acc += model.learning_rate * model.trees[t].predict(x);
            prefix[t + 1] = acc;
        }
        for (std::size_t ii = 0; ii < grid.n_estimators.size(); ++ii) {
            forecasts[gi][ii][k] = prefix[static_cast<std::size_t>(grid.n_estimators[ii])];
        }
    });

    GridResult result;
    for (double g : grid.learning_rates) {
        for (int d : grid.max_depths) {
            for (std::size_t ii = 0; ii < grid.n_estimators.size(); ++ii) {
                for (double delta : grid.weight_decays) {
                    std::size_t gi = 0;
                    while (!(groups[gi].rate == g && groups[gi].depth == d && groups[gi].decay == delta)) ++gi;
                    const auto& values = forecasts[gi][ii];
                    const Forecaster lookup = [&](std::size_t origin, int) {
                        return std::vector<double>{values[origin - base.first_origin]};
                    };
                    const RollingReport report = roll(data.target, base.first_origin, 1, lookup);
                    GridRow row;
                    row.params = base.model.gbdt;
                    row.params.learning_rate = g;
                    row.params.max_depth = d;
                    row.params.n_estimators = grid.n_estimators[ii];
                    row.params.weight_decay = delta;
                    row.mae = report.mae;
                    row.r2 = report.r2;
                    result.rows.push_back(row);
                }
            }
        }
    }
    result.best = select_best(result.rows);
    return result;
}

std::vector<AblationRow> ablation(const std::vector<FeatureMatrix>& matrices, const RollingConfig& cfg) {
    std::vector<AblationRow> rows;
    for (const auto& m : matrices) {
        if (m.dates != matrices.front().dates) {
            throw PreconditionError("rolling_eval", "ablation matrices must cover the same dates");
        }
        const RollingReport report = run_rolling(m, cfg);
        rows.push_back(AblationRow{m.feature_set, m.cols(), report.rows.size(), report.mae, report.r2});
    }
    return rows;
}

}  // namespace eventflow

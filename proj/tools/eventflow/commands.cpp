#include "commands.hpp"

#include "eventflow/attribution.hpp"
#include "eventflow/error.hpp"
#include "eventflow/io.hpp"
#include "eventflow/parallel.hpp"
#include "eventflow/pipeline.hpp"
#include "eventflow/time.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <map>

namespace eventflow::cli {

using nlohmann::json;

namespace {

std::vector<Event> load_events(const RunConfig& cfg) {
    return io::events_from_json(io::read_json(cfg.path("events")));
}

std::vector<Post> load_posts(const RunConfig& cfg) {
    return io::parse_posts_jsonl(io::read_file(cfg.path("posts")));
}

void write(const std::filesystem::path& path, const std::string& content) {
    io::write_file_atomic(path, content);
    spdlog::info("wrote {}", path.string());
}

/// Prints the request estimate; remote calls need explicit confirmation.
void confirm_remote(const RunConfig& cfg, const CommandOptions& opts, std::size_t requests) {
    if (cfg.gateway.mode != GatewayMode::remote) return;
    fmt::print(stderr, "remote gateway: about {} requests to {} ({}), more with retries\n", requests,
               cfg.gateway.endpoint_url, cfg.gateway.model_name);
    if (!opts.confirmed) {
        throw ConfigError("pipeline_cli", fmt::format("refusing to send {} remote requests without --yes", requests));
    }
}

FeatureInputs load_inputs(const RunConfig& cfg) {
    FeatureInputs inputs;
    inputs.flows = select_segment(io::parse_flows_csv(io::read_file(cfg.path("flows"))), cfg.segment);
    inputs.weather = io::parse_weather_csv(io::read_file(cfg.path("weather")));
    inputs.calendar = io::parse_holidays_csv(io::read_file(cfg.path("holidays")));
    const auto events = load_events(cfg);
    inputs.events = filter_events(events, cfg.filter);
    spdlog::info("{} of {} events pass the filter rules", inputs.events.size(), events.size());
    const auto labels = io::parse_relevance_csv(io::read_file(cfg.path("relevance")));
    inputs.metrics = catalog_metrics(inputs.events, load_posts(cfg), labels, cfg.selection);
    return inputs;
}

FeatureMatrix load_features(const RunConfig& cfg) {
    auto data = io::parse_features_csv(io::read_file(cfg.features_path(cfg.feature_set)));
    spdlog::info("{} rows x {} columns from {}", data.rows(), data.cols(), to_string(data.feature_set));
    return data;
}

RollingConfig rolling_config(const RunConfig& cfg, std::size_t rows, int horizon) {
    RollingConfig rc;
    rc.first_origin = resolve_first_origin(cfg, rows);
    rc.horizon = horizon;
    rc.model = cfg.model;
    rc.jobs = cfg.jobs;
    rc.validate();
    return rc;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json run_synth(const RunConfig& cfg) {
    const SynthCorpus corpus = generate(cfg.synth);
    std::filesystem::create_directories(cfg.workdir);
    write_corpus(corpus, cfg.workdir);
    return json{{"command", "synth"},
                {"directory", cfg.workdir.string()},
                {"seed", cfg.synth.seed},
                {"days", corpus.flows.size()},
                {"events", corpus.events.size()},
                {"posts", corpus.posts.size()},
                {"first_date", format_date(corpus.flows.front().date)},
                {"last_date", format_date(corpus.flows.back().date)}};
}

json run_structure(const RunConfig& cfg, const CommandOptions& opts) {
    const auto raw = io::parse_raw_events_jsonl(io::read_file(cfg.path("events_raw")));
    validate_raw_catalog(raw);
    confirm_remote(cfg, opts, raw.size() * 3);
    LlmGateway gateway(cfg.gateway, cfg.mock_rules);
    std::vector<Event> events(raw.size());
    parallel_for(raw.size(), cfg.jobs, [&](std::size_t i) {
        events[i] = structure_event(raw[i], gateway, cfg.summary_tokens, cfg.summary_language, cfg.study_area);
    });
    write(cfg.path("events"), io::dump_json(io::events_to_json(events)));
    std::map<std::string, int> by_type;
    for (const auto& e : events) ++by_type[std::string(to_string(e.event_type))];
    return json{{"command", "structure"},
                {"events", events.size()},
                {"by_type", by_type},
                {"requests", gateway.requests_sent()}};
}

json run_relevance(const RunConfig& cfg, const CommandOptions& opts) {
    const auto events = load_events(cfg);
    const auto posts = load_posts(cfg);
    auto labels = io::parse_relevance_csv(io::read_file(cfg.path("candidates")));
    std::map<std::string, const Event*> event_by_id;
    for (const auto& e : events) event_by_id.emplace(e.event_id, &e);
    std::map<std::string, const Post*> post_by_id;
    for (const auto& p : posts) post_by_id.emplace(p.post_id, &p);
    for (const auto& label : labels) {
        if (!event_by_id.contains(label.event_id)) {
            throw SchemaMismatch(fmt::format("candidate pair references unknown event {}", label.event_id));
        }
        if (!post_by_id.contains(label.post_id)) {
            throw SchemaMismatch(fmt::format("candidate pair references unknown post {}", label.post_id));
        }
    }
    confirm_remote(cfg, opts, labels.size());
    LlmGateway gateway(cfg.gateway, cfg.mock_rules);
    std::vector<int> related(labels.size(), 0);
    parallel_for(labels.size(), cfg.jobs, [&](std::size_t i) {
        related[i] = relevance_check(*event_by_id.at(labels[i].event_id), *post_by_id.at(labels[i].post_id), gateway,
                                     cfg.study_area)
                         ? 1
                         : 0;
    });
    std::size_t kept = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i].related = related[i] == 1;
        kept += static_cast<std::size_t>(related[i]);
    }
    write(cfg.path("relevance_out"), io::relevance_csv(labels));
    return json{{"command", "relevance"},
                {"pairs", labels.size()},
                {"related", kept},
                {"requests", gateway.requests_sent()}};
}

json run_popularity(const RunConfig& cfg) {
    const auto events = load_events(cfg);
    const auto labels = io::parse_relevance_csv(io::read_file(cfg.path("relevance")));
    const auto metrics = catalog_metrics(events, load_posts(cfg), labels, cfg.selection);
    write(cfg.path("popularity"), io::popularity_csv(events, metrics));
    double overall = 0.0;
    double promotional = 0.0;
    for (const auto& m : metrics) {
        overall += m.overall;
        promotional += m.promotional;
    }
    return json{{"command", "popularity"},
                {"events", events.size()},
                {"total_overall", overall},
                {"total_promotional", promotional}};
}

json run_features(const RunConfig& cfg, const CommandOptions& opts) {
    const FeatureInputs inputs = load_inputs(cfg);
    std::vector<FeatureSet> sets{cfg.feature_set};
    if (opts.all_feature_sets) sets = {FeatureSet::FS1, FeatureSet::FS2, FeatureSet::FS3, FeatureSet::FS4, FeatureSet::FS5};
    json written = json::array();
    for (FeatureSet fs : sets) {
        const FeatureMatrix fm = assemble_all(inputs, fs, AssembleOptions{cfg.split_exhibition_wom});
        const auto path = cfg.features_path(fs);
        write(path, io::features_csv(fm));
        written.push_back({{"feature_set", to_string(fs)},
                           {"file", path.string()},
                           {"rows", fm.rows()},
                           {"columns", fm.cols()},
                           {"first_date", format_date(fm.dates.front())},
                           {"last_date", format_date(fm.dates.back())}});
    }
    return json{{"command", "features"}, {"events_used", inputs.events.size()}, {"outputs", written}};
}

json run_train(const RunConfig& cfg) {
    const FeatureMatrix data = load_features(cfg);
    const FittedModel model = fit_model(cfg.model, data.values, data.target);
    write(cfg.path("model"), io::dump_json(model_to_json(model, data.columns)));
    json out{{"command", "train"},
             {"model", spec_to_json(cfg.model)},
             {"feature_set", to_string(data.feature_set)},
             {"rows", data.rows()}};
    if (cfg.model.tabular()) {
        const auto fitted = predict_rows(model, data.values);
        try {
            const Scores s = score(data.target, fitted);
            out["train_mae"] = s.mae;
            out["train_r2"] = s.r2;
        } catch (const ZeroVariance& e) {
            out["train_mae"] = e.mae();
            out["train_r2"] = nullptr;
        }
    }
    return out;
}

json run_rolling_command(const RunConfig& cfg) {
    const FeatureMatrix data = load_features(cfg);
    const RollingConfig rc = rolling_config(cfg, data.rows(), cfg.horizon);
    spdlog::info("rolling {} origins from row {} at horizon {}", data.rows() - 1 - rc.first_origin, rc.first_origin,
                 rc.horizon);
    const RollingReport report = run_rolling(data, rc);
    write(cfg.path("rolling_report"), io::dump_json(report_to_json(report, data, rc)));
    return json{{"command", "rolling"},
                {"feature_set", to_string(data.feature_set)},
                {"model", to_string(cfg.model.kind)},
                {"horizon", rc.horizon},
                {"first_origin", rc.first_origin},
                {"scored_days", report.rows.size()},
                {"mae", report.mae},
                {"r2", optional_number(report.r2)}};
}

json run_gridsearch(const RunConfig& cfg) {
    const FeatureMatrix data = load_features(cfg);
    RunConfig gbdt_cfg = cfg;
    gbdt_cfg.model.kind = ModelKind::gbdt;
    const RollingConfig rc = rolling_config(gbdt_cfg, data.rows(), 1);
    spdlog::info("grid search over {} combinations", cfg.grid.size());
    const GridResult result = grid_search(data, rc, cfg.grid);
    write(cfg.path("grid_results"), io::grid_results_csv(result));
    const GridRow& best = result.rows[result.best];
    return json{{"command", "gridsearch"},
                {"combinations", result.rows.size()},
                {"best",
                 {{"learning_rate", best.params.learning_rate},
                  {"max_depth", best.params.max_depth},
                  {"n_estimators", best.params.n_estimators},
                  {"weight_decay", best.params.weight_decay},
                  {"mae", best.mae},
                  {"r2", optional_number(best.r2)}}}};
}

json run_ablation(const RunConfig& cfg) {
    const FeatureInputs inputs = load_inputs(cfg);
    std::vector<FeatureMatrix> matrices;
    for (FeatureSet fs : {FeatureSet::FS1, FeatureSet::FS2, FeatureSet::FS3, FeatureSet::FS4, FeatureSet::FS5}) {
        matrices.push_back(assemble_all(inputs, fs, AssembleOptions{cfg.split_exhibition_wom}));
    }
    const RollingConfig rc = rolling_config(cfg, matrices.front().rows(), cfg.horizon);
    const auto rows = ablation(matrices, rc);
    write(cfg.path("ablation"), io::ablation_csv(rows));
    json table = json::array();
    for (const auto& r : rows) {
        table.push_back({{"feature_set", to_string(r.feature_set)},
                         {"columns", r.columns},
                         {"scored_days", r.scored},
                         {"mae", r.mae},
                         {"r2", optional_number(r.r2)}});
    }
    return json{{"command", "ablation"}, {"model", to_string(cfg.model.kind)}, {"horizon", rc.horizon}, {"rows", table}};
}

json run_explain(const RunConfig& cfg) {
    const LoadedModel loaded = model_from_json(io::read_json(cfg.path("model")));
    const FeatureMatrix data = load_features(cfg);
    if (loaded.columns != data.columns) {
        throw SchemaMismatch(fmt::format("model was trained on {} columns that do not match {}", loaded.columns.size(),
                                         cfg.features_path(cfg.feature_set).string()));
    }
    ShapResult shap;
    if (const auto* ensemble = std::get_if<Ensemble>(&loaded.model)) {
        shap = tree_shap(*ensemble, data.values, data.columns, cfg.jobs);
    } else if (const auto* forest = std::get_if<Forest>(&loaded.model)) {
        shap = tree_shap(*forest, data.values, data.columns, cfg.jobs);
    } else {
        throw PreconditionError("attribution", fmt::format("explain supports gbdt and rf models, not {}",
                                                           to_string(kind_of(loaded.model))));
    }
    const ImportanceReport report = export_summary(shap, data.values, cfg.top_k);
    json importance = importance_to_json(report, shap.base_value);
    if (cfg.permutation_repeats > 0) {
        const FittedModel& model = loaded.model;
        const Predictor predict = [&model](const Matrix& x) { return predict_rows(model, x); };
        const ImportanceReport perm =
            permutation_importance(predict, data.values, data.target, ErrorMetric::mae, cfg.permutation_repeats,
                                   cfg.seed, data.columns);
        json ranking = json::array();
        for (const auto& f : perm.ranking) {
            ranking.push_back({{"feature", f.feature}, {"mae_increase", f.value}, {"spread", f.spread}});
        }
        importance["permutation"] = {{"repeats", cfg.permutation_repeats}, {"ranking", ranking}};
    }
    write(cfg.path("shap_values"), io::shap_values_csv(shap, data.dates));
    write(cfg.path("importance"), io::dump_json(importance));
    write(cfg.path("summary_points"), io::summary_points_csv(report, data.dates));
    json top = json::array();
    for (const auto& f : report.ranking) top.push_back({{"feature", f.feature}, {"mean_abs_shap", f.value}});
    return json{{"command", "explain"}, {"base_value", shap.base_value}, {"samples", data.rows()}, {"top", top}};
}

}  // namespace eventflow::cli

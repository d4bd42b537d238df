#include "commands.hpp"
#include "run_config.hpp"

#include "eventflow/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <functional>
#include <optional>

namespace {

using namespace eventflow;
using namespace eventflow::cli;
using nlohmann::json;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> workdir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::string format = "text";
    int verbosity = 0;
    bool yes = false;
    std::optional<std::string> gateway_mode;

    std::optional<std::string> feature_set;
    std::optional<std::string> segment;
    bool split_exhibition_wom = false;
    std::optional<std::string> model;
    std::optional<double> learning_rate;
    std::optional<int> max_depth;
    std::optional<int> n_estimators;
    std::optional<double> weight_decay;
    std::optional<int> horizon;
    std::optional<std::size_t> first_origin;
    std::optional<int> n_days;
    std::optional<std::size_t> top_k;
    std::optional<int> permutation_repeats;
};

void print_text(const json& doc, const std::string& prefix = {}) {
    for (const auto& [key, value] : doc.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            print_text(value, name);
        } else if (value.is_array() && !value.empty() && value.front().is_object()) {
            for (std::size_t i = 0; i < value.size(); ++i) print_text(value[i], fmt::format("{}[{}]", name, i));
        } else if (value.is_string()) {
            fmt::print("{}: {}\n", name, value.get<std::string>());
        } else {
            fmt::print("{}: {}\n", name, value.dump());
        }
    }
}

/// Defaults, then the config file, then flags.
RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (f.config) apply_config_file(cfg, *f.config);
    if (f.workdir) cfg.workdir = *f.workdir;
    if (f.seed) cfg.seed = *f.seed;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (f.gateway_mode) cfg.gateway.mode = *f.gateway_mode == "remote" ? GatewayMode::remote : GatewayMode::mock;
    if (f.feature_set && *f.feature_set != "all") {
        const auto fs = parse_feature_set(*f.feature_set);
        if (!fs) throw ConfigError("pipeline_cli", fmt::format("--set '{}': expected FS1..FS5 or all", *f.feature_set));
        cfg.feature_set = *fs;
    }
    if (f.segment) cfg.segment = *f.segment;
    if (f.split_exhibition_wom) cfg.split_exhibition_wom = true;
    if (f.model) {
        const auto kind = parse_model_kind(*f.model);
        if (!kind) throw ConfigError("pipeline_cli", fmt::format("--model '{}': expected gbdt, rf, linear or arima", *f.model));
        cfg.model.kind = *kind;
    }
    if (f.learning_rate) cfg.model.gbdt.learning_rate = *f.learning_rate;
    if (f.max_depth) cfg.model.gbdt.max_depth = *f.max_depth;
    if (f.n_estimators) cfg.model.gbdt.n_estimators = *f.n_estimators;
    if (f.weight_decay) cfg.model.gbdt.weight_decay = *f.weight_decay;
    if (f.horizon) cfg.horizon = *f.horizon;
    if (f.first_origin) cfg.first_origin = *f.first_origin;
    if (f.n_days) cfg.synth.n_days = *f.n_days;
    if (f.top_k) cfg.top_k = *f.top_k;
    if (f.permutation_repeats) cfg.permutation_repeats = *f.permutation_repeats;
    cfg.finalize();
    return cfg;
}

void setup_logging(int verbosity) {
    auto logger = spdlog::stderr_logger_st("eventflow");
    logger->set_pattern("[%l] %v");
    logger->set_level(verbosity >= 2 ? spdlog::level::debug : verbosity == 1 ? spdlog::level::info : spdlog::level::warn);
    spdlog::set_default_logger(logger);
}

void add_model_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--set", f.feature_set, "Feature set FS1..FS5");
    cmd->add_option("--model", f.model, "Learner: gbdt, rf, linear or arima");
    cmd->add_option("--learning-rate", f.learning_rate, "GBDT shrinkage");
    cmd->add_option("--max-depth", f.max_depth, "GBDT tree depth");
    cmd->add_option("--n-estimators", f.n_estimators, "GBDT boosting rounds");
    cmd->add_option("--weight-decay", f.weight_decay, "Linear recency decay of sample weights");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-aware visitor flow forecasting pipeline", "eventflow"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "Sectioned key = value config file");
    app.add_option("--workdir", f.workdir, "Directory holding every input and output file");
    app.add_option("--seed", f.seed, "Seed for the generator and the learners");
    app.add_option("--jobs", f.jobs, "Worker threads");
    app.add_option("--format", f.format, "Summary format on stdout")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("-v,--verbose", f.verbosity, "Log progress (-v) or debug detail (-vv) to stderr");
    app.add_flag("--yes", f.yes, "Allow remote gateway requests");
    app.add_option("--gateway", f.gateway_mode, "Gateway mode")->check(CLI::IsMember({"mock", "remote"}));

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth->add_option("--days", f.n_days, "Number of days");
    auto* structure = app.add_subcommand("structure", "Turn raw event listings into structured events");
    auto* relevance = app.add_subcommand("relevance", "Label candidate (event, post) pairs");
    auto* popularity = app.add_subcommand("popularity", "Compute per-session popularity");
    auto* features = app.add_subcommand("features", "Assemble feature matrices");
    features->add_option("--set", f.feature_set, "Feature set FS1..FS5, or all");
    features->add_option("--segment", f.segment, "Flow segment; empty sums all segments");
    features->add_flag("--split-exhibition-wom", f.split_exhibition_wom, "Early/late exhibition WOM columns in FS5");
    auto* ablation = app.add_subcommand("ablation", "Rolling evaluation of FS1..FS5");
    ablation->add_option("--segment", f.segment, "Flow segment; empty sums all segments");
    ablation->add_flag("--split-exhibition-wom", f.split_exhibition_wom, "Early/late exhibition WOM columns in FS5");
    auto* train = app.add_subcommand("train", "Fit a model on every feature row");
    auto* rolling = app.add_subcommand("rolling", "Rolling-origin evaluation");
    auto* grid = app.add_subcommand("gridsearch", "GBDT grid search at horizon 1");
    auto* explain = app.add_subcommand("explain", "Tree SHAP attribution of a trained model");
    for (auto* cmd : {train, rolling, grid, explain, ablation}) add_model_flags(cmd, f);
    for (auto* cmd : {rolling, ablation}) cmd->add_option("--horizon", f.horizon, "Forecast horizon in days (1..7)");
    for (auto* cmd : {rolling, grid, ablation}) cmd->add_option("--first-origin", f.first_origin, "Row of the first origin");
    explain->add_option("--top-k", f.top_k, "Features kept in the ranking");
    explain->add_option("--permutation-repeats", f.permutation_repeats, "Permutation importance repeats (0 skips)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    setup_logging(f.verbosity);

    try {
        const RunConfig cfg = resolve(f);
        CommandOptions opts;
        opts.confirmed = f.yes;
        opts.all_feature_sets = f.feature_set && *f.feature_set == "all";
        json summary;
        if (*synth) summary = run_synth(cfg);
        else if (*structure) summary = run_structure(cfg, opts);
        else if (*relevance) summary = run_relevance(cfg, opts);
        else if (*popularity) summary = run_popularity(cfg);
        else if (*features) summary = run_features(cfg, opts);
        else if (*train) summary = run_train(cfg);
        else if (*rolling) summary = run_rolling_command(cfg);
        else if (*grid) summary = run_gridsearch(cfg);
        else if (*ablation) summary = run_ablation(cfg);
        else if (*explain) summary = run_explain(cfg);
        if (f.format == "json") fmt::print("{}\n", summary.dump(2));
        else print_text(summary);
        return 0;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "error: {}: {}\n", e.module(), e.what());
        return 2;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}: {}\n", e.module(), e.what());
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(stderr, "error: io: {}\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        fmt::print(stderr, "error: io: malformed JSON input: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}

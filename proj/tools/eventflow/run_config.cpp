#include "run_config.hpp"

#include "eventflow/error.hpp"
#include "eventflow/text.hpp"
#include "eventflow/time.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <functional>
#include <set>

namespace eventflow::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::string>& default_paths() {
    static const std::map<std::string, std::string> paths{
        {"events_raw", "events_raw.jsonl"},
        {"events", "events.json"},
        {"posts", "posts.jsonl"},
        {"candidates", "relevance.csv"},
        {"relevance", "relevance.csv"},
        {"relevance_out", "relevance_checked.csv"},
        {"popularity", "popularity.csv"},
        {"flows", "flows.csv"},
        {"weather", "weather.csv"},
        {"holidays", "holidays.csv"},
        {"features_fs1", "features_FS1.csv"},
        {"features_fs2", "features_FS2.csv"},
        {"features_fs3", "features_FS3.csv"},
        {"features_fs4", "features_FS4.csv"},
        {"features_fs5", "features_FS5.csv"},
        {"model", "model.json"},
        {"rolling_report", "rolling_report.json"},
        {"grid_results", "grid_results.csv"},
        {"ablation", "ablation.csv"},
        {"shap_values", "shap_values.csv"},
        {"importance", "importance.json"},
        {"summary_points", "summary_points.csv"},
    };
    return paths;
}

std::string unquote(std::string value) {
    value = text::trim(value);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
    }
    return value;
}

std::vector<std::string> split_list(const std::string& value) {
    std::string body = text::trim(value);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= body.size()) {
        const std::size_t comma = body.find(',', start);
        const std::string item = unquote(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view expected) {
    throw ConfigError("pipeline_cli", fmt::format("{} = '{}': expected {}", key, value, expected));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const std::string s = text::trim(value);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, value, "a number");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = text::fold(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, value, "true or false");
}

EventType parse_type(const std::string& key, const std::string& value) {
    const auto t = parse_event_type(value);
    if (!t) bad_value(key, value, "an event type");
    return *t;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    for (const auto& item : split_list(value)) out.push_back(parse_number<T>(key, item));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"run.workdir", [](RunConfig& c, auto&, auto& v) { c.workdir = v; }},
        {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"run.jobs", [](RunConfig& c, auto& k, auto& v) { c.jobs = parse_number<int>(k, v); }},

        {"gateway.mode",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "mock") c.gateway.mode = GatewayMode::mock;
             else if (v == "remote") c.gateway.mode = GatewayMode::remote;
             else bad_value(k, v, "mock or remote");
         }},
        {"gateway.endpoint_url", [](RunConfig& c, auto&, auto& v) { c.gateway.endpoint_url = v; }},
        {"gateway.model_name", [](RunConfig& c, auto&, auto& v) { c.gateway.model_name = v; }},
        {"gateway.temperature", [](RunConfig& c, auto& k, auto& v) { c.gateway.temperature = parse_number<double>(k, v); }},
        {"gateway.max_in_flight", [](RunConfig& c, auto& k, auto& v) { c.gateway.max_in_flight = parse_number<int>(k, v); }},
        {"gateway.max_attempts",
         [](RunConfig& c, auto& k, auto& v) { c.gateway.retry.max_attempts = parse_number<int>(k, v); }},
        {"gateway.base_backoff_ms",
         [](RunConfig& c, auto& k, auto& v) {
             c.gateway.retry.base_backoff = std::chrono::milliseconds(parse_number<long long>(k, v));
         }},
        {"gateway.timeout_s",
         [](RunConfig& c, auto& k, auto& v) { c.gateway.timeout = std::chrono::seconds(parse_number<long long>(k, v)); }},
        {"gateway.api_key_env", [](RunConfig& c, auto&, auto& v) { c.gateway.api_key_env = v; }},
        {"gateway.relevance_threshold",
         [](RunConfig& c, auto& k, auto& v) { c.mock_rules.relevance_threshold = parse_number<double>(k, v); }},
        {"gateway.summary_tokens",
         [](RunConfig& c, auto& k, auto& v) { c.summary_tokens = parse_number<std::size_t>(k, v); }},
        {"gateway.summary_language", [](RunConfig& c, auto&, auto& v) { c.summary_language = v; }},
        {"gateway.study_area", [](RunConfig& c, auto&, auto& v) { c.study_area = v; }},

        {"selection.top_g", [](RunConfig& c, auto& k, auto& v) { c.selection.top_g = parse_number<int>(k, v); }},
        {"selection.temporal_threshold_months",
         [](RunConfig& c, auto& k, auto& v) { c.selection.temporal_threshold_months = parse_number<int>(k, v); }},
        {"selection.observation_cutoff",
         [](RunConfig& c, auto& k, auto& v) {
             const auto t = try_parse_datetime(v);
             if (!t) bad_value(k, v, "a datetime");
             c.selection.observation_cutoff = *t;
         }},

        {"filter.allowed_types",
         [](RunConfig& c, auto& k, auto& v) {
             c.filter.allowed_types.clear();
             for (const auto& item : split_list(v)) c.filter.allowed_types.insert(parse_type(k, item));
         }},
        {"filter.max_sessions", [](RunConfig& c, auto& k, auto& v) { c.filter.max_sessions = parse_number<int>(k, v); }},
        {"filter.venue_whitelist", [](RunConfig& c, auto&, auto& v) { c.filter.venue_whitelist = split_list(v); }},

        {"features.set",
         [](RunConfig& c, auto& k, auto& v) {
             const auto fs = parse_feature_set(v);
             if (!fs) bad_value(k, v, "FS1..FS5");
             c.feature_set = *fs;
         }},
        {"features.split_exhibition_wom",
         [](RunConfig& c, auto& k, auto& v) { c.split_exhibition_wom = parse_bool(k, v); }},
        {"features.segment", [](RunConfig& c, auto&, auto& v) { c.segment = v; }},

        {"model.kind",
         [](RunConfig& c, auto& k, auto& v) {
             const auto kind = parse_model_kind(v);
             if (!kind) bad_value(k, v, "gbdt, rf, linear or arima");
             c.model.kind = *kind;
         }},
        {"model.learning_rate",
         [](RunConfig& c, auto& k, auto& v) { c.model.gbdt.learning_rate = parse_number<double>(k, v); }},
        {"model.max_depth", [](RunConfig& c, auto& k, auto& v) { c.model.gbdt.max_depth = parse_number<int>(k, v); }},
        {"model.n_estimators",
         [](RunConfig& c, auto& k, auto& v) { c.model.gbdt.n_estimators = parse_number<int>(k, v); }},
        {"model.weight_decay",
         [](RunConfig& c, auto& k, auto& v) { c.model.gbdt.weight_decay = parse_number<double>(k, v); }},
        {"model.min_samples_leaf",
         [](RunConfig& c, auto& k, auto& v) {
             c.model.gbdt.min_samples_leaf = parse_number<int>(k, v);
             c.model.rf.min_samples_leaf = c.model.gbdt.min_samples_leaf;
         }},
        {"model.rf_trees", [](RunConfig& c, auto& k, auto& v) { c.model.rf.n_trees = parse_number<int>(k, v); }},
        {"model.rf_max_depth", [](RunConfig& c, auto& k, auto& v) { c.model.rf.max_depth = parse_number<int>(k, v); }},
        {"model.rf_max_features",
         [](RunConfig& c, auto& k, auto& v) { c.model.rf.max_features = parse_number<int>(k, v); }},
        {"model.baseline_decay",
         [](RunConfig& c, auto& k, auto& v) { c.model.baseline_decay = parse_number<double>(k, v); }},
        {"model.arima_p", [](RunConfig& c, auto& k, auto& v) { c.model.arima.p = parse_number<int>(k, v); }},
        {"model.arima_d", [](RunConfig& c, auto& k, auto& v) { c.model.arima.d = parse_number<int>(k, v); }},
        {"model.arima_q", [](RunConfig& c, auto& k, auto& v) { c.model.arima.q = parse_number<int>(k, v); }},

        {"rolling.first_origin",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "auto") c.first_origin.reset();
             else c.first_origin = parse_number<std::size_t>(k, v);
         }},
        {"rolling.horizon", [](RunConfig& c, auto& k, auto& v) { c.horizon = parse_number<int>(k, v); }},

        {"grid.learning_rates",
         [](RunConfig& c, auto& k, auto& v) { c.grid.learning_rates = parse_number_list<double>(k, v); }},
        {"grid.max_depths", [](RunConfig& c, auto& k, auto& v) { c.grid.max_depths = parse_number_list<int>(k, v); }},
        {"grid.n_estimators", [](RunConfig& c, auto& k, auto& v) { c.grid.n_estimators = parse_number_list<int>(k, v); }},
        {"grid.weight_decays",
         [](RunConfig& c, auto& k, auto& v) { c.grid.weight_decays = parse_number_list<double>(k, v); }},

        {"synth.n_days", [](RunConfig& c, auto& k, auto& v) { c.synth.n_days = parse_number<int>(k, v); }},
        {"synth.start_date",
         [](RunConfig& c, auto& k, auto& v) {
             const auto d = try_parse_date(v);
             if (!d) bad_value(k, v, "a date (YYYY-MM-DD)");
             c.synth.start_date = *d;
         }},
        {"synth.weekly_base",
         [](RunConfig& c, auto& k, auto& v) {
             const auto values = parse_number_list<double>(k, v);
             if (values.size() != 7) bad_value(k, v, "7 numbers, Monday first");
             std::copy(values.begin(), values.end(), c.synth.weekly_base.begin());
         }},
        {"synth.trend_per_day", [](RunConfig& c, auto& k, auto& v) { c.synth.trend_per_day = parse_number<double>(k, v); }},
        {"synth.holiday_lift", [](RunConfig& c, auto& k, auto& v) { c.synth.holiday_lift = parse_number<double>(k, v); }},
        {"synth.day_before_lift",
         [](RunConfig& c, auto& k, auto& v) { c.synth.day_before_lift = parse_number<double>(k, v); }},
        {"synth.school_lift", [](RunConfig& c, auto& k, auto& v) { c.synth.school_lift = parse_number<double>(k, v); }},
        {"synth.rain_coef", [](RunConfig& c, auto& k, auto& v) { c.synth.rain_coef = parse_number<double>(k, v); }},
        {"synth.typhoon_drop", [](RunConfig& c, auto& k, auto& v) { c.synth.typhoon_drop = parse_number<double>(k, v); }},
        {"synth.long_events_per_week",
         [](RunConfig& c, auto& k, auto& v) { c.synth.long_events_per_week = parse_number<double>(k, v); }},
        {"synth.engagement_mu", [](RunConfig& c, auto& k, auto& v) { c.synth.engagement_mu = parse_number<double>(k, v); }},
        {"synth.engagement_sigma",
         [](RunConfig& c, auto& k, auto& v) { c.synth.engagement_sigma = parse_number<double>(k, v); }},
        {"synth.noise_sigma", [](RunConfig& c, auto& k, auto& v) { c.synth.noise_sigma = parse_number<double>(k, v); }},
        {"synth.conversion_lag",
         [](RunConfig& c, auto& k, auto& v) { c.synth.conversion_lag = parse_number<int>(k, v); }},

        {"explain.top_k", [](RunConfig& c, auto& k, auto& v) { c.top_k = parse_number<std::size_t>(k, v); }},
        {"explain.permutation_repeats",
         [](RunConfig& c, auto& k, auto& v) { c.permutation_repeats = parse_number<int>(k, v); }},
    };
    return table;
}

/// synth.rate_<type>, synth.beta_<type>, synth.beta_wom_<type>
bool apply_synth_map(RunConfig& c, const std::string& key, const std::string& value) {
    static const std::vector<std::pair<std::string, std::map<EventType, double> SynthConfig::*>> prefixes{
        {"synth.beta_wom_", &SynthConfig::beta_wom},
        {"synth.beta_", &SynthConfig::beta},
        {"synth.rate_", &SynthConfig::events_per_week},
    };
    for (const auto& [prefix, member] : prefixes) {
        if (key.rfind(prefix, 0) != 0) continue;
        const EventType type = parse_type(key, key.substr(prefix.size()));
        (c.synth.*member)[type] = parse_number<double>(key, value);
        return true;
    }
    return false;
}

}  // namespace

RunConfig::RunConfig() : paths(default_paths()) {}

std::filesystem::path RunConfig::path(const std::string& key) const {
    const auto it = paths.find(key);
    if (it == paths.end()) throw ConfigError("pipeline_cli", fmt::format("no path configured for '{}'", key));
    const std::filesystem::path p(it->second);
    return p.is_absolute() ? p : workdir / p;
}

std::filesystem::path RunConfig::features_path(FeatureSet fs) const {
    return path(fmt::format("features_fs{}", static_cast<int>(fs)));
}

void RunConfig::finalize() {
    if (jobs < 1) throw ConfigError("pipeline_cli", "jobs must be >= 1");
    model.gbdt.random_seed = seed;
    model.rf.random_seed = seed;
    synth.seed = seed;
    gateway.validate();
    mock_rules.validate();
    selection.validate();
    filter.validate();
    model.validate();
    grid.validate();
    if (horizon < 1 || horizon > kMaxHorizon) {
        throw ConfigError("rolling_eval", fmt::format("horizon must be in 1..{}, got {}", kMaxHorizon, horizon));
    }
    if (first_origin && *first_origin < 1) throw ConfigError("rolling_eval", "first_origin must be >= 1");
    if (permutation_repeats < 0) throw ConfigError("attribution", "permutation_repeats must be >= 0");
    synth.validate();
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& file) {
    pt::ptree tree;
    try {
        pt::read_ini(file.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw IoError("pipeline_cli", fmt::format("cannot read config {}: {}", file.string(), e.message()));
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("pipeline_cli", fmt::format("{}: key '{}' is outside any section", file.string(), section));
        }
        for (const auto& [name, leaf] : body) {
            const std::string key = section + "." + name;
            const std::string value = unquote(leaf.data());
            if (section == "paths") {
                cfg.paths[name] = value;
                if (!default_paths().contains(name)) {
                    throw ConfigError("pipeline_cli", fmt::format("unknown path key '{}'", name));
                }
                continue;
            }
            if (apply_synth_map(cfg, key, value)) continue;
            const auto it = setters().find(key);
            if (it == setters().end()) throw ConfigError("pipeline_cli", fmt::format("unknown config key '{}'", key));
            it->second(cfg, key, value);
        }
    }
}

std::size_t resolve_first_origin(const RunConfig& cfg, std::size_t rows) {
    if (rows < 3) throw InsufficientHistory("rolling_eval", fmt::format("{} feature rows; rolling needs at least 3", rows));
    const std::size_t origin = cfg.first_origin ? *cfg.first_origin : std::max<std::size_t>(1, rows * 7 / 10);
    if (origin + 1 >= rows) {
        throw ConfigError("rolling_eval",
                          fmt::format("first_origin {} leaves nothing to score in {} rows", origin, rows));
    }
    return origin;
}

}  // namespace eventflow::cli

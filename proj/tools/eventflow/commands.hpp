#pragma once

#include "run_config.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace eventflow::cli {

struct CommandOptions {
    /// Set by `features --set all`.
    bool all_feature_sets = false;
    /// Remote gateway calls proceed only with --yes.
    bool confirmed = false;
};

/// Each command writes its files and returns a summary for stdout.
nlohmann::json run_synth(const RunConfig& cfg);
nlohmann::json run_structure(const RunConfig& cfg, const CommandOptions& opts);
nlohmann::json run_relevance(const RunConfig& cfg, const CommandOptions& opts);
nlohmann::json run_popularity(const RunConfig& cfg);
nlohmann::json run_features(const RunConfig& cfg, const CommandOptions& opts);
nlohmann::json run_train(const RunConfig& cfg);
nlohmann::json run_rolling_command(const RunConfig& cfg);
nlohmann::json run_gridsearch(const RunConfig& cfg);
nlohmann::json run_ablation(const RunConfig& cfg);
nlohmann::json run_explain(const RunConfig& cfg);

}  // namespace eventflow::cli

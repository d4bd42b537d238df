#pragma once

#include "eventflow/event_catalog.hpp"
#include "eventflow/features.hpp"
#include "eventflow/llm_gateway.hpp"
#include "eventflow/model.hpp"
#include "eventflow/popularity.hpp"
#include "eventflow/rolling.hpp"
#include "eventflow/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace eventflow::cli {

/// Everything a command needs. Values come from built-in defaults, then the
/// --config file, then command-line flags.
struct RunConfig {
    std::filesystem::path workdir = ".";
    /// File name per contract key; relative names resolve against workdir.
    std::map<std::string, std::string> paths;
    std::uint64_t seed = 7;
    int jobs = 1;

    GatewayConfig gateway;
    MockRuleSet mock_rules = default_mock_rules();
    std::size_t summary_tokens = 120;
    std::string summary_language = "Chinese";
    std::string study_area = "Hong Kong";

    SelectionConfig selection;
    FilterRules filter;

    FeatureSet feature_set = FeatureSet::FS5;
    bool split_exhibition_wom = false;
    std::string segment;  ///< empty sums all segments

    ModelSpec model;
    /// Row index of the first origin; unset means 70% of the rows.
    std::optional<std::size_t> first_origin;
    int horizon = 1;
    GridSpec grid;

    SynthConfig synth;

    std::size_t top_k = 10;
    int permutation_repeats = 0;  ///< 0 skips permutation importance

    RunConfig();

    std::filesystem::path path(const std::string& key) const;
    /// features_FS{k}.csv unless overridden by paths.features_fs{k}.
    std::filesystem::path features_path(FeatureSet fs) const;
    /// Seeds the learners and checks every section. Throws ConfigError.
    void finalize();
};

/// Reads a sectioned key = value file (TOML-style; values may be quoted,
/// lists are comma separated). Unknown sections or keys are errors.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& file);

std::size_t resolve_first_origin(const RunConfig& cfg, std::size_t rows);

}  // namespace eventflow::cli

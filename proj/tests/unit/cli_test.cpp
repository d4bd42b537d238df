#include "eventflow/io.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               fmt::format("eventflow_cli_{}", ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliRun run(const std::string& args, const fs::path& workdir) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = fmt::format("'{}' --workdir '{}' {} > '{}' 2> '{}'", EVENTFLOW_CLI_PATH,
                                            workdir.string(), args, out.string(), err.string());
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = eventflow::io::read_file(out);
        r.err = eventflow::io::read_file(err);
        return r;
    }

    json run_json(const std::string& args, const fs::path& workdir) const {
        const CliRun r = run("--format json " + args, workdir);
        EXPECT_EQ(r.code, 0) << args << "\n" << r.err;
        return r.code == 0 ? json::parse(r.out) : json{};
    }

    fs::path dir_;
};

TEST_F(Cli, FullPipeline) {
    const auto w = dir_ / "work";
    const json synth = run_json("synth --days 120", w);
    EXPECT_EQ(synth.at("days"), 120);
    EXPECT_EQ(run_json("structure", w).at("events"), synth.at("events"));
    const json rel = run_json("relevance", w);
    EXPECT_GT(rel.at("pairs").get<int>(), 0);
    EXPECT_TRUE(fs::exists(w / "relevance_checked.csv"));
    EXPECT_EQ(run_json("popularity", w).at("events"), synth.at("events"));
    const json feats = run_json("features --set all", w);
    EXPECT_EQ(feats.at("outputs").size(), 5u);
    EXPECT_TRUE(fs::exists(w / "features_FS5.csv"));
    EXPECT_EQ(run_json("train --n-estimators 50", w).at("feature_set"), "FS5");
    const json roll = run_json("rolling --n-estimators 50 --horizon 3", w);
    EXPECT_EQ(roll.at("horizon"), 3);
    EXPECT_GT(roll.at("scored_days").get<int>(), 0);
    const json explain = run_json("explain --top-k 5", w);
    EXPECT_EQ(explain.at("top").size(), 5u);
    for (const char* f : {"model.json", "rolling_report.json", "shap_values.csv", "importance.json",
                          "summary_points.csv"}) {
        EXPECT_TRUE(fs::exists(w / f)) << f;
    }
}

TEST_F(Cli, BadHorizonIsConfigError) {
    const auto w = dir_ / "work";
    run_json("synth --days 60", w);
    run_json("features", w);
    const CliRun r = run("rolling --horizon 8", w);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, UnknownFlagAndModelExitTwo) {
    EXPECT_EQ(run("synth --no-such-flag", dir_).code, 2);
    EXPECT_EQ(run("train --model xgb", dir_).code, 2);
    EXPECT_EQ(run("train --set FS9", dir_).code, 2);
}

TEST_F(Cli, MissingInputFails) {
    const CliRun r = run("popularity", dir_ / "empty");
    EXPECT_NE(r.code, 0);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, RemoteGatewayNeedsConfirmation) {
    const auto w = dir_ / "work";
    run_json("synth --days 60", w);
    const CliRun r = run("--gateway remote structure", w);
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, GridSearchCoversTheFullGrid) {
    const auto w = dir_ / "work";
    run_json("synth --days 40", w);
    run_json("features", w);
    const json grid = run_json("gridsearch", w);
    EXPECT_EQ(grid.at("combinations"), 252);
    const auto csv = eventflow::io::read_file(w / "grid_results.csv");
    std::istringstream lines(csv);
    std::string line;
    std::size_t rows = 0;
    std::size_t best = 0;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        ++rows;
        if (line.ends_with(",1")) ++best;
    }
    EXPECT_EQ(rows, 252u);
    EXPECT_EQ(best, 1u);
}

TEST_F(Cli, ConfigFileIsApplied) {
    const auto w = dir_ / "work";
    const auto cfg = dir_ / "run.toml";
    eventflow::io::write_file_atomic(cfg, "[synth]\nn_days = 50\n");
    const json synth = run_json(fmt::format("--config '{}' synth", cfg.string()), w);
    EXPECT_EQ(synth.at("days"), 50);
    eventflow::io::write_file_atomic(cfg, "[synth]\nbogus = 1\n");
    EXPECT_EQ(run(fmt::format("--config '{}' synth", cfg.string()), w).code, 2);
}

TEST_F(Cli, RunsAreReproducible) {
    for (const char* name : {"a", "b"}) {
        const auto w = dir_ / name;
        run_json("synth --days 80", w);
        run_json("features", w);
        run_json("rolling --n-estimators 30 --first-origin 40 --jobs 2", w);
    }
    EXPECT_EQ(eventflow::io::read_file(dir_ / "a" / "rolling_report.json"),
              eventflow::io::read_file(dir_ / "b" / "rolling_report.json"));
    EXPECT_EQ(eventflow::io::read_file(dir_ / "a" / "features_FS5.csv"),
              eventflow::io::read_file(dir_ / "b" / "features_FS5.csv"));
}

}  // namespace

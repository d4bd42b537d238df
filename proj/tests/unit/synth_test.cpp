#include "eventflow/error.hpp"
#include "eventflow/event_catalog.hpp"
#include "eventflow/pipeline.hpp"
#include "eventflow/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>

namespace eventflow {
namespace {

namespace fs = std::filesystem;

SynthConfig small_config(std::uint64_t seed = 7) {
    SynthConfig cfg;
    cfg.n_days = 150;
    cfg.seed = seed;
    return cfg;
}

TEST(SynthConfig, RejectsInvalidValues) {
    auto cfg = small_config();
    cfg.n_days = kWmaWindow + 2;
    EXPECT_THROW(cfg.validate(), ConfigInvalid);
    cfg = small_config();
    cfg.noise_sigma = -1.0;
    EXPECT_THROW(cfg.validate(), ConfigInvalid);
    cfg = small_config();
    cfg.beta[EventType::concert] = std::nan("");
    EXPECT_THROW(cfg.validate(), ConfigInvalid);
    cfg = small_config();
    cfg.events_per_week[EventType::fair] = -0.1;
    EXPECT_THROW(cfg.validate(), ConfigInvalid);
    cfg = small_config();
    cfg.start_date = make_date(2030, 1, 1);
    EXPECT_THROW(generate(cfg), ConfigInvalid);
}

TEST(Synth, DecompositionIsExact) {
    const auto corpus = generate(small_config());
    ASSERT_EQ(corpus.truth.days.size(), 150u);
    ASSERT_EQ(corpus.flows.size(), 150u);
    for (std::size_t i = 0; i < corpus.truth.days.size(); ++i) {
        const auto& d = corpus.truth.days[i];
        std::int64_t events = 0;
        for (const auto& [type, v] : d.events) events += v;
        EXPECT_EQ(d.flow, d.base + d.holiday + d.school + d.weather + events + d.noise);
        EXPECT_EQ(corpus.flows[i].arrivals, static_cast<double>(d.flow));
        EXPECT_EQ(corpus.flows[i].date, d.date);
        for (const auto& [type, v] : d.wom) EXPECT_LE(std::llabs(v), std::llabs(d.events.at(type)) + 1);
    }
}

TEST(Synth, SameSeedSameCorpusDifferentSeedDiffers) {
    const auto a = generate(small_config(3));
    const auto b = generate(small_config(3));
    const auto c = generate(small_config(4));
    EXPECT_EQ(a.posts, b.posts);
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(io::flows_csv(a.flows), io::flows_csv(b.flows));
    EXPECT_NE(io::flows_csv(a.flows), io::flows_csv(c.flows));
}

TEST(Synth, WrittenFilesAreByteIdentical) {
    const auto root = fs::temp_directory_path() / "eventflow_synth_test";
    fs::remove_all(root);
    write_corpus(generate(small_config()), root / "a");
    write_corpus(generate(small_config()), root / "b");
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        EXPECT_EQ(io::read_file(entry.path()), io::read_file(root / "b" / entry.path().filename()))
            << entry.path().filename();
    }
    EXPECT_EQ(files, 8u);
    fs::remove_all(root);
}

TEST(Synth, PlantedPopularityIsRecovered) {
    const auto corpus = generate(small_config());
    const auto metrics = catalog_metrics(corpus.events, corpus.posts, corpus.relevance, SelectionConfig{});
    std::map<std::string, const PopularityMetrics*> by_id;
    for (const auto& m : metrics) by_id[m.event_id] = &m;
    ASSERT_FALSE(corpus.truth.events.empty());
    for (const auto& planted : corpus.truth.events) {
        const auto& m = *by_id.at(planted.event_id);
        EXPECT_EQ(m.promotional, planted.promotional) << planted.event_id;
        EXPECT_EQ(m.overall, planted.overall) << planted.event_id;
        EXPECT_EQ(m.wom_raw, planted.wom_raw) << planted.event_id;
        EXPECT_EQ(m.wom_per_session, planted.womp) << planted.event_id;
    }
}

TEST(Synth, CatalogInvariants) {
    const auto corpus = generate(small_config());
    std::set<std::string> ids;
    for (const auto& e : corpus.events) {
        EXPECT_NO_THROW(validate_event(e));
        EXPECT_TRUE(ids.insert(e.event_id).second);
    }
    ASSERT_EQ(corpus.raw_events.size(), corpus.events.size());
    for (std::size_t i = 1; i < corpus.posts.size(); ++i) {
        EXPECT_LE(corpus.posts[i - 1].created_at, corpus.posts[i].created_at);
        EXPECT_LT(corpus.posts[i - 1].post_id, corpus.posts[i].post_id);
    }
    for (std::size_t i = 1; i < corpus.relevance.size(); ++i) {
        const auto& a = corpus.relevance[i - 1];
        const auto& b = corpus.relevance[i];
        EXPECT_LT(std::tie(a.event_id, a.post_id), std::tie(b.event_id, b.post_id));
    }
    for (const auto& w : corpus.weather) {
        EXPECT_GE(w.rainfall_mm, 0.0);
        if (w.typhoon) EXPECT_GE(w.rainfall_mm, 80.0);
    }
    EXPECT_LE(corpus.calendar.coverage_start, corpus.flows.front().date);
    EXPECT_GE(corpus.calendar.coverage_end, corpus.flows.back().date);
}

TEST(Synth, MockStructuringReproducesCatalog) {
    const auto corpus = generate(small_config());
    LlmGateway gw{GatewayConfig{}};
    for (std::size_t i = 0; i < corpus.raw_events.size(); i += 5) {
        const auto e = structure_event(corpus.raw_events[i], gw);
        EXPECT_EQ(e.sessions, corpus.events[i].sessions) << e.event_id;
        EXPECT_EQ(e.event_type, corpus.events[i].event_type) << e.event_id;
    }
}

TEST(Synth, EffectsOnlyForFilteredTypes) {
    const auto corpus = generate(small_config());
    std::map<std::string, const Event*> events;
    for (const auto& e : corpus.events) events[e.event_id] = &e;
    const FilterRules rules;
    for (const auto& p : corpus.truth.events) {
        const Event& e = *events.at(p.event_id);
        EXPECT_TRUE(rules.allowed_types.contains(e.event_type));
        EXPECT_LE(static_cast<int>(e.sessions.size()), rules.max_sessions);
    }
    const auto doc = ground_truth_json(corpus.truth);
    EXPECT_EQ(doc.at("days").size(), 150u);
}

TEST(Synth, CorpusInputsAssemble) {
    const auto corpus = generate(small_config());
    const auto inputs = corpus_inputs(corpus);
    EXPECT_EQ(inputs.events.size(), inputs.metrics.size());
    const auto fm = assemble_all(inputs, FeatureSet::FS5);
    EXPECT_EQ(fm.rows(), 150u - (kWmaWindow + 1));
}

}  // namespace
}  // namespace eventflow

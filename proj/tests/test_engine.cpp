#include <gtest/gtest.h>

#include "support.hpp"

using namespace daca;
using fx::make_config;
using fx::only_type;

namespace {

/// Counts and series only; metadata and hashes carry the config document.
void expect_same_outcomes(const MetricsReport& a, const MetricsReport& b) {
    EXPECT_EQ(a.n_requests, b.n_requests);
    EXPECT_EQ(a.n_blocked, b.n_blocked);
    EXPECT_EQ(a.n_dropped, b.n_dropped);
    EXPECT_EQ(a.n_provisioned, b.n_provisioned);
    EXPECT_EQ(a.n_compressed, b.n_compressed);
    EXPECT_EQ(a.n_delayed, b.n_delayed);
    EXPECT_EQ(a.n_pending, b.n_pending);
    EXPECT_TRUE(a.per_type == b.per_type);
    EXPECT_EQ(a.hourly_utilization, b.hourly_utilization);
    EXPECT_EQ(a.stream_hash, b.stream_hash);
}

SimConfig network_config(const std::string& strategy, const std::string& band, std::size_t demands) {
    return make_config(fx::bt_uk(), {{"strategy", strategy},
                                          {"band_plan", band},
                                          {"demands_per_seed", demands},
                                          {"engine", {{"check_invariants", true}}}});
}

} // namespace

TEST(Engine, SingleRequestIsProvisionedAndDeparts) {
    auto doc = only_type("1");
    doc["demands_per_seed"] = 1;
    doc["strategy"] = "NDNC";
    auto cfg = make_config(fx::line2(), doc);
    Simulator sim(cfg, 1, true);
    auto rep = sim.run();
    EXPECT_EQ(rep.n_requests, 1);
    EXPECT_EQ(rep.n_provisioned, 1);
    EXPECT_EQ(rep.n_blocked, 0);
    EXPECT_TRUE(sim.grid().empty());
    ASSERT_EQ(sim.records().size(), 2u);
    const auto& prov = sim.records()[0];
    const auto& dep = sim.records()[1];
    EXPECT_EQ(prov.kind, OutcomeRecord::Kind::Provisioned);
    EXPECT_EQ(dep.kind, OutcomeRecord::Kind::Departed);
    EXPECT_EQ(dep.at, prov.at + prov.holding); // departure exactly tau after provisioning
    EXPECT_EQ(prov.holding, 5 * kTicksPerMinute);
}

TEST(Engine, SingleSlotNetworkBlocksSecondRequest) {
    auto doc = only_type("1", {{"holding_min", 600}});
    doc["demands_per_seed"] = 2;
    doc["strategy"] = "NDNC";
    doc["spectrum"] = {{"slots_per_band", 1}};
    doc["traffic"]["load_scale"] = 1.0;
    auto rep = run(make_config(fx::line2(), doc), 1);
    EXPECT_EQ(rep.n_requests, 2);
    EXPECT_EQ(rep.n_provisioned, 1);
    EXPECT_EQ(rep.n_blocked, 1);
    EXPECT_EQ(blocking_probability(rep).total, 0.5);
}

TEST(Engine, DelayedRequestTakesReleasedCapacity) {
    // type 3a holds 8-12 minutes with a 2-4 minute budget; on a single slot
    // with DA some delayed requests must succeed after a departure
    auto doc = only_type("3a", {{"lambda_peak", 0.02}, {"lambda_offpeak", 0.02}});
    doc["demands_per_seed"] = 400;
    doc["strategy"] = "DA";
    doc["spectrum"] = {{"slots_per_band", 1}};
    doc["traffic"]["load_scale"] = 1.0;
    Simulator sim(make_config(fx::line2(), doc), 3, true);
    auto rep = sim.run();
    EXPECT_GT(rep.n_delayed, 0);
    int late = 0;
    for (const auto& r : sim.records())
        if (r.kind == OutcomeRecord::Kind::Provisioned && r.at > r.arrived_at) {
            ++late;
            EXPECT_LE(r.at - r.arrived_at, r.delta_budget);
        }
    EXPECT_GT(late, 0);
    EXPECT_EQ(rep.n_provisioned + rep.n_blocked + rep.n_pending, rep.n_requests);
}

TEST(Engine, DeterministicForSameSeed) {
    auto cfg = network_config("DACA", "C", 3000);
    auto a = run(cfg, 7);
    auto b = run(cfg, 7);
    EXPECT_TRUE(a == b);
    auto c = run(cfg, 8);
    EXPECT_NE(a.stream_hash, c.stream_hash);
}

TEST(Engine, StreamIndependentOfStrategyAndBand) {
    auto base = network_config("NDNC", "C", 2000);
    auto ndnc = run(base, 4);
    auto daca = run(base.with_cell(StrategyKind::DACA, "C+L"), 4);
    EXPECT_EQ(ndnc.stream_hash, daca.stream_hash);
    EXPECT_EQ(ndnc.n_requests, daca.n_requests);
}

TEST(Engine, ConservationHoldsAndGridEndsEmpty) {
    for (auto s : kAllStrategies)
        for (std::string band : {"C", "C+L"}) {
            auto cfg = network_config(std::string(to_string(s)), band, 3000);
            Simulator sim(cfg, 2);
            auto rep = sim.run();
            EXPECT_GT(sim.invariant_checks(), 100u);
            EXPECT_TRUE(sim.grid().empty()) << to_string(s) << " " << band;
            EXPECT_EQ(sim.grid().count_occupied(), 0u);
            EXPECT_EQ(rep.n_provisioned + rep.n_blocked + rep.n_pending, rep.n_requests);
            EXPECT_EQ(rep.n_pending, 0);
        }
}

TEST(Engine, EventRetryMatchesPerTickRetry) {
    for (auto s : {StrategyKind::DA, StrategyKind::DACA})
        for (std::string band : {"C", "C+L"}) {
            auto cfg = network_config(std::string(to_string(s)), band, 2500);
            auto per_tick = cfg;
            per_tick.retry_mode = RetryMode::PerTick;
            Simulator a(cfg, 5, true), b(per_tick, 5, true);
            expect_same_outcomes(a.run(), b.run());
            ASSERT_EQ(a.records().size(), b.records().size());
            for (std::size_t i = 0; i < a.records().size(); ++i) {
                EXPECT_EQ(a.records()[i].at, b.records()[i].at);
                EXPECT_EQ(a.records()[i].request_id, b.records()[i].request_id);
                EXPECT_EQ(a.records()[i].kind, b.records()[i].kind);
            }
        }
}

TEST(Engine, HorizonLeavesPendingSeparate) {
    // deferrals released exactly at the horizon stay pending
    auto doc = only_type("3b", {{"lambda_peak", 0.05}, {"lambda_offpeak", 0.0}});
    doc["demands_per_seed"] = 200;
    doc["strategy"] = "DACA";
    doc["spectrum"] = {{"slots_per_band", 2}};
    doc["traffic"]["load_scale"] = 1.0;
    doc["horizon_days"] = 1;
    doc["schedule"] = {{"m_hours", 4}};
    auto rep = run(make_config(fx::line2(), doc), 1);
    EXPECT_GT(rep.n_pending, 0);
    EXPECT_EQ(rep.type(TrafficType::T3b).pending, rep.n_pending);
    EXPECT_EQ(rep.n_provisioned + rep.n_blocked + rep.n_pending, rep.n_requests);
}

TEST(Batch, AggregatesInSeedOrder) {
    auto cfg = network_config("CA", "C", 1500);
    cfg.seeds = {3, 1, 2};
    auto batch = run_batch(cfg);
    ASSERT_EQ(batch.runs.size(), 3u);
    EXPECT_EQ(batch.runs[0].seed, 1u);
    EXPECT_EQ(batch.runs[2].seed, 3u);
    double sum = 0.0;
    for (const auto& r : batch.runs) sum += *blocking_probability(r).total;
    EXPECT_NEAR(*row_value(batch.aggregate.mean, "bp_total"), sum / 3.0, 1e-15);
    EXPECT_EQ(batch.aggregate.mean.seed, "mean");
    EXPECT_TRUE(run_batch(cfg, false).runs == batch.runs);
}

TEST(Batch, FailingSeedIsNamed) {
    auto cfg = network_config("CA", "C", 10);
    cfg.demands_per_seed = 0; // fails validation inside the run
    cfg.seeds = {9};
    try {
        run_batch(cfg);
        FAIL() << "expected SeedError";
    } catch (const SeedError& e) {
        EXPECT_EQ(e.seed(), 9u);
    }
}

TEST(Utilization, SamplesDescribeTheGrid) {
    auto cfg = network_config("DACA", "C", 2000);
    Simulator sim(cfg, 1);
    auto rep = sim.run();
    ASSERT_FALSE(rep.hourly_utilization.empty());
    for (const auto& day : rep.hourly_utilization)
        for (double u : day) {
            EXPECT_GE(u, 0.0);
            EXPECT_LE(u, 1.0);
        }
    EXPECT_EQ(sim.samples().back().value, 0.0);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace daca;

TEST(Config, BundledConfigsLoad) {
    for (const char* name : {"configs/c_only.json", "configs/c_l.json", "configs/sweep.json"}) {
        auto cfg = load_config(fx::source_path(name));
        EXPECT_EQ(cfg.topology->node_count(), 22u) << name;
        EXPECT_EQ(cfg.seeds.size(), 3u);
    }
    EXPECT_EQ(load_config(fx::source_path("configs/c_l.json")).plan.name(), "C+L");
}

TEST(Config, DefaultsMatchLibraryDefaults) {
    auto cfg = fx::make_config(fx::line2());
    EXPECT_EQ(cfg.routing.k, 3u);
    EXPECT_EQ(cfg.routing.max_slots_per_lightpath, 4u);
    EXPECT_EQ(cfg.plan.slots_per_band, 133u);
    EXPECT_EQ(cfg.schedule.p_e_prime, 22 * kTicksPerHour);
    EXPECT_EQ(cfg.schedule.t_p, 10);
    EXPECT_EQ(cfg.schedule.t_o, 100);
    EXPECT_EQ(cfg.traffic.size(), 5u);
    EXPECT_EQ(cfg.qot.table().rows().size(), 4u);
}

TEST(Config, OverridesApplyBeforeValidation) {
    auto path = fx::source_path("configs/c_only.json");
    auto cfg = load_config(path, {"routing.k=5", "strategy=CA", "traffic.types.2a.phi=0.25", "seeds=[4,5]"});
    EXPECT_EQ(cfg.routing.k, 5u);
    EXPECT_EQ(cfg.strategy, StrategyKind::CA);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{4, 5}));
    for (const auto& t : cfg.traffic)
        if (t.type == TrafficType::T2a) {
            EXPECT_EQ(t.phi, 0.25);
        }
    EXPECT_EQ(cfg.document["routing"]["k"], 5);
    EXPECT_NE(cfg.hash(), load_config(path).hash());
    EXPECT_THROW(load_config(path, {"routing.k=0"}), ConfigError);
    EXPECT_THROW(load_config(path, {"noequals"}), ConfigError);
    EXPECT_THROW(load_config(path, {"strategy=XYZ"}), ConfigError);
}

TEST(Config, OverrideRecordedInReportMetadata) {
    auto cfg = load_config(fx::source_path("configs/c_only.json"), {"routing.k=5", "demands_per_seed=50"});
    auto rep = run(cfg, 1);
    EXPECT_EQ(rep.metadata["config"]["routing"]["k"], 5);
    EXPECT_EQ(rep.metadata["seed"], 1);
}

TEST(Config, MissingTopologyNamesPath) {
    try {
        load_config(fx::source_path("configs/c_only.json"), {"topology=/missing/dir/net.json"});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/missing/dir/net.json"), std::string::npos);
    }
}

TEST(Config, RejectsUnknownTrafficTypeAndBadSchedule) {
    auto topo = fx::line2();
    EXPECT_THROW(fx::make_config(topo, {{"traffic", {{"types", {{"9z", {{"lambda_peak", 1}}}}}}}}),
                 ConfigError);
    EXPECT_THROW(fx::make_config(topo, {{"schedule", {{"p_s_hour", 21}}}}), ConfigError);
    EXPECT_THROW(fx::make_config(topo, {{"band_plan", "S"}}), ConfigError);
    EXPECT_THROW(fx::make_config(topo, {{"engine", {{"retry_mode", "sometimes"}}}}), ConfigError);
}

TEST(Config, ExternalQotTableLoads) {
    auto dir = std::filesystem::temp_directory_path() / "daca_qot_table";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "topo.json") << topology_to_json(fx::line2()).dump();
        std::ofstream(dir / "links.json") << R"([{"a":"A","b":"B","band":"C","gsnr_db":17.0}])";
        std::ofstream(dir / "cfg.json") << R"({"topology":"topo.json",
            "qot":{"kind":"external-table","link_table":"links.json","load_penalty_db":0}})";
    }
    auto cfg = load_config(dir / "cfg.json");
    SpectrumGrid g(1, cfg.plan);
    const LinkIndex path[] = {0};
    EXPECT_DOUBLE_EQ(cfg.qot.estimate_gsnr(*cfg.topology, path, {Band::C, 0, 1}, g), 17.0);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, EightCellsSixRelativeValues) {
    auto cfg = load_config(fx::source_path("configs/sweep.json"), {"demands_per_seed=800", "seeds=[1,2]", "traffic.load_scale=1"});
    auto sweep = run_sweep(cfg);
    ASSERT_EQ(sweep.cells.size(), 8u);
    int relative = 0;
    for (const auto& c : sweep.cells) {
        EXPECT_EQ(c.batch.runs.size(), 2u);
        if (c.strategy != StrategyKind::NDNC && sweep.relative(c.strategy, c.band_plan)) ++relative;
    }
    EXPECT_EQ(relative, 6);
    const auto* ndnc = sweep.find(StrategyKind::NDNC, "C");
    const auto* daca = sweep.find(StrategyKind::DACA, "C");
    EXPECT_EQ(ndnc->batch.runs[0].n_requests, daca->batch.runs[0].n_requests);
    EXPECT_EQ(relative_bp(ndnc->mean("bp_total"), ndnc->mean("bp_total")), 0.0);
    auto csv = render_relative_bp_csv(sweep);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 8 * 2 + 6);
}

// dacasim: command-line front end for the multi-band provisioning simulator.
//
//   dacasim validate --config cfg.json
//   dacasim run      --config cfg.json --out results/ [--set routing.k=5] [--seeds 1,2,3]
//   dacasim sweep    --config cfg.json --out results/

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "daca/daca.hpp"

namespace {

struct Invocation {
    std::string config;
    std::string out = "results";
    std::vector<std::string> overrides;
    std::string seeds;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Invocation& inv, bool with_out) {
    cmd->add_option("--config", inv.config, "configuration file (JSON)")->required();
    if (with_out) cmd->add_option("--out", inv.out, "output directory")->capture_default_str();
    cmd->add_option("--set", inv.overrides, "override a config key, KEY=VALUE (repeatable)");
    cmd->add_option("--seeds", inv.seeds, "comma-separated seed list, replaces config seeds");
    cmd->add_flag("--quiet", inv.quiet, "suppress the summary table");
}

daca::SimConfig load(const Invocation& inv) {
    auto overrides = inv.overrides;
    if (!inv.seeds.empty()) overrides.push_back("seeds=[" + inv.seeds + "]");
    return daca::load_config(inv.config, overrides);
}

std::string pct(const std::optional<double>& v) {
    if (!v) return "    -   ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%7.3f%%", 100.0 * *v);
    return buf;
}

void print_summary(const std::string& label, const daca::Aggregate& agg) {
    std::printf("%-14s BP %s +- %s |", label.c_str(), pct(daca::row_value(agg.mean, "bp_total")).c_str(),
                pct(daca::row_value(agg.std, "bp_total")).c_str());
    for (auto t : daca::kAllTrafficTypes) {
        std::string col = "bp_type_" + std::string(daca::to_string(t));
        std::printf(" %s:%s", std::string(daca::to_string(t)).c_str(), pct(daca::row_value(agg.mean, col)).c_str());
    }
    std::printf("\n");
}

void write_event_logs(const daca::SimConfig& cfg, const std::filesystem::path& dir) {
    for (auto seed : cfg.seeds) {
        daca::Simulator sim(cfg, seed, true);
        sim.run();
        std::ostringstream os;
        daca::write_event_log(os, *cfg.topology, sim.records());
        daca::write_file_atomic(dir / ("events_" + std::string(daca::to_string(cfg.strategy)) + "_" +
                                       cfg.plan.name() + "_seed" + std::to_string(seed) + ".csv"),
                                os.str());
    }
}

int cmd_validate(const Invocation& inv) {
    auto cfg = load(inv);
    if (!inv.quiet) {
        std::printf("config ok: %s\n", inv.config.c_str());
        std::printf("  topology   %s (%zu nodes, %zu links, mean link %.1f km)\n", cfg.topology_path.c_str(),
                    cfg.topology->node_count(), cfg.topology->link_count(), cfg.topology->mean_link_length());
        std::printf("  strategy   %s, band plan %s, %zu seeds x %zu demands\n",
                    std::string(daca::to_string(cfg.strategy)).c_str(), cfg.plan.name().c_str(), cfg.seeds.size(),
                    cfg.demands_per_seed);
        std::printf("  hash       %s\n", cfg.hash().c_str());
    }
    return 0;
}

int cmd_run(const Invocation& inv) {
    auto cfg = load(inv);
    auto batch = daca::run_batch(cfg);
    std::filesystem::path dir(inv.out);
    daca::export_reports(batch.runs, dir, daca::ExportFormat::Csv);
    daca::export_reports(batch.runs, dir, daca::ExportFormat::Json);
    if (cfg.event_log) write_event_logs(cfg, dir);
    if (!inv.quiet) {
        for (const auto& r : batch.runs) print_summary("seed " + std::to_string(r.seed), {daca::to_row(r), {}});
        print_summary(std::string(daca::to_string(cfg.strategy)) + " " + cfg.plan.name(), batch.aggregate);
        std::printf("wrote %s\n", dir.string().c_str());
    }
    return 0;
}

int cmd_sweep(const Invocation& inv) {
    auto cfg = load(inv);
    auto sweep = daca::run_sweep(cfg);
    std::filesystem::path dir(inv.out);
    const auto runs = sweep.all_runs();
    daca::export_reports(runs, dir, daca::ExportFormat::Csv);
    daca::export_reports(runs, dir, daca::ExportFormat::Json);
    daca::write_file_atomic(dir / "relative_bp.csv", daca::render_relative_bp_csv(sweep));
    daca::write_file_atomic(dir / "relative_bp_per_type.csv", daca::render_relative_bp_per_type_csv(sweep));
    if (cfg.event_log)
        for (const auto& c : sweep.cells) write_event_logs(cfg.with_cell(c.strategy, c.band_plan), dir);
    if (!inv.quiet) {
        for (const auto& c : sweep.cells) {
            std::string label = std::string(daca::to_string(c.strategy)) + " " + c.band_plan;
            print_summary(label, c.batch.aggregate);
        }
        for (const auto& c : sweep.cells)
            if (c.strategy != daca::StrategyKind::NDNC)
                std::printf("relative BP %-4s %-3s vs NDNC: %s\n", std::string(daca::to_string(c.strategy)).c_str(),
                            c.band_plan.c_str(), pct(sweep.relative(c.strategy, c.band_plan)).c_str());
        std::printf("wrote %s\n", dir.string().c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay- and compression-aware provisioning simulator for C / C+L elastic optical networks"};
    app.require_subcommand(1);
    Invocation inv;
    auto* validate = app.add_subcommand("validate", "check a configuration and its topology");
    auto* run = app.add_subcommand("run", "simulate one strategy on one band plan over all seeds");
    auto* sweep = app.add_subcommand("sweep", "simulate every strategy x band plan on matched seeds");
    add_common(validate, inv, false);
    add_common(run, inv, true);
    add_common(sweep, inv, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(inv);
        if (run->parsed()) return cmd_run(inv);
        if (sweep->parsed()) return cmd_sweep(inv);
    } catch (const daca::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "daca/config.hpp"
#include "daca/engine.hpp"
#include "daca/metrics.hpp"

namespace daca {

struct SweepCell {
    StrategyKind strategy = StrategyKind::NDNC;
    std::string band_plan;
    BatchReport batch;

    std::optional<double> mean(const std::string& column) const { return row_value(batch.aggregate.mean, column); }
};

/// Strategy x band-plan cross product on matched seeds.
struct SweepResult {
    std::vector<SweepCell> cells;

    const SweepCell* find(StrategyKind s, const std::string& band) const {
        for (const auto& c : cells)
            if (c.strategy == s && c.band_plan == band) return &c;
        return nullptr;
    }

    /// Relative mean BP of `s` against NDNC in the same band plan.
    std::optional<double> relative(StrategyKind s, const std::string& band, const std::string& column = "bp_total") const {
        const auto* cell = find(s, band);
        const auto* base = find(StrategyKind::NDNC, band);
        if (!cell || !base) return std::nullopt;
        return relative_bp(cell->mean(column), base->mean(column));
    }

    std::vector<MetricsReport> all_runs() const {
        std::vector<MetricsReport> out;
        for (const auto& c : cells) out.insert(out.end(), c.batch.runs.begin(), c.batch.runs.end());
        return out;
    }
};

inline SweepResult run_sweep(const SimConfig& config, bool parallel = true) {
    SweepResult result;
    for (const auto& band : config.sweep_band_plans)
        for (auto s : config.sweep_strategies) {
            SimConfig cell = config.with_cell(s, band);
            result.cells.push_back({s, cell.plan.name(), run_batch(cell, parallel)});
        }
    return result;
}

namespace detail {
inline std::string opt_cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
} // namespace detail

/// Long format: band_plan,strategy,metric,value with metrics bp_mean, bp_std
/// and relative_bp (absent for the NDNC reference).
inline std::string render_relative_bp_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "band_plan,strategy,metric,value\n";
    for (const auto& c : sweep.cells) {
        const std::string prefix = c.band_plan + "," + std::string(to_string(c.strategy)) + ",";
        out << prefix << "bp_mean," << detail::opt_cell(c.mean("bp_total")) << '\n';
        out << prefix << "bp_std," << detail::opt_cell(row_value(c.batch.aggregate.std, "bp_total")) << '\n';
        if (c.strategy != StrategyKind::NDNC)
            out << prefix << "relative_bp," << detail::opt_cell(sweep.relative(c.strategy, c.band_plan)) << '\n';
    }
    return out.str();
}

/// Long format per traffic type: band_plan,strategy,type,metric,value.
inline std::string render_relative_bp_per_type_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "band_plan,strategy,type,metric,value\n";
    for (const auto& c : sweep.cells)
        for (auto t : kAllTrafficTypes) {
            const std::string col = "bp_type_" + std::string(to_string(t));
            const std::string prefix =
                c.band_plan + "," + std::string(to_string(c.strategy)) + "," + std::string(to_string(t)) + ",";
            out << prefix << "bp_mean," << detail::opt_cell(c.mean(col)) << '\n';
            if (c.strategy != StrategyKind::NDNC)
                out << prefix << "relative_bp," << detail::opt_cell(sweep.relative(c.strategy, c.band_plan, col))
                    << '\n';
        }
    return out.str();
}

} // namespace daca

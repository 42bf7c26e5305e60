#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "daca/common.hpp"
#include "daca/spectrum.hpp"
#include "daca/topology.hpp"

namespace daca {

/// One GSNR window: the lower edge is inclusive.
struct ModulationRow {
    double min_gsnr_db = 0.0;
    std::string modulation;
    double slot_rate_gbps = 0.0;
};

class ModulationTable {
public:
    ModulationTable() : ModulationTable(defaults()) {}

    explicit ModulationTable(std::vector<ModulationRow> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw ConfigError("modulation table is empty");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!(rows_[i].slot_rate_gbps > 0.0))
                throw ConfigError("modulation table rates must be positive");
            if (i > 0 && !(rows_[i].min_gsnr_db > rows_[i - 1].min_gsnr_db &&
                           rows_[i].slot_rate_gbps > rows_[i - 1].slot_rate_gbps))
                throw ConfigError("modulation table rows must strictly increase in GSNR and rate");
        }
    }

    /// 100/200/300/400 Gbps per 37.5 GHz slot at 9/13/16/19.5 dB.
    static std::vector<ModulationRow> defaults() {
        return {{9.0, "DP-QPSK", 100.0},
                {13.0, "DP-16QAM", 200.0},
                {16.0, "DP-64QAM", 300.0},
                {19.5, "PCS-256QAM", 400.0}};
    }

    const std::vector<ModulationRow>& rows() const { return rows_; }

private:
    std::vector<ModulationRow> rows_;
};

struct GsnrReport {
    double gsnr_db = 0.0;
    double slot_rate_gbps = 0.0; // 0 means no window admits this GSNR
    std::string modulation;
};

inline GsnrReport slot_capacity(const ModulationTable& table, double gsnr_db) {
    GsnrReport r{gsnr_db, 0.0, "none"};
    for (const auto& row : table.rows()) {
        if (gsnr_db >= row.min_gsnr_db) {
            r.slot_rate_gbps = row.slot_rate_gbps;
            r.modulation = row.modulation;
        }
    }
    return r;
}

enum class QotKind { AnalyticDefault, ExternalTable };

struct QotEstimatorSpec {
    QotKind kind = QotKind::AnalyticDefault;
    double ref_gsnr_db = 25.0;
    double span_km = 80.0;
    double load_penalty_db = 2.0;
    double lband_offset_db = -1.0;

    void validate() const {
        if (!(span_km > 0.0)) throw ConfigError("qot.span_km must be positive");
        if (!(load_penalty_db >= 0.0)) throw ConfigError("qot.load_penalty_db must be nonnegative");
    }
};

/// GSNR estimator. The analytic default accumulates ASE per span and a linear
/// penalty on co-band occupancy; the external-table variant combines per-link,
/// per-band GSNR values in linear noise terms instead of counting spans.
class QotModel {
public:
    QotModel() = default;
    explicit QotModel(QotEstimatorSpec spec, ModulationTable table = {})
        : spec_(spec), table_(std::move(table)) {
        spec_.validate();
    }

    const QotEstimatorSpec& spec() const { return spec_; }
    const ModulationTable& table() const { return table_; }

    void set_link_gsnr(LinkIndex link, Band band, double gsnr_db) { link_gsnr_[{link, band}] = gsnr_db; }

    /// GSNR of `candidate` on the path made of `links`. `own_slots` discounts a
    /// lightpath's own occupancy when re-estimating an already-allocated range.
    double estimate_gsnr(const Topology& topo, std::span<const LinkIndex> links, const SlotRange& candidate,
                         const SpectrumGrid& grid, std::size_t own_slots = 0) const {
        double rho = 0.0;
        if (!links.empty()) {
            const double slots = static_cast<double>(grid.plan().slots_per_band);
            for (LinkIndex l : links)
                rho += static_cast<double>(grid.used_in_band(l, candidate.band) - own_slots) / slots;
            rho /= static_cast<double>(links.size());
        }

        if (spec_.kind == QotKind::ExternalTable) {
            double inv = 0.0;
            for (LinkIndex l : links) {
                auto it = link_gsnr_.find({l, candidate.band});
                if (it == link_gsnr_.end())
                    throw ConfigError("external QoT table has no entry for link " + std::to_string(l) + " band " +
                                      std::string(to_string(candidate.band)));
                inv += std::pow(10.0, -it->second / 10.0);
            }
            return -10.0 * std::log10(inv) - spec_.load_penalty_db * rho;
        }

        double spans = 0.0;
        for (LinkIndex l : links) spans += std::ceil(topo.link(l).length_km / spec_.span_km);
        double gsnr = spec_.ref_gsnr_db - 10.0 * std::log10(spans) - spec_.load_penalty_db * rho;
        if (candidate.band == Band::L) gsnr += spec_.lband_offset_db;
        return gsnr;
    }

    GsnrReport evaluate(const Topology& topo, std::span<const LinkIndex> links, const SlotRange& candidate,
                        const SpectrumGrid& grid, std::size_t own_slots = 0) const {
        return slot_capacity(table_, estimate_gsnr(topo, links, candidate, grid, own_slots));
    }

private:
    QotEstimatorSpec spec_;
    ModulationTable table_;
    std::map<std::pair<LinkIndex, Band>, double> link_gsnr_;
};

struct Reestimation {
    LightpathId id = 0;
    double gsnr_db = 0.0;
    std::string modulation;
    bool retained = true;
};

/// Re-estimates every active lightpath against the current grid. All
/// estimates are taken before any drop is applied.
inline std::vector<Reestimation> reestimate_all(const QotModel& qot, const Topology& topo, const SpectrumGrid& grid,
                                                std::span<const Lightpath* const> active) {
    std::vector<Reestimation> out;
    out.reserve(active.size());
    for (const Lightpath* lp : active) {
        auto rep = qot.evaluate(topo, lp->links, lp->slots, grid, lp->slots.len);
        const double achievable = rep.slot_rate_gbps * static_cast<double>(lp->slots.len);
        out.push_back({lp->id, rep.gsnr_db, rep.modulation, achievable >= lp->min_rate_gbps});
    }
    return out;
}

} // namespace daca

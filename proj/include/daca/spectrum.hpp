#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "daca/common.hpp"
#include "daca/topology.hpp"

namespace daca {

enum class Band : std::uint8_t { C = 0, L = 1 };

inline constexpr std::string_view to_string(Band b) { return b == Band::C ? "C" : "L"; }

struct BandPlan {
    std::vector<Band> bands{Band::C};
    std::size_t slots_per_band = 133;
    double slot_width_ghz = 37.5;

    static BandPlan c_only(std::size_t slots = 133) { return {{Band::C}, slots, 37.5}; }
    static BandPlan c_plus_l(std::size_t slots = 133) { return {{Band::C, Band::L}, slots, 37.5}; }

    std::size_t band_count() const { return bands.size(); }
    std::size_t total_slots() const { return bands.size() * slots_per_band; }
    std::string name() const { return bands.size() == 2 ? "C+L" : "C"; }
};

inline BandPlan parse_band_plan(std::string_view s, std::size_t slots = 133) {
    if (s == "C") return BandPlan::c_only(slots);
    if (s == "C+L" || s == "CL") return BandPlan::c_plus_l(slots);
    throw ConfigError("unknown band plan '" + std::string(s) + "' (expected C or C+L)");
}

struct SlotRange {
    Band band = Band::C;
    std::size_t start = 0;
    std::size_t len = 0;

    friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

using LightpathId = std::int64_t;
inline constexpr LightpathId kFreeSlot = -1;

/// Raised when the engine asks the grid for something that cannot happen in a
/// consistent simulation (double allocation, releasing an unknown owner).
class SpectrumError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Slot ownership per (link, band, slot). A single grid is shared by both
/// directions of a link.
class SpectrumGrid {
public:
    SpectrumGrid() = default;
    SpectrumGrid(std::size_t links, BandPlan plan)
        : links_(links), plan_(std::move(plan)),
          owner_(links * plan_.total_slots(), kFreeSlot),
          band_used_(links * plan_.band_count(), 0) {}

    std::size_t link_count() const { return links_; }
    const BandPlan& plan() const { return plan_; }

    std::size_t band_pos(Band b) const {
        for (std::size_t i = 0; i < plan_.bands.size(); ++i)
            if (plan_.bands[i] == b) return i;
        throw SpectrumError("band " + std::string(to_string(b)) + " is not in the band plan");
    }

    LightpathId owner(LinkIndex link, Band b, std::size_t slot) const {
        return owner_[offset(link, band_pos(b), slot)];
    }
    bool is_free(LinkIndex link, Band b, std::size_t slot) const {
        return owner(link, b, slot) == kFreeSlot;
    }

    /// Occupied slots on one link within one band.
    std::size_t used_in_band(LinkIndex link, Band b) const {
        return band_used_[link * plan_.band_count() + band_pos(b)];
    }

    std::size_t occupied_slot_links() const { return occupied_; }

    /// Recounts occupancy from the owner table, independent of the cached counters.
    std::size_t count_occupied() const {
        std::size_t n = 0;
        for (auto o : owner_) n += o != kFreeSlot;
        return n;
    }

    bool empty() const { return occupied_ == 0; }

    void allocate(LightpathId id, std::span<const LinkIndex> links, const SlotRange& range) {
        if (id < 0) throw SpectrumError("lightpath ids must be nonnegative");
        if (owned_.count(id)) throw SpectrumError("lightpath " + std::to_string(id) + " already allocated");
        check_range(range);
        const std::size_t bp = band_pos(range.band);
        for (LinkIndex l : links)
            for (std::size_t s = range.start; s < range.start + range.len; ++s)
                if (owner_[offset(l, bp, s)] != kFreeSlot)
                    throw SpectrumError("slot collision on link " + std::to_string(l) + " slot " +
                                        std::to_string(s) + " (owner " +
                                        std::to_string(owner_[offset(l, bp, s)]) + ")");
        for (LinkIndex l : links) {
            for (std::size_t s = range.start; s < range.start + range.len; ++s)
                owner_[offset(l, bp, s)] = id;
            band_used_[l * plan_.band_count() + bp] += range.len;
        }
        occupied_ += links.size() * range.len;
        owned_.emplace(id, Allocation{{links.begin(), links.end()}, range});
    }

    void release(LightpathId id) {
        auto it = owned_.find(id);
        if (it == owned_.end()) throw SpectrumError("release of unknown lightpath " + std::to_string(id));
        const auto& [links, range] = it->second;
        const std::size_t bp = band_pos(range.band);
        for (LinkIndex l : links) {
            for (std::size_t s = range.start; s < range.start + range.len; ++s)
                owner_[offset(l, bp, s)] = kFreeSlot;
            band_used_[l * plan_.band_count() + bp] -= range.len;
        }
        occupied_ -= links.size() * range.len;
        owned_.erase(it);
    }

    bool owns(LightpathId id) const { return owned_.count(id) != 0; }

    friend bool operator==(const SpectrumGrid& x, const SpectrumGrid& y) {
        return x.links_ == y.links_ && x.plan_.bands == y.plan_.bands &&
               x.plan_.slots_per_band == y.plan_.slots_per_band && x.owner_ == y.owner_;
    }

    /// Debug dump, one occupied slot per row: link_id,band,slot,owner.
    void write_csv(std::ostream& out) const {
        out << "link_id,band,slot,owner\n";
        for (LinkIndex l = 0; l < links_; ++l)
            for (std::size_t bp = 0; bp < plan_.band_count(); ++bp)
                for (std::size_t s = 0; s < plan_.slots_per_band; ++s)
                    if (auto o = owner_[offset(l, bp, s)]; o != kFreeSlot)
                        out << l << ',' << to_string(plan_.bands[bp]) << ',' << s << ',' << o << '\n';
    }

private:
    struct Allocation {
        std::vector<LinkIndex> links;
        SlotRange range;
    };

    std::size_t offset(LinkIndex l, std::size_t bp, std::size_t s) const {
        return (l * plan_.band_count() + bp) * plan_.slots_per_band + s;
    }

    void check_range(const SlotRange& r) const {
        if (r.len == 0 || r.start + r.len > plan_.slots_per_band)
            throw SpectrumError("slot range out of bounds");
        (void)band_pos(r.band);
    }

    std::size_t links_ = 0;
    BandPlan plan_;
    std::vector<LightpathId> owner_;
    std::vector<std::size_t> band_used_;
    std::size_t occupied_ = 0;
    std::unordered_map<LightpathId, Allocation> owned_;
};

/// An admitted request: one path, one slot range used on every link.
struct Lightpath {
    LightpathId id = 0;
    std::int64_t request_id = 0;
    TrafficType type = TrafficType::T1;
    std::vector<NodeIndex> path;
    std::vector<LinkIndex> links;
    SlotRange slots;
    double rate_gbps = 0.0;
    double min_rate_gbps = 0.0;
    double gsnr_db = 0.0;
    std::string modulation;
    Tick provisioned_at = 0;
    Tick expires_at = 0;
    bool compressed = false;
};

inline void allocate(SpectrumGrid& grid, const Lightpath& lp) { grid.allocate(lp.id, lp.links, lp.slots); }
inline void release(SpectrumGrid& grid, LightpathId id) { grid.release(id); }

/// Lowest contiguous range of `n_slots` free on every link in `links` within band `b`.
inline std::optional<SlotRange> first_fit_in_band(const SpectrumGrid& grid, std::span<const LinkIndex> links, Band b,
                                                  std::size_t n_slots) {
    const auto& plan = grid.plan();
    if (n_slots == 0 || n_slots > plan.slots_per_band) return std::nullopt;
    std::size_t run = 0;
    for (std::size_t s = 0; s < plan.slots_per_band; ++s) {
        bool free = true;
        for (LinkIndex l : links)
            if (!grid.is_free(l, b, s)) {
                free = false;
                break;
            }
        run = free ? run + 1 : 0;
        if (run == n_slots) return SlotRange{b, s + 1 - n_slots, n_slots};
    }
    return std::nullopt;
}

/// Lowest contiguous range of `n_slots` that is free on every link in `links`,
/// scanning bands in plan order. Spectrum continuity and contiguity hold by
/// construction: the same range is used on all links.
inline std::optional<SlotRange> first_fit(const SpectrumGrid& grid, std::span<const LinkIndex> links,
                                          std::size_t n_slots) {
    for (Band b : grid.plan().bands)
        if (auto r = first_fit_in_band(grid, links, b, n_slots)) return r;
    return std::nullopt;
}

/// Occupied slot-links over total slot-links in the plan.
inline double utilization(const SpectrumGrid& grid) {
    const double total = static_cast<double>(grid.link_count() * grid.plan().total_slots());
    return total > 0.0 ? static_cast<double>(grid.occupied_slot_links()) / total : 0.0;
}

} // namespace daca

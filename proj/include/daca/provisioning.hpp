#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "daca/common.hpp"
#include "daca/qot.hpp"
#include "daca/routing.hpp"
#include "daca/schedule.hpp"
#include "daca/spectrum.hpp"
#include "daca/traffic.hpp"

namespace daca {

enum class StrategyKind : std::uint8_t { NDNC, DA, CA, DACA };

inline constexpr std::array<StrategyKind, 4> kAllStrategies = {StrategyKind::NDNC, StrategyKind::DA,
                                                               StrategyKind::CA, StrategyKind::DACA};

inline constexpr std::string_view to_string(StrategyKind s) {
    switch (s) {
    case StrategyKind::NDNC: return "NDNC";
    case StrategyKind::DA: return "DA";
    case StrategyKind::CA: return "CA";
    case StrategyKind::DACA: return "DACA";
    }
    return "?";
}

inline StrategyKind parse_strategy(std::string_view s) {
    for (auto k : kAllStrategies)
        if (to_string(k) == s) return k;
    throw ConfigError("unknown strategy '" + std::string(s) + "' (expected NDNC, DA, CA or DACA)");
}

inline constexpr bool may_delay(StrategyKind s) { return s == StrategyKind::DA || s == StrategyKind::DACA; }
inline constexpr bool may_compress(StrategyKind s) { return s == StrategyKind::CA || s == StrategyKind::DACA; }

/// Everything a provisioning decision reads or mutates within one run.
struct ProvisioningContext {
    const Topology& topo;
    SpectrumGrid& grid;
    const QotModel& qot;
    RouteTable& routes;
    RoutingParams routing;
    PeakSchedule schedule;
    LightpathId next_lightpath_id = 0;
};

struct Outcome {
    enum class Kind { Provisioned, Delayed, Blocked };

    Kind kind = Kind::Blocked;
    std::optional<Lightpath> lightpath; // set when provisioned
    bool compressed = false;
    Tick deferred_until = -1; // set when a 3b request is parked until p'_e

    bool provisioned() const { return kind == Kind::Provisioned; }
    bool delayed() const { return kind == Kind::Delayed; }
    bool blocked() const { return kind == Kind::Blocked; }
};

namespace detail {

/// Routes and assigns slots for `req` at its current rate; allocates on success.
inline std::optional<Lightpath> try_provision(const Request& req, Tick t, ProvisioningContext& ctx) {
    const auto& paths = ctx.routes.paths(req.s, req.d);
    auto plan = rsa(req.gamma_gbps, paths, ctx.topo, ctx.grid, ctx.qot, ctx.routing.max_slots_per_lightpath);
    if (!plan) return std::nullopt;
    Lightpath lp;
    lp.id = ctx.next_lightpath_id++;
    lp.request_id = req.id;
    lp.type = req.type;
    lp.path = plan->path->nodes;
    lp.links = plan->path->links;
    lp.slots = plan->slots;
    lp.rate_gbps = req.gamma_gbps;
    lp.min_rate_gbps = req.gamma_min_gbps;
    lp.gsnr_db = plan->gsnr_db;
    lp.modulation = plan->modulation;
    lp.provisioned_at = t;
    lp.expires_at = t + req.tau_ticks;
    lp.compressed = req.gamma_gbps < req.gamma_original_gbps;
    allocate(ctx.grid, lp);
    return lp;
}

inline Outcome provisioned(Lightpath lp) {
    Outcome o{Outcome::Kind::Provisioned, std::move(lp), false, -1};
    o.compressed = o.lightpath->compressed;
    return o;
}

inline Outcome delayed(Request& req) {
    --req.delta_ticks;
    return {Outcome::Kind::Delayed, std::nullopt, false, -1};
}

inline Outcome blocked() { return {}; }

inline Outcome compress_and_retry(Request& req, Tick t, ProvisioningContext& ctx) {
    req.gamma_gbps = *req.phi * req.gamma_original_gbps;
    if (auto lp = try_provision(req, t, ctx)) return provisioned(std::move(*lp));
    return blocked();
}

inline Outcome final_retry(const Request& req, Tick t, ProvisioningContext& ctx) {
    if (auto lp = try_provision(req, t, ctx)) return provisioned(std::move(*lp));
    return blocked();
}

/// Type-3b branch shared by DA and DACA: park until p'_e when the delay
/// deadline lands inside (p_s, p'_e), otherwise spend the budget tick by tick.
inline Outcome handle_3b(Request& req, Tick t, ProvisioningContext& ctx) {
    if (Tick target = ctx.schedule.deferral_target(t + req.delta_ticks); target >= 0) {
        req.delta_ticks = 0;
        return {Outcome::Kind::Delayed, std::nullopt, false, target};
    }
    if (req.delta_ticks > 0) return delayed(req);
    return final_retry(req, t, ctx);
}

} // namespace detail

/// One provisioning attempt for `req` at tick `t` under `strategy`. Updates
/// the request's remaining delay budget and rate in place.
inline Outcome handle(StrategyKind strategy, Request& req, Tick t, ProvisioningContext& ctx) {
    using namespace detail;
    if (auto lp = try_provision(req, t, ctx)) return provisioned(std::move(*lp));

    switch (strategy) {
    case StrategyKind::NDNC:
        return blocked();

    case StrategyKind::DA:
        switch (req.type) {
        case TrafficType::T2a:
        case TrafficType::T3a: return req.delta_ticks > 0 ? delayed(req) : blocked();
        case TrafficType::T3b: return handle_3b(req, t, ctx);
        default: return blocked();
        }

    case StrategyKind::CA:
        if (is_compressible(req.type)) return compress_and_retry(req, t, ctx);
        return blocked();

    case StrategyKind::DACA:
        switch (req.type) {
        case TrafficType::T2a: return req.delta_ticks > 0 ? delayed(req) : compress_and_retry(req, t, ctx);
        case TrafficType::T2b: return compress_and_retry(req, t, ctx);
        case TrafficType::T3a: return req.delta_ticks > 0 ? delayed(req) : final_retry(req, t, ctx);
        case TrafficType::T3b: return handle_3b(req, t, ctx);
        case TrafficType::T1: return blocked();
        }
    }
    return blocked();
}

struct PendingEntry {
    Request request;
    Tick enqueued_at = 0;
    Tick expire_at = 0;       // tick at which the remaining budget reaches zero
    Tick deferred_until = -1; // p'_e release tick for parked 3b requests
};

struct Resolution {
    Request request;
    Outcome outcome;
};

/// Requests waiting for capacity, kept in arrival order.
class PendingQueue {
public:
    /// Registers a request that `handle` just reported as delayed at tick `t`.
    void push(const Request& req, const Outcome& o, Tick t) {
        PendingEntry e{req, t, t + req.delta_ticks + 1, o.deferred_until};
        if (o.deferred_until >= 0) e.expire_at = o.deferred_until;
        entries_.push_back(std::move(e));
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<PendingEntry>& entries() const { return entries_; }

    /// Retries waiting requests at tick `t` in FIFO order. With `all_eligible`
    /// every entry not parked past `t` is retried; otherwise only entries whose
    /// budget runs out or whose parking ends at `t`. Skipping the others is
    /// exact when no slot was freed since their last attempt, because a grid
    /// with only added occupancy can never admit a request it rejected.
    std::vector<Resolution> retry(StrategyKind strategy, Tick t, ProvisioningContext& ctx, bool all_eligible) {
        std::vector<Resolution> resolved;
        std::vector<PendingEntry> keep;
        keep.reserve(entries_.size());
        for (auto& e : entries_) {
            const bool parked = e.deferred_until >= 0;
            const bool eligible = e.enqueued_at < t && (!parked || e.deferred_until <= t);
            const bool due = parked ? e.deferred_until <= t : e.expire_at <= t;
            if (!eligible || !(all_eligible || due)) {
                keep.push_back(std::move(e));
                continue;
            }
            if (!parked) e.request.delta_ticks = e.expire_at - t;
            Outcome o = handle(strategy, e.request, t, ctx);
            if (o.delayed()) {
                keep.push_back(std::move(e));
            } else {
                resolved.push_back({std::move(e.request), std::move(o)});
            }
        }
        entries_ = std::move(keep);
        return resolved;
    }

    /// Earliest tick at which some entry must be retried even without new capacity.
    std::optional<Tick> next_due() const {
        std::optional<Tick> best;
        for (const auto& e : entries_) {
            Tick due = e.deferred_until >= 0 ? e.deferred_until : e.expire_at;
            if (!best || due < *best) best = due;
        }
        return best;
    }

    std::vector<Request> drain() {
        std::vector<Request> out;
        for (auto& e : entries_) out.push_back(std::move(e.request));
        entries_.clear();
        return out;
    }

private:
    std::vector<PendingEntry> entries_;
};

} // namespace daca

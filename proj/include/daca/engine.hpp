#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "daca/config.hpp"
#include "daca/metrics.hpp"
#include "daca/provisioning.hpp"
#include "daca/qot.hpp"
#include "daca/routing.hpp"
#include "daca/spectrum.hpp"
#include "daca/traffic.hpp"

namespace daca {

/// Same-tick order: capacity is freed before new demand sees it, and
/// waiting requests are retried last.
enum class EventKind : std::uint8_t { Departure = 0, Reestimate = 1, Arrival = 2, RetrySweep = 3 };

struct Event {
    Tick at = 0;
    EventKind kind = EventKind::Arrival;
    std::int64_t id = 0; // lightpath id for departures, request index for arrivals

    friend bool operator>(const Event& a, const Event& b) {
        return std::tie(a.at, a.kind, a.id) > std::tie(b.at, b.kind, b.id);
    }
};

/// One line of the outcome log.
struct OutcomeRecord {
    enum class Kind { Provisioned, Delayed, Deferred, Blocked, Dropped, Departed };

    Tick at = 0;
    std::int64_t request_id = 0;
    TrafficType type = TrafficType::T1;
    Kind kind = Kind::Blocked;
    double rate_gbps = 0.0;
    bool compressed = false;
    std::vector<NodeIndex> path;
    std::optional<SlotRange> slots;
    Tick arrived_at = 0;
    Tick delta_budget = 0; // delay budget sampled at arrival
    Tick deferred_until = -1;
    double gamma_original_gbps = 0.0;
    double gamma_min_gbps = 0.0;
    Tick holding = 0;
};

inline std::string_view to_string(OutcomeRecord::Kind k) {
    switch (k) {
    case OutcomeRecord::Kind::Provisioned: return "provisioned";
    case OutcomeRecord::Kind::Delayed: return "delayed";
    case OutcomeRecord::Kind::Deferred: return "deferred";
    case OutcomeRecord::Kind::Blocked: return "blocked";
    case OutcomeRecord::Kind::Dropped: return "dropped";
    case OutcomeRecord::Kind::Departed: return "departed";
    }
    return "?";
}

inline void write_event_log(std::ostream& out, const Topology& topo, const std::vector<OutcomeRecord>& records) {
    out << "tick,request_id,type,outcome,rate_gbps,compressed,path,band,slot_start,slot_len\n";
    for (const auto& r : records) {
        out << r.at << ',' << r.request_id << ',' << to_string(r.type) << ',' << to_string(r.kind) << ','
            << format_number(r.rate_gbps) << ',' << (r.compressed ? 1 : 0) << ',';
        for (std::size_t i = 0; i < r.path.size(); ++i) out << (i ? "-" : "") << topo.node(r.path[i]).id;
        if (r.slots)
            out << ',' << to_string(r.slots->band) << ',' << r.slots->start << ',' << r.slots->len << '\n';
        else
            out << ",,,\n";
    }
}

/// One seeded simulation run. Single-threaded and deterministic: every random
/// draw happens in the traffic generator before the event loop starts.
class Simulator {
public:
    Simulator(const SimConfig& config, std::uint64_t seed, bool keep_records = false)
        : config_(config), seed_(seed), keep_records_(keep_records || config.event_log),
          grid_(config.topology->link_count(), config.plan), routes_(*config.topology, config.routing.k),
          ctx_{*config.topology, grid_, config_.qot, routes_, config.routing, config.schedule, 0} {
        config_.validate();
        TrafficGenerator gen(config.traffic, *config.topology, config.schedule, config.load_scale, seed);
        requests_ = gen.take(config.demands_per_seed);
        counted_.resize(requests_.size());
        delayed_.assign(requests_.size(), false);
        for (std::size_t i = 0; i < requests_.size(); ++i)
            counted_[i] = !config.exclude_first_day || requests_[i].arrived_at >= kTicksPerDay;
    }

    MetricsReport run() {
        const Tick horizon = static_cast<Tick>(config_.horizon_days) * kTicksPerDay;
        for (std::size_t i = 0; i < requests_.size(); ++i)
            push({requests_[i].arrived_at, EventKind::Arrival, static_cast<std::int64_t>(i)});
        push({0, EventKind::Reestimate, 0});
        samples_.push_back({0, 0.0});

        Tick last = 0;
        while (!queue_.empty()) {
            Event e = queue_.top();
            if (e.at >= horizon) break;
            queue_.pop();
            last = e.at;
            switch (e.kind) {
            case EventKind::Departure: on_departure(e); break;
            case EventKind::Reestimate: on_reestimate(e.at); break;
            case EventKind::Arrival: on_arrival(e); break;
            case EventKind::RetrySweep: on_sweep(e.at); break;
            }
            record_sample(e.at);
        }
        end_tick_ = queue_.empty() ? last : horizon;
        return finish();
    }

    const std::vector<OutcomeRecord>& records() const { return records_; }
    const std::vector<Request>& requests() const { return requests_; }
    const SpectrumGrid& grid() const { return grid_; }
    const std::vector<UtilizationSample>& samples() const { return samples_; }
    std::size_t invariant_checks() const { return invariant_checks_; }
    std::size_t active_count() const { return active_.size(); }
    Tick end_tick() const { return end_tick_; }

private:
    void push(Event e) { queue_.push(e); }

    bool work_remains() const {
        return arrivals_done_ < requests_.size() || !active_.empty() || !pending_.empty();
    }

    void schedule_sweep(Tick t) {
        if (sweeps_.insert(t).second) push({t, EventKind::RetrySweep, 0});
    }

    void log(OutcomeRecord::Kind kind, Tick t, const Request& r, const Lightpath* lp = nullptr,
             Tick deferred = -1) {
        if (!keep_records_) return;
        OutcomeRecord rec;
        rec.at = t;
        rec.request_id = r.id;
        rec.type = r.type;
        rec.kind = kind;
        rec.rate_gbps = lp ? lp->rate_gbps : r.gamma_gbps;
        rec.compressed = lp && lp->compressed;
        if (lp) {
            rec.path = lp->path;
            rec.slots = lp->slots;
        }
        const Request& orig = requests_[static_cast<std::size_t>(r.id)];
        rec.arrived_at = orig.arrived_at;
        rec.delta_budget = orig.delta_ticks;
        rec.deferred_until = deferred;
        rec.gamma_original_gbps = orig.gamma_original_gbps;
        rec.gamma_min_gbps = orig.gamma_min_gbps;
        rec.holding = orig.tau_ticks;
        records_.push_back(std::move(rec));
    }

    TypeCounts& counts_for(const Request& r) { return per_type_[index_of(r.type)]; }

    void resolve(const Request& r, Outcome& o, Tick t) {
        const bool counted = counted_[static_cast<std::size_t>(r.id)];
        if (o.provisioned()) {
            Lightpath& lp = *o.lightpath;
            log(OutcomeRecord::Kind::Provisioned, t, r, &lp);
            if (counted) {
                ++n_provisioned_;
                ++counts_for(r).provisioned;
                if (o.compressed) ++n_compressed_;
            }
            occupied_by_active_ += lp.links.size() * lp.slots.len;
            push({lp.expires_at, EventKind::Departure, lp.id});
            active_.emplace(lp.id, std::move(lp));
        } else {
            log(OutcomeRecord::Kind::Blocked, t, r);
            if (counted) {
                ++n_blocked_;
                ++counts_for(r).blocked;
            }
        }
    }

    void release_lightpath(LightpathId id, Tick t) {
        auto it = active_.find(id);
        grid_.release(id);
        occupied_by_active_ -= it->second.links.size() * it->second.slots.len;
        active_.erase(it);
        last_release_ = t;
        if (!pending_.empty()) schedule_sweep(t);
    }

    void on_departure(const Event& e) {
        auto it = active_.find(e.id);
        if (it == active_.end() || it->second.expires_at != e.at) return; // dropped earlier
        if (keep_records_) {
            const Lightpath& lp = it->second;
            log(OutcomeRecord::Kind::Departed, e.at, requests_[static_cast<std::size_t>(lp.request_id)], &lp);
        }
        release_lightpath(e.id, e.at);
    }

    void on_reestimate(Tick t) {
        if (config_.check_invariants) check_conservation(t);
        std::vector<const Lightpath*> active;
        active.reserve(active_.size());
        for (const auto& [id, lp] : active_) active.push_back(&lp);
        std::sort(active.begin(), active.end(), [](auto* a, auto* b) { return a->id < b->id; });
        auto results = reestimate_all(config_.qot, *config_.topology, grid_, active);
        for (const auto& r : results) {
            auto& lp = active_.at(r.id);
            lp.gsnr_db = r.gsnr_db;
            lp.modulation = r.modulation;
            if (r.retained) continue;
            const Request& req = requests_[static_cast<std::size_t>(lp.request_id)];
            log(OutcomeRecord::Kind::Dropped, t, req, &lp);
            if (counted_[static_cast<std::size_t>(req.id)]) {
                ++n_dropped_;
                ++counts_for(req).dropped;
            }
            release_lightpath(r.id, t);
        }
        if (work_remains()) push({config_.schedule.next_reestimate(t), EventKind::Reestimate, 0});
    }

    void on_arrival(const Event& e) {
        Request req = requests_[static_cast<std::size_t>(e.id)];
        ++arrivals_done_;
        if (counted_[static_cast<std::size_t>(e.id)]) {
            ++n_requests_;
            ++counts_for(req).requests;
        }
        Outcome o = handle(config_.strategy, req, e.at, ctx_);
        if (o.delayed()) {
            enqueue(req, o, e.at);
        } else {
            resolve(req, o, e.at);
        }
    }

    void enqueue(const Request& req, const Outcome& o, Tick t) {
        const auto idx = static_cast<std::size_t>(req.id);
        if (!delayed_[idx]) {
            delayed_[idx] = true;
            if (counted_[idx]) ++n_delayed_;
        }
        log(o.deferred_until >= 0 ? OutcomeRecord::Kind::Deferred : OutcomeRecord::Kind::Delayed, t, req, nullptr,
            o.deferred_until);
        pending_.push(req, o, t);
        const auto& entry = pending_.entries().back();
        if (config_.retry_mode == RetryMode::PerTick)
            schedule_sweep(t + 1);
        else
            schedule_sweep(entry.deferred_until >= 0 ? entry.deferred_until : entry.expire_at);
    }

    void on_sweep(Tick t) {
        sweeps_.erase(t);
        const bool all = config_.retry_mode == RetryMode::PerTick || last_release_ == t;
        for (auto& res : pending_.retry(config_.strategy, t, ctx_, all)) resolve(res.request, res.outcome, t);
        if (config_.retry_mode == RetryMode::PerTick && !pending_.empty()) schedule_sweep(t + 1);
    }

    void check_conservation(Tick t) {
        ++invariant_checks_;
        const std::size_t scanned = grid_.count_occupied();
        if (scanned != occupied_by_active_ || scanned != grid_.occupied_slot_links()) {
            std::ostringstream os;
            os << "spectrum conservation violated at tick " << t << ": grid holds " << scanned
               << " slot-links, active lightpaths account for " << occupied_by_active_;
            throw SpectrumError(os.str());
        }
    }

    void record_sample(Tick t) {
        const double u = utilization(grid_);
        if (!samples_.empty() && samples_.back().at == t) {
            samples_.back().value = u;
        } else if (samples_.empty() || samples_.back().value != u) {
            samples_.push_back({t, u});
        }
    }

    MetricsReport finish() {
        MetricsReport rep;
        rep.seed = seed_;
        rep.strategy = std::string(to_string(config_.strategy));
        rep.band_plan = config_.plan.name();
        rep.config_hash = config_.hash();
        rep.stream_hash = to_hex(stream_hash(requests_));
        for (const auto& r : pending_.entries()) {
            if (!counted_[static_cast<std::size_t>(r.request.id)]) continue;
            ++n_pending_;
            ++counts_for(r.request).pending;
        }
        rep.n_requests = n_requests_;
        rep.n_blocked = n_blocked_;
        rep.n_dropped = n_dropped_;
        rep.n_provisioned = n_provisioned_;
        rep.n_compressed = n_compressed_;
        rep.n_delayed = n_delayed_;
        rep.n_pending = n_pending_;
        rep.per_type = per_type_;
        const std::size_t days = static_cast<std::size_t>(end_tick_ / kTicksPerDay) + 1;
        rep.hourly_utilization = hourly_utilization(samples_, days);
        rep.snapshot_day = config_.snapshot_day;
        rep.metadata = {{"seed", seed_}, {"config", config_.document}, {"end_tick", end_tick_}};
        return rep;
    }

    SimConfig config_;
    std::uint64_t seed_;
    bool keep_records_;
    SpectrumGrid grid_;
    RouteTable routes_;
    ProvisioningContext ctx_;
    std::vector<Request> requests_;
    std::vector<bool> counted_;
    std::vector<bool> delayed_;
    PendingQueue pending_;
    std::unordered_map<LightpathId, Lightpath> active_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::set<Tick> sweeps_;
    std::vector<UtilizationSample> samples_;
    std::vector<OutcomeRecord> records_;
    std::size_t arrivals_done_ = 0;
    std::size_t occupied_by_active_ = 0;
    std::size_t invariant_checks_ = 0;
    Tick last_release_ = -1;
    Tick end_tick_ = 0;

    std::int64_t n_requests_ = 0, n_blocked_ = 0, n_dropped_ = 0, n_provisioned_ = 0, n_compressed_ = 0,
                 n_delayed_ = 0, n_pending_ = 0;
    std::array<TypeCounts, kTrafficTypeCount> per_type_{};
};

inline MetricsReport run(const SimConfig& config, std::uint64_t seed) { return Simulator(config, seed).run(); }

/// Failure of one seed inside a batch.
class SeedError : public std::runtime_error {
public:
    SeedError(std::uint64_t seed, const std::string& what)
        : std::runtime_error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

struct BatchReport {
    std::vector<MetricsReport> runs; // ordered by seed
    Aggregate aggregate;
};

/// Runs every configured seed independently (concurrently when `parallel`)
/// and reduces them in seed order.
inline BatchReport run_batch(const SimConfig& config, bool parallel = true) {
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    std::vector<std::future<MetricsReport>> futures;
    for (auto seed : seeds)
        futures.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                                     [&config, seed] { return run(config, seed); }));
    BatchReport batch;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        try {
            batch.runs.push_back(futures[i].get());
        } catch (const std::exception& e) {
            throw SeedError(seeds[i], e.what());
        }
    }
    std::vector<MetricsRow> rows;
    for (const auto& r : batch.runs) rows.push_back(to_row(r));
    batch.aggregate = aggregate(rows);
    return batch;
}

} // namespace daca

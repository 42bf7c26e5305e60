#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "daca/common.hpp"
#include "daca/schedule.hpp"
#include "daca/topology.hpp"

namespace daca {

/// Closed interval in minutes; min == max is a constant.
struct MinuteInterval {
    double min = 0.0;
    double max = 0.0;

    template <class Rng>
    double sample(Rng& rng) const {
        if (min == max) return min;
        return std::uniform_real_distribution<double>(min, max)(rng);
    }
};

inline Tick minutes_to_ticks(double minutes) {
    return static_cast<Tick>(std::llround(minutes * static_cast<double>(kTicksPerMinute)));
}

struct TrafficTypeSpec {
    TrafficType type = TrafficType::T1;
    MinuteInterval holding_min;
    double lambda_peak = 0.0;    // arrivals per second
    double lambda_offpeak = 0.0; // arrivals per second
    std::optional<double> phi;
    std::optional<MinuteInterval> delta_min;
    std::vector<double> rates_gbps;

    void validate() const {
        const std::string name(to_string(type));
        if (phi.has_value() != is_compressible(type))
            throw ConfigError("type " + name + ": phi must be set exactly for compressible types (2a, 2b)");
        if (delta_min.has_value() != is_delayable(type))
            throw ConfigError("type " + name + ": delta must be set exactly for delayable types (2a, 3a, 3b)");
        if (phi && !(*phi > 0.0 && *phi <= 1.0)) throw ConfigError("type " + name + ": phi outside (0,1]");
        if (rates_gbps.empty()) throw ConfigError("type " + name + ": empty rate set");
        for (double r : rates_gbps)
            if (!(r > 0.0)) throw ConfigError("type " + name + ": rates must be positive");
        if (!(holding_min.min > 0.0 && holding_min.min <= holding_min.max))
            throw ConfigError("type " + name + ": invalid holding interval");
        if (delta_min && !(delta_min->min >= 0.0 && delta_min->min <= delta_min->max))
            throw ConfigError("type " + name + ": invalid delay interval");
        if (!(lambda_peak >= 0.0 && lambda_offpeak >= 0.0))
            throw ConfigError("type " + name + ": arrival rates must be nonnegative");
    }
};

/// The five traffic classes with holding times, peak/off-peak arrival rates,
/// compression factors, delay budgets and rate sets.
inline std::vector<TrafficTypeSpec> default_table1() {
    return {
        {TrafficType::T1, {5, 5}, 8, 2, std::nullopt, std::nullopt, {100, 200}},
        {TrafficType::T2a, {30, 90}, 100, 25, 0.5, MinuteInterval{3, 5}, {200, 400}},
        {TrafficType::T2b, {20, 40}, 48, 12, 0.5, std::nullopt, {200, 400}},
        {TrafficType::T3a, {8, 12}, 8, 2, std::nullopt, MinuteInterval{2, 4}, {100, 200}},
        {TrafficType::T3b, {360, 600}, 4, 1, std::nullopt, MinuteInterval{360, 720}, {400}},
    };
}

struct Request {
    std::int64_t id = 0;
    NodeIndex s = 0;
    NodeIndex d = 0;
    double gamma_gbps = 0.0;     // currently requested rate (halved by compression)
    double gamma_min_gbps = 0.0; // SLA floor
    double gamma_original_gbps = 0.0;
    TrafficType type = TrafficType::T1;
    std::optional<double> phi;
    Tick delta_ticks = 0; // remaining delay budget
    Tick tau_ticks = 1;   // holding time, counted from provisioning
    Tick arrived_at = 0;
    double arrival_time = 0.0; // continuous arrival instant, seconds
};

/// Next arrival after `now` (seconds) of a piecewise-Poisson process whose rate
/// switches between peak and off-peak. Crossing a boundary restarts the draw
/// from the boundary with the new rate, which is exact by memorylessness.
template <class Rng>
double next_arrival(const TrafficTypeSpec& spec, double now, const PeakSchedule& schedule, double load_scale,
                    Rng& rng) {
    const double peak = spec.lambda_peak * load_scale;
    const double off = spec.lambda_offpeak * load_scale;
    if (!(peak > 0.0) && !(off > 0.0)) return std::numeric_limits<double>::infinity();
    double t = now;
    for (;;) {
        const double rate = schedule.is_peak(t) ? peak : off;
        const double boundary = schedule.next_boundary(t);
        if (rate > 0.0) {
            const double candidate = t + std::exponential_distribution<double>(rate)(rng);
            if (candidate < boundary) return candidate;
        }
        t = boundary;
    }
}

/// Draws every attribute of one request except its id.
template <class Rng>
Request make_request(const TrafficTypeSpec& spec, GravitySampler& endpoints, double now, Rng& rng) {
    Request r;
    r.type = spec.type;
    r.arrival_time = now;
    r.arrived_at = static_cast<Tick>(std::floor(now));
    std::tie(r.s, r.d) = endpoints(rng);
    std::uniform_int_distribution<std::size_t> pick(0, spec.rates_gbps.size() - 1);
    r.gamma_gbps = spec.rates_gbps[pick(rng)];
    r.gamma_original_gbps = r.gamma_gbps;
    r.tau_ticks = std::max<Tick>(1, minutes_to_ticks(spec.holding_min.sample(rng)));
    r.delta_ticks = spec.delta_min ? minutes_to_ticks(spec.delta_min->sample(rng)) : 0;
    r.phi = spec.phi;
    r.gamma_min_gbps = spec.phi ? *spec.phi * r.gamma_gbps : r.gamma_gbps;
    return r;
}

/// Merged request stream of all traffic types for one seed. Each type draws
/// from its own engine, so the stream depends only on (seed, specs, topology,
/// schedule, load scale) and never on provisioning decisions.
class TrafficGenerator {
public:
    TrafficGenerator(std::vector<TrafficTypeSpec> specs, const Topology& topo, PeakSchedule schedule,
                     double load_scale, std::uint64_t seed)
        : specs_(std::move(specs)), schedule_(schedule), load_scale_(load_scale) {
        for (const auto& spec : specs_) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(index_of(spec.type)), 0x7a11u};
            Lane lane{spec, GravitySampler(topo), std::mt19937_64(seq), {}, false};
            advance(lane, 0.0);
            lanes_.push_back(std::move(lane));
        }
    }

    /// Next request in (tick, type order, arrival instant) order, or nullopt
    /// when every lane has a zero rate.
    std::optional<Request> next() {
        Lane* best = nullptr;
        for (auto& lane : lanes_) {
            if (!lane.has_next) continue;
            if (!best || key(lane) < key(*best)) best = &lane;
        }
        if (!best) return std::nullopt;
        Request r = best->pending;
        r.id = next_id_++;
        advance(*best, r.arrival_time);
        return r;
    }

    std::vector<Request> take(std::size_t n) {
        std::vector<Request> out;
        out.reserve(n);
        while (out.size() < n) {
            auto r = next();
            if (!r) break;
            out.push_back(std::move(*r));
        }
        return out;
    }

private:
    struct Lane {
        TrafficTypeSpec spec;
        GravitySampler endpoints;
        std::mt19937_64 rng;
        Request pending;
        bool has_next;
    };

    static std::tuple<Tick, std::size_t, double> key(const Lane& l) {
        return {l.pending.arrived_at, index_of(l.spec.type), l.pending.arrival_time};
    }

    void advance(Lane& lane, double now) {
        const double t = next_arrival(lane.spec, now, schedule_, load_scale_, lane.rng);
        lane.has_next = std::isfinite(t);
        if (lane.has_next) lane.pending = make_request(lane.spec, lane.endpoints, t, lane.rng);
    }

    std::vector<TrafficTypeSpec> specs_;
    PeakSchedule schedule_;
    double load_scale_;
    std::vector<Lane> lanes_;
    std::int64_t next_id_ = 0;
};

/// Fingerprint of a request stream: ids, types, endpoints, rates, budgets, times.
inline std::uint64_t stream_hash(const std::vector<Request>& stream) {
    Fnv1a h;
    for (const auto& r : stream) {
        std::ostringstream os;
        os.precision(17);
        os << r.id << ',' << to_string(r.type) << ',' << r.s << ',' << r.d << ',' << r.gamma_original_gbps << ','
           << r.gamma_min_gbps << ',' << r.tau_ticks << ',' << r.delta_ticks << ',' << r.arrival_time << ';';
        h.update(os.str());
    }
    return h.value();
}

} // namespace daca

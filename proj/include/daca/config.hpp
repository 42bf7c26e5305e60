#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "daca/common.hpp"
#include "daca/provisioning.hpp"
#include "daca/qot.hpp"
#include "daca/routing.hpp"
#include "daca/schedule.hpp"
#include "daca/spectrum.hpp"
#include "daca/topology.hpp"
#include "daca/traffic.hpp"

namespace daca {

enum class RetryMode {
    Event,  // retry only when capacity was freed or a budget/parking ends
    PerTick // retry every pending request every tick
};

/// Arrival-rate multiplier that puts NDNC blocking in the C band in the
/// 5-20% range on the bundled 22-node topology.
inline constexpr double kDefaultLoadScale = 1.0 / 1000.0;

struct SimConfig {
    std::shared_ptr<const Topology> topology;
    std::string topology_path;
    BandPlan plan = BandPlan::c_only();
    StrategyKind strategy = StrategyKind::DACA;
    std::vector<TrafficTypeSpec> traffic = default_table1();
    double load_scale = kDefaultLoadScale;
    QotModel qot{};
    RoutingParams routing;
    PeakSchedule schedule;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::size_t demands_per_seed = 15000;
    int horizon_days = 7;
    bool exclude_first_day = false;
    std::size_t snapshot_day = 0;
    RetryMode retry_mode = RetryMode::Event;
    bool check_invariants = false;
    bool event_log = false;
    std::vector<StrategyKind> sweep_strategies{kAllStrategies.begin(), kAllStrategies.end()};
    std::vector<std::string> sweep_band_plans{"C", "C+L"};

    /// Canonical configuration document; source of the config hash.
    nlohmann::json document = nlohmann::json::object();

    void validate() const {
        if (!topology) throw ConfigError("no topology loaded");
        if (seeds.empty()) throw ConfigError("seeds must be nonempty");
        if (demands_per_seed == 0) throw ConfigError("demands_per_seed must be positive");
        if (horizon_days <= 0) throw ConfigError("horizon_days must be positive");
        if (!(load_scale >= 0.0)) throw ConfigError("traffic.load_scale must be nonnegative");
        if (traffic.empty()) throw ConfigError("no traffic types configured");
        for (const auto& t : traffic) t.validate();
        routing.validate();
        schedule.validate();
        qot.spec().validate();
        if (plan.slots_per_band == 0) throw ConfigError("spectrum.slots_per_band must be positive");
    }

    std::string hash() const {
        Fnv1a h;
        h.update(document.dump());
        if (topology) h.update(topology_to_json(*topology).dump());
        return to_hex(h.value());
    }

    /// Copy of this configuration for one sweep cell.
    SimConfig with_cell(StrategyKind s, const std::string& band_plan) const {
        SimConfig c = *this;
        c.strategy = s;
        c.plan = parse_band_plan(band_plan, plan.slots_per_band);
        c.document["strategy"] = std::string(to_string(s));
        c.document["band_plan"] = c.plan.name();
        return c;
    }
};

namespace detail {

inline nlohmann::json interval_json(const MinuteInterval& i) {
    if (i.min == i.max) return i.min;
    return nlohmann::json::array({i.min, i.max});
}

inline MinuteInterval interval_from(const nlohmann::json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.at("min").get<double>(), j.at("max").get<double>()};
    throw ConfigError(what + " must be a number or a [min, max] pair");
}

} // namespace detail

inline nlohmann::json traffic_spec_json(const TrafficTypeSpec& t) {
    return {{"holding_min", detail::interval_json(t.holding_min)},
            {"lambda_peak", t.lambda_peak},
            {"lambda_offpeak", t.lambda_offpeak},
            {"phi", t.phi ? nlohmann::json(*t.phi) : nlohmann::json(nullptr)},
            {"delta_min", t.delta_min ? detail::interval_json(*t.delta_min) : nlohmann::json(nullptr)},
            {"rates_gbps", t.rates_gbps}};
}

/// Every configuration key with its default value.
inline nlohmann::json default_config_document() {
    nlohmann::json types = nlohmann::json::object();
    for (const auto& t : default_table1()) types[std::string(to_string(t.type))] = traffic_spec_json(t);
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : ModulationTable::defaults())
        table.push_back({{"min_gsnr_db", r.min_gsnr_db}, {"modulation", r.modulation}, {"slot_rate_gbps", r.slot_rate_gbps}});
    QotEstimatorSpec q;
    return {
        {"topology", nullptr},
        {"band_plan", "C"},
        {"strategy", "DACA"},
        {"spectrum", {{"slots_per_band", 133}, {"slot_width_ghz", 37.5}}},
        {"traffic", {{"load_scale", kDefaultLoadScale}, {"types", types}}},
        {"qot",
         {{"kind", "analytic"},
          {"ref_gsnr_db", q.ref_gsnr_db},
          {"span_km", q.span_km},
          {"load_penalty_db", q.load_penalty_db},
          {"lband_offset_db", q.lband_offset_db},
          {"table", table},
          {"link_table", nullptr}}},
        {"routing", {{"k", 3}, {"max_slots_per_lightpath", 4}}},
        {"schedule", {{"p_s_hour", 8}, {"p_e_hour", 20}, {"m_hours", 2}, {"t_p", 10}, {"t_o", 100}}},
        {"seeds", {1, 2, 3}},
        {"demands_per_seed", 15000},
        {"horizon_days", 7},
        {"metrics", {{"exclude_first_day", false}, {"snapshot_day", 0}}},
        {"engine", {{"retry_mode", "event"}, {"check_invariants", false}}},
        {"event_log", false},
        {"sweep", {{"strategies", {"NDNC", "DA", "CA", "DACA"}}, {"band_plans", {"C", "C+L"}}}},
    };
}

/// Applies `key=value` with a dotted key path. The value is parsed as JSON
/// when possible and kept as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not KEY=VALUE");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;
    }
    nlohmann::json* node = &doc;
    std::size_t pos = 0;
    for (;;) {
        auto dot = key.find('.', pos);
        std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (node->is_null()) *node = nlohmann::json::object();
        if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

inline std::filesystem::path resolve_relative(const std::filesystem::path& p, const std::filesystem::path& base) {
    return p.is_absolute() ? p : base / p;
}

/// Builds a validated configuration from a document merged over the defaults.
inline SimConfig parse_config(const nlohmann::json& user, const std::filesystem::path& base_dir,
                              std::shared_ptr<const Topology> topology = nullptr) {
    nlohmann::json doc = default_config_document();
    doc.merge_patch(user);
    SimConfig c;
    try {
        c.document = doc;
        const std::size_t slots = doc.at("spectrum").at("slots_per_band").get<std::size_t>();
        c.plan = parse_band_plan(doc.at("band_plan").get<std::string>(), slots);
        c.plan.slot_width_ghz = doc.at("spectrum").at("slot_width_ghz").get<double>();
        c.strategy = parse_strategy(doc.at("strategy").get<std::string>());

        if (topology) {
            c.topology = std::move(topology);
        } else {
            if (!doc.contains("topology") || doc.at("topology").is_null()) throw ConfigError("config has no 'topology' path");
            auto path = resolve_relative(doc.at("topology").get<std::string>(), base_dir);
            c.topology_path = path.string();
            c.topology = std::make_shared<const Topology>(load_topology(path));
        }

        const auto& tr = doc.at("traffic");
        c.load_scale = tr.at("load_scale").get<double>();
        c.traffic.clear();
        for (auto t : kAllTrafficTypes) {
            const std::string name(to_string(t));
            if (!tr.at("types").contains(name)) continue;
            const auto& j = tr.at("types").at(name);
            if (j.is_null()) continue;
            TrafficTypeSpec s;
            s.type = t;
            s.holding_min = detail::interval_from(j.at("holding_min"), "traffic." + name + ".holding_min");
            s.lambda_peak = j.at("lambda_peak").get<double>();
            s.lambda_offpeak = j.at("lambda_offpeak").get<double>();
            if (j.contains("phi") && !j.at("phi").is_null()) s.phi = j.at("phi").get<double>();
            if (j.contains("delta_min") && !j.at("delta_min").is_null())
                s.delta_min = detail::interval_from(j.at("delta_min"), "traffic." + name + ".delta_min");
            s.rates_gbps = j.at("rates_gbps").get<std::vector<double>>();
            c.traffic.push_back(std::move(s));
        }
        for (const auto& [name, _] : tr.at("types").items())
            if (!parse_traffic_type(name)) throw ConfigError("unknown traffic type '" + name + "'");

        const auto& q = doc.at("qot");
        QotEstimatorSpec qs;
        const auto kind = q.at("kind").get<std::string>();
        if (kind == "analytic")
            qs.kind = QotKind::AnalyticDefault;
        else if (kind == "external-table")
            qs.kind = QotKind::ExternalTable;
        else
            throw ConfigError("unknown qot.kind '" + kind + "' (expected analytic or external-table)");
        qs.ref_gsnr_db = q.at("ref_gsnr_db").get<double>();
        qs.span_km = q.at("span_km").get<double>();
        qs.load_penalty_db = q.at("load_penalty_db").get<double>();
        qs.lband_offset_db = q.at("lband_offset_db").get<double>();
        std::vector<ModulationRow> rows;
        for (const auto& r : q.at("table"))
            rows.push_back({r.at("min_gsnr_db").get<double>(), r.at("modulation").get<std::string>(),
                            r.at("slot_rate_gbps").get<double>()});
        c.qot = QotModel(qs, ModulationTable(std::move(rows)));
        if (qs.kind == QotKind::ExternalTable) {
            if (!q.contains("link_table") || q.at("link_table").is_null()) throw ConfigError("qot.kind external-table needs qot.link_table");
            auto path = resolve_relative(q.at("link_table").get<std::string>(), base_dir);
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot open QoT link table '" + path.string() + "'");
            nlohmann::json lt = nlohmann::json::parse(in);
            for (const auto& e : lt) {
                auto a = c.topology->find(e.at("a").get<std::string>());
                auto b = c.topology->find(e.at("b").get<std::string>());
                if (!a || !b) throw ConfigError("QoT link table references an unknown node");
                auto l = c.topology->link_between(*a, *b);
                if (l == kNoLink) throw ConfigError("QoT link table references a nonexistent link");
                auto band = e.at("band").get<std::string>();
                if (band != "C" && band != "L") throw ConfigError("QoT link table band must be C or L");
                c.qot.set_link_gsnr(l, band == "C" ? Band::C : Band::L, e.at("gsnr_db").get<double>());
            }
        }

        c.routing.k = doc.at("routing").at("k").get<std::size_t>();
        c.routing.max_slots_per_lightpath = doc.at("routing").at("max_slots_per_lightpath").get<std::size_t>();

        const auto& sc = doc.at("schedule");
        auto hours = [](double h) { return static_cast<Tick>(std::llround(h * static_cast<double>(kTicksPerHour))); };
        c.schedule.p_s = hours(sc.at("p_s_hour").get<double>());
        c.schedule.p_e = hours(sc.at("p_e_hour").get<double>());
        c.schedule.p_e_prime = c.schedule.p_e + hours(sc.at("m_hours").get<double>());
        c.schedule.t_p = sc.at("t_p").get<Tick>();
        c.schedule.t_o = sc.at("t_o").get<Tick>();

        c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        c.demands_per_seed = doc.at("demands_per_seed").get<std::size_t>();
        c.horizon_days = doc.at("horizon_days").get<int>();
        c.exclude_first_day = doc.at("metrics").at("exclude_first_day").get<bool>();
        c.snapshot_day = doc.at("metrics").at("snapshot_day").get<std::size_t>();

        const auto mode = doc.at("engine").at("retry_mode").get<std::string>();
        if (mode == "event")
            c.retry_mode = RetryMode::Event;
        else if (mode == "per_tick")
            c.retry_mode = RetryMode::PerTick;
        else
            throw ConfigError("unknown engine.retry_mode '" + mode + "' (expected event or per_tick)");
        c.check_invariants = doc.at("engine").at("check_invariants").get<bool>();
        c.event_log = doc.at("event_log").get<bool>();

        c.sweep_strategies.clear();
        for (const auto& s : doc.at("sweep").at("strategies")) c.sweep_strategies.push_back(parse_strategy(s.get<std::string>()));
        c.sweep_band_plans.clear();
        for (const auto& b : doc.at("sweep").at("band_plans")) {
            c.sweep_band_plans.push_back(parse_band_plan(b.get<std::string>()).name());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Reads a JSON config file, applies `overrides` (KEY=VALUE), then validates.
inline SimConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("parse error in config file '" + path.string() + "': " + e.what());
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_config(doc, path.parent_path());
}

} // namespace daca

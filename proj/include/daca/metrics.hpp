#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "daca/common.hpp"

namespace daca {

struct TypeCounts {
    std::int64_t requests = 0;
    std::int64_t blocked = 0;
    std::int64_t dropped = 0;
    std::int64_t provisioned = 0;
    std::int64_t pending = 0;

    friend bool operator==(const TypeCounts&, const TypeCounts&) = default;
};

using HourlySeries = std::array<double, 24>;

struct MetricsReport {
    std::uint64_t seed = 0;
    std::string strategy;
    std::string band_plan;
    std::string config_hash;
    std::string stream_hash;

    std::int64_t n_requests = 0;
    std::int64_t n_blocked = 0;
    std::int64_t n_dropped = 0;
    std::int64_t n_provisioned = 0;
    std::int64_t n_compressed = 0;
    std::int64_t n_delayed = 0;
    std::int64_t n_pending = 0;
    std::array<TypeCounts, kTrafficTypeCount> per_type{};

    /// One 24-hour series per simulated day.
    std::vector<HourlySeries> hourly_utilization;
    std::size_t snapshot_day = 0;

    nlohmann::json metadata = nlohmann::json::object();

    const TypeCounts& type(TrafficType t) const { return per_type[index_of(t)]; }

    /// The 24-hour snapshot reported in tabular outputs.
    HourlySeries snapshot() const {
        if (hourly_utilization.empty()) return {};
        return hourly_utilization[std::min(snapshot_day, hourly_utilization.size() - 1)];
    }

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct BlockingProbability {
    std::optional<double> total;
    std::array<std::optional<double>, kTrafficTypeCount> per_type{};
};

/// Blocked over requests, total and per type; absent where no requests exist.
inline BlockingProbability blocking_probability(const MetricsReport& r) {
    BlockingProbability bp;
    if (r.n_requests > 0) bp.total = static_cast<double>(r.n_blocked) / static_cast<double>(r.n_requests);
    for (std::size_t i = 0; i < kTrafficTypeCount; ++i)
        if (r.per_type[i].requests > 0)
            bp.per_type[i] =
                static_cast<double>(r.per_type[i].blocked) / static_cast<double>(r.per_type[i].requests);
    return bp;
}

/// (bp - bp_ndnc) / bp_ndnc; negative means fewer blocks than NDNC.
inline std::optional<double> relative_bp(std::optional<double> bp, std::optional<double> bp_ndnc) {
    if (!bp || !bp_ndnc || !(*bp_ndnc > 0.0)) return std::nullopt;
    return (*bp - *bp_ndnc) / *bp_ndnc;
}

inline std::optional<double> relative_bp(const MetricsReport& strategy, const MetricsReport& ndnc) {
    return relative_bp(blocking_probability(strategy).total, blocking_probability(ndnc).total);
}

struct UtilizationSample {
    Tick at = 0;
    double value = 0.0;
};

/// Time-weighted hourly means of the step function defined by `samples`
/// (each value holds until the next sample; zero before the first). Covers
/// `days` whole days from tick 0.
inline std::vector<HourlySeries> hourly_utilization(const std::vector<UtilizationSample>& samples,
                                                    std::size_t days) {
    std::vector<HourlySeries> out(days, HourlySeries{});
    const Tick end = static_cast<Tick>(days) * kTicksPerDay;
    double current = 0.0;
    Tick from = 0;
    std::vector<double> area(days * 24, 0.0);
    auto accumulate = [&](Tick a, Tick b, double v) {
        a = std::max<Tick>(a, 0);
        b = std::min(b, end);
        while (a < b) {
            const Tick hour = a / kTicksPerHour;
            const Tick stop = std::min(b, (hour + 1) * kTicksPerHour);
            area[static_cast<std::size_t>(hour)] += v * static_cast<double>(stop - a);
            a = stop;
        }
    };
    for (const auto& s : samples) {
        if (s.at > from) accumulate(from, s.at, current);
        from = std::max(from, s.at);
        current = s.value;
    }
    accumulate(from, end, current);
    for (std::size_t h = 0; h < area.size(); ++h)
        out[h / 24][h % 24] = area[h] / static_cast<double>(kTicksPerHour);
    return out;
}

// ---------------------------------------------------------------------------
// Tabular rows

/// Flat, stable view of a report (or an aggregate of reports).
struct MetricsRow {
    std::string seed;
    std::string strategy;
    std::string band_plan;
    std::vector<std::optional<double>> values; // in scalar_columns() order
    std::string config_hash;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline const std::vector<std::string>& scalar_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"n_requests", "n_blocked",    "n_dropped", "n_provisioned",
                                   "n_compressed", "n_delayed", "bp_total"};
        for (auto t : kAllTrafficTypes) c.push_back("bp_type_" + std::string(to_string(t)));
        for (int h = 0; h < 24; ++h) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "util_h%02d", h);
            c.emplace_back(buf);
        }
        c.emplace_back("n_pending");
        return c;
    }();
    return cols;
}

inline std::vector<std::string> csv_header() {
    std::vector<std::string> h{"seed", "strategy", "band_plan"};
    const auto& cols = scalar_columns();
    h.insert(h.end(), cols.begin(), cols.end());
    h.emplace_back("config_hash");
    return h;
}

inline MetricsRow to_row(const MetricsReport& r) {
    MetricsRow row{std::to_string(r.seed), r.strategy, r.band_plan, {}, r.config_hash};
    auto count = [](std::int64_t v) { return std::optional<double>(static_cast<double>(v)); };
    row.values = {count(r.n_requests),   count(r.n_blocked), count(r.n_dropped), count(r.n_provisioned),
                  count(r.n_compressed), count(r.n_delayed)};
    auto bp = blocking_probability(r);
    row.values.push_back(bp.total);
    for (auto v : bp.per_type) row.values.push_back(v);
    for (double u : r.snapshot()) row.values.emplace_back(u);
    row.values.push_back(count(r.n_pending));
    return row;
}

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); zero for a single value.
inline double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct Aggregate {
    MetricsRow mean;
    MetricsRow std;
};

/// Column-wise mean and sample std over seed rows, skipping absent cells.
inline Aggregate aggregate(const std::vector<MetricsRow>& rows) {
    Aggregate agg;
    agg.mean.seed = "mean";
    agg.std.seed = "std";
    if (!rows.empty()) {
        agg.mean.strategy = agg.std.strategy = rows.front().strategy;
        agg.mean.band_plan = agg.std.band_plan = rows.front().band_plan;
    }
    const std::size_t n = scalar_columns().size();
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> xs;
        for (const auto& r : rows)
            if (c < r.values.size() && r.values[c]) xs.push_back(*r.values[c]);
        if (xs.empty()) {
            agg.mean.values.emplace_back();
            agg.std.values.emplace_back();
        } else {
            agg.mean.values.emplace_back(mean_of(xs));
            agg.std.values.emplace_back(sample_std(xs));
        }
    }
    return agg;
}

inline std::optional<double> row_value(const MetricsRow& row, const std::string& column) {
    const auto& cols = scalar_columns();
    auto it = std::find(cols.begin(), cols.end(), column);
    if (it == cols.end()) throw std::out_of_range("unknown metric column " + column);
    return row.values.at(static_cast<std::size_t>(it - cols.begin()));
}

inline std::string format_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv_row(std::ostream& out, const MetricsRow& row) {
    out << row.seed << ',' << row.strategy << ',' << row.band_plan;
    for (const auto& v : row.values) {
        out << ',';
        if (v) out << format_number(*v);
    }
    out << ',' << row.config_hash << '\n';
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    const auto header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) write_csv_row(out, r);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != csv_header())
        throw ConfigError("metrics CSV header does not match the expected schema");
    std::vector<MetricsRow> rows;
    const std::size_t n = scalar_columns().size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != n + 4) throw ConfigError("metrics CSV row has " + std::to_string(cells.size()) + " cells");
        MetricsRow row{cells[0], cells[1], cells[2], {}, cells[n + 3]};
        for (std::size_t c = 0; c < n; ++c) {
            const auto& s = cells[3 + c];
            if (s.empty())
                row.values.emplace_back();
            else
                row.values.emplace_back(std::stod(s));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["strategy"] = r.strategy;
    j["band_plan"] = r.band_plan;
    j["config_hash"] = r.config_hash;
    j["stream_hash"] = r.stream_hash;
    j["n_requests"] = r.n_requests;
    j["n_blocked"] = r.n_blocked;
    j["n_dropped"] = r.n_dropped;
    j["n_provisioned"] = r.n_provisioned;
    j["n_compressed"] = r.n_compressed;
    j["n_delayed"] = r.n_delayed;
    j["n_pending"] = r.n_pending;
    for (auto t : kAllTrafficTypes) {
        const auto& c = r.type(t);
        j["per_type"][std::string(to_string(t))] = {{"requests", c.requests},     {"blocked", c.blocked},
                                                    {"dropped", c.dropped},       {"provisioned", c.provisioned},
                                                    {"pending", c.pending}};
    }
    auto bp = blocking_probability(r);
    j["bp_total"] = bp.total ? nlohmann::json(*bp.total) : nlohmann::json(nullptr);
    j["hourly_utilization"] = r.hourly_utilization;
    j["snapshot_day"] = r.snapshot_day;
    j["metadata"] = r.metadata;
    return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.strategy = j.at("strategy").get<std::string>();
    r.band_plan = j.at("band_plan").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.stream_hash = j.at("stream_hash").get<std::string>();
    r.n_requests = j.at("n_requests").get<std::int64_t>();
    r.n_blocked = j.at("n_blocked").get<std::int64_t>();
    r.n_dropped = j.at("n_dropped").get<std::int64_t>();
    r.n_provisioned = j.at("n_provisioned").get<std::int64_t>();
    r.n_compressed = j.at("n_compressed").get<std::int64_t>();
    r.n_delayed = j.at("n_delayed").get<std::int64_t>();
    r.n_pending = j.at("n_pending").get<std::int64_t>();
    for (auto t : kAllTrafficTypes) {
        const auto& c = j.at("per_type").at(std::string(to_string(t)));
        r.per_type[index_of(t)] = {c.at("requests").get<std::int64_t>(), c.at("blocked").get<std::int64_t>(),
                                   c.at("dropped").get<std::int64_t>(), c.at("provisioned").get<std::int64_t>(),
                                   c.at("pending").get<std::int64_t>()};
    }
    r.hourly_utilization = j.at("hourly_utilization").get<std::vector<HourlySeries>>();
    r.snapshot_day = j.at("snapshot_day").get<std::size_t>();
    r.metadata = j.at("metadata");
    return r;
}

inline nlohmann::json to_json(const MetricsRow& row) {
    nlohmann::json j;
    j["seed"] = row.seed;
    j["strategy"] = row.strategy;
    j["band_plan"] = row.band_plan;
    const auto& cols = scalar_columns();
    for (std::size_t c = 0; c < cols.size(); ++c)
        j[cols[c]] = row.values[c] ? nlohmann::json(*row.values[c]) : nlohmann::json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Files

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

/// Per-seed rows followed by the mean and std rows of each (strategy, band plan) group.
inline std::string render_metrics_csv(const std::vector<MetricsReport>& reports) {
    std::vector<MetricsRow> rows;
    std::map<std::pair<std::string, std::string>, std::vector<MetricsRow>> groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : reports) {
        auto row = to_row(r);
        auto key = std::make_pair(r.strategy, r.band_plan);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(row);
    }
    for (const auto& key : order) {
        const auto& g = groups[key];
        rows.insert(rows.end(), g.begin(), g.end());
        auto agg = aggregate(g);
        rows.push_back(agg.mean);
        rows.push_back(agg.std);
    }
    std::ostringstream out;
    write_metrics_csv(out, rows);
    return out.str();
}

/// Long format: one row per (report, day, hour).
inline std::string render_utilization_csv(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << "seed,strategy,band_plan,day,hour,utilization\n";
    for (const auto& r : reports)
        for (std::size_t d = 0; d < r.hourly_utilization.size(); ++d)
            for (std::size_t h = 0; h < 24; ++h)
                out << r.seed << ',' << r.strategy << ',' << r.band_plan << ',' << d << ',' << h << ','
                    << format_number(r.hourly_utilization[d][h]) << '\n';
    return out.str();
}

inline std::string render_reports_json(const std::vector<MetricsReport>& reports) {
    nlohmann::json j;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    return j.dump(2) + "\n";
}

inline std::vector<MetricsReport> parse_reports_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<MetricsReport> out;
    for (const auto& r : j.at("reports")) out.push_back(report_from_json(r));
    return out;
}

enum class ExportFormat { Csv, Json };

/// Writes bp.csv + utilization.csv (Csv) or report.json (Json) into `dir`.
inline void export_reports(const std::vector<MetricsReport>& reports, const std::filesystem::path& dir,
                           ExportFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    if (format == ExportFormat::Csv) {
        write_file_atomic(dir / "bp.csv", render_metrics_csv(reports));
        write_file_atomic(dir / "utilization.csv", render_utilization_csv(reports));
    } else {
        write_file_atomic(dir / "report.json", render_reports_json(reports));
    }
}

} // namespace daca

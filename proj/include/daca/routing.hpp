#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "daca/qot.hpp"
#include "daca/spectrum.hpp"
#include "daca/topology.hpp"

namespace daca {

struct Path {
    std::vector<NodeIndex> nodes;
    std::vector<LinkIndex> links;
    double length_km = 0.0;

    friend bool operator==(const Path& a, const Path& b) { return a.nodes == b.nodes; }
};

/// Builds a path from a node sequence, summing lengths from the source end.
inline Path make_path(const Topology& topo, std::vector<NodeIndex> nodes) {
    Path p;
    p.nodes = std::move(nodes);
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        LinkIndex l = topo.link_between(p.nodes[i], p.nodes[i + 1]);
        if (l == kNoLink) throw ConfigError("path uses a nonexistent link");
        p.links.push_back(l);
        p.length_km += topo.link(l).length_km;
    }
    return p;
}

/// Strict weak order: total length first, then node-id sequence lexicographically.
inline bool path_less(const Topology& topo, const Path& a, const Path& b) {
    if (a.length_km != b.length_km) return a.length_km < b.length_km;
    const auto& rank = topo.id_rank();
    return std::lexicographical_compare(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
                                        [&](NodeIndex x, NodeIndex y) { return rank[x] < rank[y]; });
}

namespace detail {

/// Shortest path from `src` to `dst` avoiding banned nodes and links; among
/// equal-length paths, the lexicographically smallest node-id sequence.
inline std::optional<std::vector<NodeIndex>> constrained_shortest(const Topology& topo, NodeIndex src,
                                                                  NodeIndex dst,
                                                                  const std::vector<bool>& banned_node,
                                                                  const std::vector<bool>& banned_link) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = topo.node_count();
    if (banned_node[src] || banned_node[dst]) return std::nullopt;

    // distances to dst; the graph is undirected
    std::vector<double> dist(n, inf);
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[dst] = 0.0;
    pq.emplace(0.0, dst);
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u]) continue;
        for (auto [v, l] : topo.adjacent(u)) {
            if (banned_node[v] || banned_link[l]) continue;
            const double nd = du + topo.link(l).length_km;
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    if (dist[src] == inf) return std::nullopt;

    const auto& rank = topo.id_rank();
    std::vector<NodeIndex> nodes{src};
    NodeIndex u = src;
    while (u != dst) {
        NodeIndex best = n;
        for (auto [v, l] : topo.adjacent(u)) {
            if (banned_node[v] || banned_link[l] || dist[v] == inf) continue;
            const double via = topo.link(l).length_km + dist[v];
            if (std::abs(via - dist[u]) <= 1e-9 * std::max(1.0, dist[u]) && (best == n || rank[v] < rank[best]))
                best = v;
        }
        nodes.push_back(best);
        u = best;
    }
    return nodes;
}

} // namespace detail

/// Up to k loopless paths from s to d in (length, node-id sequence) order (Yen).
inline std::vector<Path> k_shortest_paths(const Topology& topo, NodeIndex s, NodeIndex d, std::size_t k) {
    std::vector<Path> found;
    if (k == 0 || s == d) return found;
    std::vector<bool> banned_node(topo.node_count(), false);
    std::vector<bool> banned_link(topo.link_count(), false);
    auto first = detail::constrained_shortest(topo, s, d, banned_node, banned_link);
    if (!first) return found;
    found.push_back(make_path(topo, std::move(*first)));

    auto cmp = [&](const Path& a, const Path& b) { return path_less(topo, a, b); };
    std::vector<Path> candidates;
    while (found.size() < k) {
        const Path& prev = found.back();
        for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
            std::fill(banned_node.begin(), banned_node.end(), false);
            std::fill(banned_link.begin(), banned_link.end(), false);
            for (const auto& p : found)
                if (p.nodes.size() > i + 1 && std::equal(prev.nodes.begin(), prev.nodes.begin() + i + 1,
                                                         p.nodes.begin()))
                    banned_link[p.links[i]] = true;
            for (std::size_t j = 0; j < i; ++j) banned_node[prev.nodes[j]] = true;

            auto spur = detail::constrained_shortest(topo, prev.nodes[i], d, banned_node, banned_link);
            if (!spur) continue;
            std::vector<NodeIndex> total(prev.nodes.begin(), prev.nodes.begin() + i);
            total.insert(total.end(), spur->begin(), spur->end());
            Path cand = make_path(topo, std::move(total));
            if (std::find(found.begin(), found.end(), cand) == found.end() &&
                std::find(candidates.begin(), candidates.end(), cand) == candidates.end())
                candidates.push_back(std::move(cand));
        }
        if (candidates.empty()) break;
        auto best = std::min_element(candidates.begin(), candidates.end(), cmp);
        found.push_back(std::move(*best));
        candidates.erase(best);
    }
    return found;
}

/// Lazily computed k-shortest paths per ordered node pair.
class RouteTable {
public:
    RouteTable(const Topology& topo, std::size_t k) : topo_(&topo), k_(k) {}

    const std::vector<Path>& paths(NodeIndex s, NodeIndex d) {
        auto key = std::make_pair(s, d);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, k_shortest_paths(*topo_, s, d, k_)).first;
        return it->second;
    }

    std::size_t k() const { return k_; }

private:
    const Topology* topo_;
    std::size_t k_;
    std::map<std::pair<NodeIndex, NodeIndex>, std::vector<Path>> cache_;
};

struct RoutingParams {
    std::size_t k = 3;
    std::size_t max_slots_per_lightpath = 4;

    void validate() const {
        if (k == 0) throw ConfigError("routing.k must be positive");
        if (max_slots_per_lightpath == 0) throw ConfigError("routing.max_slots_per_lightpath must be positive");
    }
};

struct CandidatePlan {
    const Path* path = nullptr;
    SlotRange slots;
    double gsnr_db = 0.0;
    double rate_gbps = 0.0; // achievable rate on the chosen slots
    std::string modulation;
};

/// Routing and spectrum assignment: paths in order, then slot counts 1..cap,
/// then first-fit positions in (band, start) order; the first candidate whose
/// achievable rate covers `rate_gbps` wins. GSNR depends on the band but not on
/// the start slot, so only the lowest free range of each band is evaluated.
inline std::optional<CandidatePlan> rsa(double rate_gbps, std::span<const Path> paths, const Topology& topo,
                                        const SpectrumGrid& grid, const QotModel& qot,
                                        std::size_t max_slots) {
    for (const auto& path : paths) {
        for (std::size_t n = 1; n <= max_slots; ++n) {
            bool room = false;
            for (Band b : grid.plan().bands) {
                auto range = first_fit_in_band(grid, path.links, b, n);
                if (!range) continue;
                room = true;
                auto rep = qot.evaluate(topo, path.links, *range, grid);
                const double achievable = rep.slot_rate_gbps * static_cast<double>(n);
                if (achievable >= rate_gbps)
                    return CandidatePlan{&path, *range, rep.gsnr_db, achievable, rep.modulation};
            }
            if (!room) break; // no room for n slots means no room for more
        }
    }
    return std::nullopt;
}

} // namespace daca

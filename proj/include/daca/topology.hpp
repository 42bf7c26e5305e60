#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daca/common.hpp"

namespace daca {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

inline constexpr LinkIndex kNoLink = static_cast<LinkIndex>(-1);

struct NodeSpec {
    std::string id;
    double gen_prob = 0.0;
};

struct LinkSpec {
    NodeIndex a = 0;
    NodeIndex b = 0;
    double length_km = 0.0;
};

/// Undirected weighted graph with per-node traffic generation probabilities.
/// Immutable once constructed; the constructor validates every invariant.
class Topology {
public:
    static constexpr double kProbTolerance = 1e-9;

    Topology() = default;

    Topology(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links)
        : nodes_(std::move(nodes)), links_(std::move(links)) {
        validate();
        build_index();
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<LinkSpec>& links() const { return links_; }
    const NodeSpec& node(NodeIndex n) const { return nodes_.at(n); }
    const LinkSpec& link(LinkIndex l) const { return links_.at(l); }

    /// Neighbours of `n` as (neighbour, link) pairs.
    const std::vector<std::pair<NodeIndex, LinkIndex>>& adjacent(NodeIndex n) const {
        return adjacency_.at(n);
    }

    LinkIndex link_between(NodeIndex a, NodeIndex b) const {
        auto it = link_lookup_.find(std::minmax(a, b));
        return it == link_lookup_.end() ? kNoLink : it->second;
    }

    std::optional<NodeIndex> find(std::string_view id) const {
        for (NodeIndex i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].id == id) return i;
        return std::nullopt;
    }

    /// Position of each node in ascending id order; used for lexicographic tie-breaks.
    const std::vector<std::size_t>& id_rank() const { return id_rank_; }

    double mean_link_length() const {
        double total = 0.0;
        for (const auto& l : links_) total += l.length_km;
        return links_.empty() ? 0.0 : total / static_cast<double>(links_.size());
    }

private:
    void validate() const {
        if (nodes_.size() < 2) throw ConfigError("topology needs at least 2 nodes");
        std::set<std::string> ids;
        double sum = 0.0;
        for (const auto& n : nodes_) {
            if (n.id.empty()) throw ConfigError("topology node with empty id");
            if (!ids.insert(n.id).second) throw ConfigError("duplicate node id '" + n.id + "'");
            if (!(n.gen_prob >= 0.0 && n.gen_prob <= 1.0))
                throw ConfigError("gen_prob of node '" + n.id + "' outside [0,1]");
            sum += n.gen_prob;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw ConfigError("node gen_prob values must sum to 1 (got " + std::to_string(sum) + ")");

        std::set<std::pair<NodeIndex, NodeIndex>> seen;
        for (const auto& l : links_) {
            if (l.a >= nodes_.size() || l.b >= nodes_.size())
                throw ConfigError("link endpoint out of range");
            if (l.a == l.b) throw ConfigError("self-loop on node '" + nodes_[l.a].id + "'");
            if (!(l.length_km > 0.0))
                throw ConfigError("nonpositive length on link " + nodes_[l.a].id + "-" + nodes_[l.b].id);
            if (!seen.insert(std::minmax(l.a, l.b)).second)
                throw ConfigError("duplicate link " + nodes_[l.a].id + "-" + nodes_[l.b].id);
        }

        // connectivity
        std::vector<std::vector<NodeIndex>> adj(nodes_.size());
        for (const auto& l : links_) {
            adj[l.a].push_back(l.b);
            adj[l.b].push_back(l.a);
        }
        std::vector<bool> reached(nodes_.size(), false);
        std::vector<NodeIndex> stack{0};
        reached[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            NodeIndex u = stack.back();
            stack.pop_back();
            for (NodeIndex v : adj[u])
                if (!reached[v]) {
                    reached[v] = true;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != nodes_.size()) throw ConfigError("topology graph is disconnected");
    }

    void build_index() {
        adjacency_.assign(nodes_.size(), {});
        for (LinkIndex i = 0; i < links_.size(); ++i) {
            const auto& l = links_[i];
            adjacency_[l.a].emplace_back(l.b, i);
            adjacency_[l.b].emplace_back(l.a, i);
            link_lookup_[std::minmax(l.a, l.b)] = i;
        }
        std::vector<NodeIndex> order(nodes_.size());
        std::iota(order.begin(), order.end(), NodeIndex{0});
        std::sort(order.begin(), order.end(),
                  [&](NodeIndex x, NodeIndex y) { return nodes_[x].id < nodes_[y].id; });
        id_rank_.assign(nodes_.size(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
    }

    std::vector<NodeSpec> nodes_;
    std::vector<LinkSpec> links_;
    std::vector<std::vector<std::pair<NodeIndex, LinkIndex>>> adjacency_;
    std::map<std::pair<NodeIndex, NodeIndex>, LinkIndex> link_lookup_;
    std::vector<std::size_t> id_rank_;
};

/// Builds a topology from its JSON rendering:
/// `{ "nodes": [{"id", "gen_prob"}], "links": [{"a", "b", "length_km"}] }`.
inline Topology topology_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("links"))
        throw ConfigError("topology document needs 'nodes' and 'links' arrays");
    std::vector<NodeSpec> nodes;
    std::map<std::string, NodeIndex> index;
    try {
        for (const auto& n : doc.at("nodes")) {
            NodeSpec spec{n.at("id").get<std::string>(), n.at("gen_prob").get<double>()};
            index.emplace(spec.id, nodes.size());
            nodes.push_back(std::move(spec));
        }
        std::vector<LinkSpec> links;
        for (const auto& l : doc.at("links")) {
            auto a = l.at("a").get<std::string>();
            auto b = l.at("b").get<std::string>();
            if (!index.count(a) || !index.count(b))
                throw ConfigError("link " + a + "-" + b + " references an unknown node");
            links.push_back({index.at(a), index.at(b), l.at("length_km").get<double>()});
        }
        return Topology(std::move(nodes), std::move(links));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed topology: ") + e.what());
    }
}

inline nlohmann::json topology_to_json(const Topology& topo) {
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : topo.nodes()) doc["nodes"].push_back({{"id", n.id}, {"gen_prob", n.gen_prob}});
    doc["links"] = nlohmann::json::array();
    for (const auto& l : topo.links())
        doc["links"].push_back(
            {{"a", topo.node(l.a).id}, {"b", topo.node(l.b).id}, {"length_km", l.length_km}});
    return doc;
}

inline Topology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open topology file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("parse error in topology file '" + path.string() + "': " + e.what());
    }
    try {
        return topology_from_json(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Gravity-model endpoint sampler. The source follows gen_prob; the
/// destination follows gen_prob renormalised over the other nodes, or is
/// uniform over them when all of those weights are zero.
class GravitySampler {
public:
    explicit GravitySampler(const Topology& topo) {
        std::vector<double> w;
        for (const auto& n : topo.nodes()) w.push_back(n.gen_prob);
        source_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
        for (NodeIndex s = 0; s < w.size(); ++s) {
            std::vector<double> d = w;
            d[s] = 0.0;
            if (std::accumulate(d.begin(), d.end(), 0.0) <= 0.0) {
                std::fill(d.begin(), d.end(), 1.0);
                d[s] = 0.0;
            }
            dest_.emplace_back(d.begin(), d.end());
        }
    }

    template <class Rng>
    std::pair<NodeIndex, NodeIndex> operator()(Rng& rng) {
        NodeIndex s = source_(rng);
        NodeIndex d = dest_[s](rng);
        return {s, d};
    }

private:
    std::discrete_distribution<std::size_t> source_;
    std::vector<std::discrete_distribution<std::size_t>> dest_;
};

template <class Rng>
std::pair<NodeIndex, NodeIndex> sample_endpoints(const Topology& topo, Rng& rng) {
    return GravitySampler(topo)(rng);
}

} // namespace daca

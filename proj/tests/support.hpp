#pragma once

#include <memory>
#include <string>
#include <vector>

#include "daca/daca.hpp"

namespace daca::fx {

inline std::string source_path(const std::string& rel) { return std::string(DACA_SOURCE_DIR) + "/" + rel; }

/// Nodes named A, B, C, ... with equal generation probability.
inline Topology make_topology(std::size_t n, const std::vector<std::tuple<NodeIndex, NodeIndex, double>>& links) {
    std::vector<NodeSpec> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({std::string(1, static_cast<char>('A' + i)), 1.0 / n});
    std::vector<LinkSpec> ls;
    for (auto [a, b, len] : links) ls.push_back({a, b, len});
    return Topology(std::move(nodes), std::move(ls));
}

inline Topology line2(double len = 50.0) { return make_topology(2, {{0, 1, len}}); }

/// A-B, B-C, A-C at unit lengths.
inline Topology triangle() { return make_topology(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

inline Topology bt_uk() { return load_topology(source_path("data/bt_uk.json")); }

/// Config over an in-memory topology, with the user document merged over defaults.
inline SimConfig make_config(const Topology& topo, nlohmann::json user = nlohmann::json::object()) {
    return parse_config(user, ".", std::make_shared<const Topology>(topo));
}

/// A single-type traffic document: all other classes switched off.
inline nlohmann::json only_type(const std::string& type, nlohmann::json overrides = nlohmann::json::object()) {
    nlohmann::json types = nlohmann::json::object();
    for (auto t : kAllTrafficTypes) {
        const std::string name(to_string(t));
        if (name != type) types[name] = nullptr;
    }
    types[type] = overrides;
    return {{"traffic", {{"types", types}}}};
}

} // namespace daca::fx

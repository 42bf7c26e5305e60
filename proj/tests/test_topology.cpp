#include <gtest/gtest.h>

#include <map>
#include <random>

#include "support.hpp"

using namespace daca;
using daca::fx::make_topology;

TEST(Topology, LoadsBundledNetwork) {
    auto topo = fx::bt_uk();
    EXPECT_EQ(topo.node_count(), 22u);
    EXPECT_EQ(topo.link_count(), 35u);
    EXPECT_NEAR(topo.mean_link_length(), 147.0, 1.0);
    double sum = 0.0;
    for (const auto& n : topo.nodes()) sum += n.gen_prob;
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Topology, TwoNodesSingleLink) {
    auto topo = make_topology(2, {{0, 1, 50.0}});
    EXPECT_EQ(topo.link_between(0, 1), 0u);
    EXPECT_EQ(topo.link_between(1, 0), 0u);
    EXPECT_EQ(topo.adjacent(0).size(), 1u);
}

TEST(Topology, RejectsProbabilitiesNotSummingToOne) {
    EXPECT_THROW(Topology({{"A", 0.6}, {"B", 0.6}}, {{0, 1, 10.0}}), ConfigError);
}

TEST(Topology, RejectsInvalidGraphs) {
    EXPECT_THROW(Topology({{"A", 0.5}, {"B", 0.5}, {"C", 0.0}}, {{0, 1, 10.0}}), ConfigError); // disconnected
    EXPECT_THROW(Topology({{"A", 0.5}, {"B", 0.5}}, {{0, 1, 0.0}}), ConfigError);
    EXPECT_THROW(Topology({{"A", 0.5}, {"B", 0.5}}, {{0, 1, -3.0}}), ConfigError);
    EXPECT_THROW(Topology({{"A", 0.5}, {"A", 0.5}}, {{0, 1, 1.0}}), ConfigError);
    EXPECT_THROW(Topology({{"A", 0.5}, {"B", 0.5}}, {{0, 1, 1.0}, {1, 0, 2.0}}), ConfigError);
    EXPECT_THROW(Topology({{"A", 0.5}, {"B", 0.5}}, {{0, 0, 1.0}, {0, 1, 2.0}}), ConfigError);
    EXPECT_THROW(Topology({{"A", 1.0}}, {}), ConfigError);
}

TEST(Topology, JsonRoundTrip) {
    auto topo = fx::bt_uk();
    auto again = topology_from_json(topology_to_json(topo));
    ASSERT_EQ(again.node_count(), topo.node_count());
    for (LinkIndex l = 0; l < topo.link_count(); ++l) {
        EXPECT_EQ(again.link(l).a, topo.link(l).a);
        EXPECT_EQ(again.link(l).b, topo.link(l).b);
        EXPECT_EQ(again.link(l).length_km, topo.link(l).length_km);
    }
}

TEST(Topology, MissingFileNamesPath) {
    try {
        load_topology("/no/such/topology.json");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/topology.json"), std::string::npos);
    }
}

namespace {

std::map<std::pair<NodeIndex, NodeIndex>, double> pair_frequencies(const Topology& topo, int draws) {
    std::mt19937_64 rng(17);
    GravitySampler sample(topo);
    std::map<std::pair<NodeIndex, NodeIndex>, double> freq;
    for (int i = 0; i < draws; ++i) {
        auto p = sample(rng);
        EXPECT_NE(p.first, p.second);
        freq[p] += 1.0 / draws;
    }
    return freq;
}

Topology three_nodes(double a, double b, double c) {
    return Topology({{"A", a}, {"B", b}, {"C", c}}, {{0, 1, 1.0}, {1, 2, 1.0}});
}

} // namespace

// Gravity model: P(s, d) = p_s * p_d / (1 - p_s).
TEST(Gravity, EqualWeightsGiveUniformOrderedPairs) {
    auto freq = pair_frequencies(three_nodes(1.0 / 3, 1.0 / 3, 1.0 / 3), 1'000'000);
    EXPECT_EQ(freq.size(), 6u);
    for (const auto& [pair, f] : freq) EXPECT_NEAR(f, 1.0 / 6.0, 0.01);
}

TEST(Gravity, ZeroWeightNodeNeverAppears) {
    auto freq = pair_frequencies(three_nodes(0.5, 0.5, 0.0), 200'000);
    EXPECT_NEAR((freq[{0, 1}]), 0.5, 0.01);
    EXPECT_NEAR((freq[{1, 0}]), 0.5, 0.01);
    EXPECT_EQ(freq.count({0, 2}) + freq.count({2, 0}) + freq.count({1, 2}) + freq.count({2, 1}), 0u);
}

TEST(Gravity, DestinationFallsBackToUniform) {
    auto freq = pair_frequencies(three_nodes(1.0, 0.0, 0.0), 200'000);
    EXPECT_NEAR((freq[{0, 1}]), 0.5, 0.01);
    EXPECT_NEAR((freq[{0, 2}]), 0.5, 0.01);
}

TEST(Gravity, ChiSquareOnBundledNetwork) {
    auto topo = fx::bt_uk();
    const int draws = 400'000;
    auto freq = pair_frequencies(topo, draws);
    double chi2 = 0.0;
    int cells = 0;
    for (NodeIndex s = 0; s < topo.node_count(); ++s)
        for (NodeIndex d = 0; d < topo.node_count(); ++d) {
            if (s == d) continue;
            const double ps = topo.node(s).gen_prob, pd = topo.node(d).gen_prob;
            const double expected = draws * ps * pd / (1.0 - ps);
            if (expected < 5.0) continue;
            const double observed = freq[{s, d}] * draws;
            chi2 += (observed - expected) * (observed - expected) / expected;
            ++cells;
        }
    // mean cells-1, std sqrt(2(cells-1)); allow 5 sigma
    EXPECT_LT(chi2, (cells - 1) + 5.0 * std::sqrt(2.0 * (cells - 1)));
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace daca;

namespace {

const TrafficTypeSpec& spec_of(const std::vector<TrafficTypeSpec>& table, TrafficType t) {
    for (const auto& s : table)
        if (s.type == t) return s;
    throw std::logic_error("missing type");
}

} // namespace

TEST(TrafficTable, DefaultValues) {
    auto table = default_table1();
    ASSERT_EQ(table.size(), 5u);
    for (const auto& s : table) EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(spec_of(table, TrafficType::T2a).phi, 0.5);
    EXPECT_EQ(spec_of(table, TrafficType::T3b).rates_gbps, std::vector<double>{400.0});
    EXPECT_FALSE(spec_of(table, TrafficType::T1).delta_min);
    EXPECT_FALSE(spec_of(table, TrafficType::T1).phi);
    EXPECT_FALSE(spec_of(table, TrafficType::T2b).delta_min);
    EXPECT_EQ(spec_of(table, TrafficType::T3b).delta_min->min, 360.0);
    EXPECT_EQ(spec_of(table, TrafficType::T3b).delta_min->max, 720.0);
}

TEST(TrafficTable, ValidationMatchesTypeTraits) {
    auto s = spec_of(default_table1(), TrafficType::T1);
    s.phi = 0.5;
    EXPECT_THROW(s.validate(), ConfigError);
    auto d = spec_of(default_table1(), TrafficType::T2b);
    d.delta_min = MinuteInterval{1, 2};
    EXPECT_THROW(d.validate(), ConfigError);
}

TEST(Arrivals, MeanInterArrivalMatchesRate) {
    TrafficTypeSpec s = spec_of(default_table1(), TrafficType::T1);
    s.lambda_peak = 2.0;
    s.lambda_offpeak = 2.0;
    PeakSchedule sched;
    std::mt19937_64 rng(1);
    const int n = 100'000;
    double t = 0.0;
    for (int i = 0; i < n; ++i) t = next_arrival(s, t, sched, 1.0, rng);
    EXPECT_NEAR(t / n, 0.5, 0.5 * 0.02);
}

TEST(Arrivals, PeakWindowCountIsPoisson) {
    TrafficTypeSpec s = spec_of(default_table1(), TrafficType::T1);
    s.lambda_peak = 0.05;
    s.lambda_offpeak = 0.001;
    PeakSchedule sched;
    std::mt19937_64 rng(3);
    const double from = static_cast<double>(sched.p_s), to = static_cast<double>(sched.p_e);
    int count = 0;
    for (double t = next_arrival(s, from, sched, 1.0, rng); t < to; t = next_arrival(s, t, sched, 1.0, rng)) ++count;
    const double mean = 0.05 * (to - from);
    EXPECT_LT(std::abs(count - mean), 3.0 * std::sqrt(mean));
}

TEST(Arrivals, ZeroRateSliceDefersToNextBoundary) {
    TrafficTypeSpec s = spec_of(default_table1(), TrafficType::T1);
    s.lambda_peak = 1.0;
    s.lambda_offpeak = 0.0;
    PeakSchedule sched;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        double t = next_arrival(s, 0.0, sched, 1.0, rng);
        EXPECT_GE(t, static_cast<double>(sched.p_s));
        EXPECT_TRUE(sched.is_peak(t));
    }
    s.lambda_peak = 0.0;
    EXPECT_TRUE(std::isinf(next_arrival(s, 0.0, sched, 1.0, rng)));
}

TEST(Requests, TypeThreeBDelayRange) {
    auto spec = spec_of(default_table1(), TrafficType::T3b);
    auto topo = fx::bt_uk();
    GravitySampler g(topo);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10'000; ++i) {
        auto r = make_request(spec, g, 100.0, rng);
        EXPECT_GE(r.delta_ticks, 360 * kTicksPerMinute);
        EXPECT_LE(r.delta_ticks, 720 * kTicksPerMinute);
        EXPECT_GE(r.tau_ticks, 360 * kTicksPerMinute);
        EXPECT_LE(r.tau_ticks, 600 * kTicksPerMinute);
        EXPECT_EQ(r.gamma_gbps, 400.0);
        EXPECT_EQ(r.gamma_min_gbps, 400.0);
        EXPECT_NE(r.s, r.d);
    }
}

TEST(Requests, RateDrawIsUniformOverSet) {
    auto spec = spec_of(default_table1(), TrafficType::T2a);
    auto topo = fx::bt_uk();
    GravitySampler g(topo);
    std::mt19937_64 rng(8);
    const int n = 100'000;
    int low = 0;
    for (int i = 0; i < n; ++i) {
        auto r = make_request(spec, g, 0.0, rng);
        low += r.gamma_gbps == 200.0;
        EXPECT_EQ(r.gamma_min_gbps, 0.5 * r.gamma_gbps);
    }
    EXPECT_NEAR(static_cast<double>(low) / n, 0.5, 0.01);
}

TEST(Generator, IdsIncreaseAndTimesAreOrdered) {
    auto topo = fx::bt_uk();
    TrafficGenerator gen(default_table1(), topo, PeakSchedule{}, 1.0 / 1000.0, 1);
    auto reqs = gen.take(3000);
    ASSERT_EQ(reqs.size(), 3000u);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        EXPECT_EQ(reqs[i].id, static_cast<std::int64_t>(i));
        EXPECT_EQ(reqs[i].arrived_at, static_cast<Tick>(std::floor(reqs[i].arrival_time)));
        if (i) {
            EXPECT_LE(reqs[i - 1].arrived_at, reqs[i].arrived_at);
        }
    }
}

TEST(Generator, SameSeedSameStream) {
    auto topo = fx::bt_uk();
    TrafficGenerator a(default_table1(), topo, PeakSchedule{}, 1.0 / 1000.0, 42);
    TrafficGenerator b(default_table1(), topo, PeakSchedule{}, 1.0 / 1000.0, 42);
    TrafficGenerator c(default_table1(), topo, PeakSchedule{}, 1.0 / 1000.0, 43);
    auto ra = a.take(2000), rb = b.take(2000), rc = c.take(2000);
    EXPECT_EQ(stream_hash(ra), stream_hash(rb));
    EXPECT_NE(stream_hash(ra), stream_hash(rc));
}

TEST(Generator, AllRatesZeroYieldsNothing) {
    auto table = default_table1();
    for (auto& s : table) s.lambda_peak = s.lambda_offpeak = 0.0;
    TrafficGenerator gen(table, fx::bt_uk(), PeakSchedule{}, 1.0, 1);
    EXPECT_TRUE(gen.take(10).empty());
}

TEST(Generator, TypeMixFollowsRates) {
    auto topo = fx::bt_uk();
    auto table = default_table1();
    TrafficGenerator gen(table, topo, PeakSchedule{}, 1.0 / 1000.0, 5);
    auto reqs = gen.take(20000);
    double peak_total = 0.0;
    for (const auto& s : table) peak_total += s.lambda_peak;
    std::array<int, kTrafficTypeCount> peak_counts{};
    int peak_n = 0;
    PeakSchedule sched;
    for (const auto& r : reqs)
        if (sched.is_peak(r.arrival_time)) {
            ++peak_counts[index_of(r.type)];
            ++peak_n;
        }
    ASSERT_GT(peak_n, 5000);
    for (const auto& s : table) {
        const double p = s.lambda_peak / peak_total;
        const double sigma = std::sqrt(p * (1 - p) / peak_n);
        EXPECT_NEAR(static_cast<double>(peak_counts[index_of(s.type)]) / peak_n, p, 4 * sigma);
    }
}

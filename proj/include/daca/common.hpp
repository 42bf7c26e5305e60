#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace daca {

/// Simulation time in ticks. One tick is one second.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerMinute = 60;
inline constexpr Tick kTicksPerHour = 3600;
inline constexpr Tick kTicksPerDay = 24 * kTicksPerHour;

inline constexpr Tick tick_of_day(Tick t) {
    Tick r = t % kTicksPerDay;
    return r < 0 ? r + kTicksPerDay : r;
}

inline constexpr Tick day_start(Tick t) { return t - tick_of_day(t); }

/// Raised for malformed or inconsistent user input (config, topology file).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TrafficType : std::uint8_t { T1 = 0, T2a, T2b, T3a, T3b };

inline constexpr std::size_t kTrafficTypeCount = 5;
inline constexpr std::array<TrafficType, kTrafficTypeCount> kAllTrafficTypes = {
    TrafficType::T1, TrafficType::T2a, TrafficType::T2b, TrafficType::T3a, TrafficType::T3b};

inline constexpr std::size_t index_of(TrafficType t) { return static_cast<std::size_t>(t); }

inline constexpr std::string_view to_string(TrafficType t) {
    switch (t) {
    case TrafficType::T1: return "1";
    case TrafficType::T2a: return "2a";
    case TrafficType::T2b: return "2b";
    case TrafficType::T3a: return "3a";
    case TrafficType::T3b: return "3b";
    }
    return "?";
}

inline std::optional<TrafficType> parse_traffic_type(std::string_view s) {
    for (auto t : kAllTrafficTypes)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

inline constexpr bool is_compressible(TrafficType t) {
    return t == TrafficType::T2a || t == TrafficType::T2b;
}

inline constexpr bool is_delayable(TrafficType t) {
    return t == TrafficType::T2a || t == TrafficType::T3a || t == TrafficType::T3b;
}

/// 64-bit FNV-1a, used for config and request-stream fingerprints.
class Fnv1a {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string to_hex(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

} // namespace daca

#pragma once

#include <algorithm>
#include <cmath>

#include "daca/common.hpp"

namespace daca {

/// Daily peak window [p_s, p_e), the type-3b release point p'_e = p_e + m, and
/// the re-estimation periods inside (t_p) and outside (t_o) the peak window.
struct PeakSchedule {
    Tick p_s = 8 * kTicksPerHour;
    Tick p_e = 20 * kTicksPerHour;
    Tick p_e_prime = 22 * kTicksPerHour;
    Tick t_p = 10;
    Tick t_o = 100;

    void validate() const {
        if (!(0 <= p_s && p_s < p_e && p_e < p_e_prime && p_e_prime <= kTicksPerDay))
            throw ConfigError("schedule must satisfy 0 <= p_s < p_e < p_e' <= 24h");
        if (!(t_p > 0 && t_p <= t_o)) throw ConfigError("schedule must satisfy 0 < t_p <= t_o");
    }

    bool is_peak(Tick t) const {
        const Tick tod = tick_of_day(t);
        return tod >= p_s && tod < p_e;
    }

    bool is_peak(double seconds) const {
        const double tod = std::fmod(seconds, static_cast<double>(kTicksPerDay));
        return tod >= static_cast<double>(p_s) && tod < static_cast<double>(p_e);
    }

    /// First peak/off-peak boundary strictly after `t`.
    Tick next_boundary(Tick t) const {
        const Tick base = day_start(t);
        const Tick tod = t - base;
        if (tod < p_s) return base + p_s;
        if (tod < p_e) return base + p_e;
        return base + kTicksPerDay + p_s;
    }

    double next_boundary(double seconds) const {
        const double day = static_cast<double>(kTicksPerDay);
        const double base = std::floor(seconds / day) * day;
        const double tod = seconds - base;
        if (tod < static_cast<double>(p_s)) return base + static_cast<double>(p_s);
        if (tod < static_cast<double>(p_e)) return base + static_cast<double>(p_e);
        return base + day + static_cast<double>(p_s);
    }

    /// Re-estimation cadence: every t_p in peak, every t_o off-peak, re-synced at boundaries.
    Tick next_reestimate(Tick t) const {
        return std::min(t + (is_peak(t) ? t_p : t_o), next_boundary(t));
    }

    /// When `deadline` (arrival + delay budget) falls strictly inside (p_s, p'_e)
    /// of its day, the tick p'_e of that day; otherwise -1.
    Tick deferral_target(Tick deadline) const {
        const Tick tod = tick_of_day(deadline);
        if (tod > p_s && tod < p_e_prime) return day_start(deadline) + p_e_prime;
        return -1;
    }
};

} // namespace daca

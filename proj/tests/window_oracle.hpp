#pragma once

// Brute-force window index sets: scan every past slot and keep those that land in
// the target range after stepping forward a whole number of days or weeks.

#include "rstgcn/windows.hpp"

#include <vector>

namespace rstgcn::testing {

inline std::vector<std::size_t> walk_back(std::size_t t0, std::size_t t_p, std::size_t groups, std::size_t stride) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s <= t0; ++s)
        for (std::size_t m = 1; m <= groups; ++m) {
            const std::size_t ahead = s + m * stride;
            if (ahead >= t0 + 1 && ahead <= t0 + t_p) {
                out.push_back(s);
                break;
            }
        }
    return out;
}

inline std::vector<std::size_t> oracle_recent(std::size_t t0, const windows::WindowConfig& c) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s <= t0; ++s)
        if (t0 - s < c.t_h) out.push_back(s);
    return out;
}

inline std::vector<std::size_t> oracle_daily(std::size_t t0, const windows::WindowConfig& c) {
    return walk_back(t0, c.t_p, c.t_d / c.t_p, c.q);
}

inline std::vector<std::size_t> oracle_weekly(std::size_t t0, const windows::WindowConfig& c) {
    return walk_back(t0, c.t_p, c.t_w / c.t_p, 7 * c.q);
}

} // namespace rstgcn::testing

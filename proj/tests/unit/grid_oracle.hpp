#pragma once

// Brute-force grid evaluation of the service-state KPIs, kept deliberately
// independent of the breakpoint implementation: everything here is integer
// cell arithmetic on a uniform grid.

#include <cstdint>
#include <vector>

#include "urllc/kpi.hpp"
#include "urllc/rng.hpp"

namespace grid_oracle {

using urllc::Tick;

inline constexpr Tick kCellTicks = 10'000; // 0.01 ms

struct GridTrace {
    std::vector<std::uint8_t> cells;
    Tick cell = kCellTicks;

    Tick horizon() const { return static_cast<Tick>(cells.size()) * cell; }
};

inline GridTrace sample(const urllc::kpi::BinarySignal& s, Tick cell = kCellTicks)
{
    GridTrace g;
    g.cell = cell;
    g.cells.assign(static_cast<std::size_t>(s.horizon_end() / cell), 0);
    const auto& bps = s.breakpoints();
    std::size_t bp = 0;
    int value = bps.front().value;
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        Tick t = static_cast<Tick>(i) * cell;
        while (bp + 1 < bps.size() && bps[bp + 1].time <= t) {
            ++bp;
            value = bps[bp].value;
        }
        g.cells[i] = static_cast<std::uint8_t>(value);
    }
    return g;
}

/// Z[i] = max of Y over cells [i - K, i], window clipped at the origin.
inline GridTrace survival(const GridTrace& y, Tick survival_ticks)
{
    GridTrace z;
    z.cell = y.cell;
    z.cells.assign(y.cells.size(), 0);
    const auto k = static_cast<std::int64_t>(survival_ticks / y.cell);
    std::int64_t last_one = -(k + 2);
    for (std::size_t i = 0; i < y.cells.size(); ++i) {
        if (y.cells[i]) last_one = static_cast<std::int64_t>(i);
        z.cells[i] = static_cast<std::int64_t>(i) - last_one <= k ? 1 : 0;
    }
    return z;
}

inline Tick uptime(const GridTrace& z, Tick a, Tick b)
{
    Tick up = 0;
    for (std::size_t i = static_cast<std::size_t>(a / z.cell);
         i < static_cast<std::size_t>(b / z.cell); ++i) {
        if (z.cells[i]) up += z.cell;
    }
    return up;
}

inline int crossings(const GridTrace& z, Tick a, Tick b)
{
    int count = 0;
    for (std::size_t i = 1; i < z.cells.size(); ++i) {
        Tick t = static_cast<Tick>(i) * z.cell;
        if (t < a || t >= b) continue;
        if (z.cells[i - 1] == 1 && z.cells[i] == 0) ++count;
    }
    return count;
}

/// Random piecewise-constant signal with breakpoints on the grid. Mean run
/// lengths differ for up and down runs so outages straddle typical survival
/// times.
inline urllc::kpi::BinarySignal random_signal(urllc::Rng& rng, Tick horizon,
                                              double mean_up_cells = 2000.0,
                                              double mean_down_cells = 300.0,
                                              Tick cell = kCellTicks)
{
    std::vector<urllc::kpi::Breakpoint> bps;
    int value = rng.uniform() < 0.5 ? 1 : 0;
    Tick t = 0;
    bps.push_back({0, value});
    for (;;) {
        double mean = value == 1 ? mean_up_cells : mean_down_cells;
        auto run = static_cast<Tick>(1 + std::floor(-mean * std::log1p(-rng.uniform())));
        t += run * cell;
        if (t >= horizon) break;
        value = 1 - value;
        bps.push_back({t, value});
    }
    return urllc::kpi::BinarySignal(std::move(bps), horizon);
}

} // namespace grid_oracle

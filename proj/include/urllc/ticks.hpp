#pragma once

#include <cmath>
#include <cstdint>

namespace urllc {

/// Simulation time is carried as integer nanosecond ticks so that KPI
/// integrals and window boundaries are exact. Doubles appear only at the
/// configuration surface and in derived statistics.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerSecond = 1'000'000'000;

inline Tick to_ticks(double seconds)
{
    return static_cast<Tick>(std::llround(seconds * static_cast<double>(kTicksPerSecond)));
}

inline double to_seconds(Tick t)
{
    return static_cast<double>(t) / static_cast<double>(kTicksPerSecond);
}

} // namespace urllc

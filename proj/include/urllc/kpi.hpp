#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "urllc/ticks.hpp"

namespace urllc::kpi {

struct Breakpoint {
    Tick time = 0;
    int value = 0; // 0 or 1

    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-constant, right-continuous binary signal on [0, horizon_end].
/// The value on [breakpoints[i].time, breakpoints[i+1].time) is
/// breakpoints[i].value; the last breakpoint's value extends to the horizon.
///
/// Invariants (checked on construction):
///  - first breakpoint at time 0, times strictly increasing, all < horizon_end
///    (a breakpoint exactly at the horizon would describe no time at all);
///  - consecutive values alternate (no redundant breakpoints);
///  - every value is 0 or 1.
class BinarySignal {
public:
    BinarySignal(std::vector<Breakpoint> breakpoints, Tick horizon_end);

    static BinarySignal constant(int value, Tick horizon_end);

    int value_at(Tick t) const;
    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    Tick horizon_end() const { return horizon_end_; }

    friend bool operator==(const BinarySignal&, const BinarySignal&) = default;

private:
    std::vector<Breakpoint> breakpoints_;
    Tick horizon_end_ = 0;
};

/// Incremental trace recorder used by the simulator. Collapses writes that
/// do not change the value and same-instant flip-flops.
class SignalBuilder {
public:
    explicit SignalBuilder(int initial_value);

    void set(Tick t, int value);
    int current() const { return breakpoints_.back().value; }

    /// Snapshot of the trace so far on [0, horizon_end].
    BinarySignal finish(Tick horizon_end) const;

private:
    std::vector<Breakpoint> breakpoints_;
};

/// Half-open observation window [t_start, t_end).
struct KpiWindow {
    Tick t_start = 0;
    Tick t_end = 0;

    Tick length() const { return t_end - t_start; }
    double length_s() const { return to_seconds(length()); }

    friend bool operator==(const KpiWindow&, const KpiWindow&) = default;
};

struct KpiEstimate {
    double availability = 1.0;   // dimensionless, in [0, 1]
    double crossing_rate = 0.0;  // 1/s, >= 0
    double downtime_mean_s = 0.0;
    KpiWindow window;
};

/// Application-layer state from the network-layer state: Z(t) is the max of
/// Y over [t - survival_time, t], clipped at 0 near the origin. Z(t) = 0
/// exactly where Y has been 0 for the whole lookback window.
BinarySignal survival_filter(const BinarySignal& y, Tick survival_time);

/// Exact uptime (integral of the signal) over a window, in ticks.
Tick uptime_in(const BinarySignal& z, KpiWindow w);

/// Number of 1->0 transitions with t_start <= t < t_end. A transition on the
/// start boundary belongs to this window, one on the end boundary to the next.
int downward_crossings_in(const BinarySignal& z, KpiWindow w);

/// Windowed availability estimate: uptime / window length.
double availability(const BinarySignal& z, KpiWindow w);

/// Windowed crossing-rate estimate: downward crossings / window length, 1/s.
double crossing_rate(const BinarySignal& z, KpiWindow w);

/// Mean outage length in the window: (|w| - uptime) / max(crossings, 1).
double mean_downtime_s(const BinarySignal& z, KpiWindow w);

/// Whole-horizon availability and mean uptime (uptime / max(crossings, 1)),
/// the finite-horizon surrogates of the long-run definitions.
std::pair<double, double> long_run_kpis(const BinarySignal& z);

KpiEstimate estimate(const BinarySignal& z, KpiWindow w);

/// Trace CSV: header `time_s,value`, one row per breakpoint, times printed
/// as exact decimal seconds (nanosecond resolution).
void write_trace_csv(std::ostream& out, const BinarySignal& signal);
BinarySignal read_trace_csv(std::istream& in, Tick horizon_end);

} // namespace urllc::kpi

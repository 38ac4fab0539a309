#include "urllc/kpi.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace urllc::kpi {

namespace {

void require(bool cond, const char* msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

/// Exact decimal rendering of a tick count as seconds (9 fractional digits).
std::string ticks_to_decimal(Tick t)
{
    bool neg = t < 0;
    Tick a = neg ? -t : t;
    Tick whole = a / kTicksPerSecond;
    Tick frac = a % kTicksPerSecond;
    std::string s = neg ? "-" : "";
    s += std::to_string(whole);
    s += '.';
    std::string f = std::to_string(frac);
    s += std::string(9 - f.size(), '0');
    s += f;
    return s;
}

/// Exact parse of a decimal seconds literal with up to 9 fractional digits.
Tick decimal_to_ticks(const std::string& text)
{
    std::size_t pos = 0;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        neg = text[pos] == '-';
        ++pos;
    }
    std::size_t dot = text.find('.', pos);
    std::string whole = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("empty time field");
    if (frac.size() > 9) throw std::invalid_argument("time has sub-nanosecond digits: " + text);
    frac += std::string(9 - frac.size(), '0');

    Tick w = 0;
    if (!whole.empty()) {
        auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
        if (ec != std::errc{} || p != whole.data() + whole.size())
            throw std::invalid_argument("bad time field: " + text);
    }
    Tick f = 0;
    auto [p, ec] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
    if (ec != std::errc{} || p != frac.data() + frac.size())
        throw std::invalid_argument("bad time field: " + text);
    Tick t = w * kTicksPerSecond + f;
    return neg ? -t : t;
}

} // namespace

BinarySignal::BinarySignal(std::vector<Breakpoint> breakpoints, Tick horizon_end)
    : breakpoints_(std::move(breakpoints)), horizon_end_(horizon_end)
{
    require(!breakpoints_.empty(), "signal needs at least one breakpoint");
    require(horizon_end_ > 0, "horizon must be positive");
    require(breakpoints_.front().time == 0, "first breakpoint must be at t=0");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const auto& bp = breakpoints_[i];
        require(bp.value == 0 || bp.value == 1, "signal values must be 0 or 1");
        require(bp.time < horizon_end_, "breakpoint at or beyond horizon");
        if (i > 0) {
            require(bp.time > breakpoints_[i - 1].time, "breakpoint times must strictly increase");
            require(bp.value != breakpoints_[i - 1].value, "redundant breakpoint (no value change)");
        }
    }
}

BinarySignal BinarySignal::constant(int value, Tick horizon_end)
{
    return BinarySignal({{0, value}}, horizon_end);
}

int BinarySignal::value_at(Tick t) const
{
    require(t >= 0 && t <= horizon_end_, "time outside signal domain");
    // last breakpoint with time <= t
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                               [](Tick v, const Breakpoint& bp) { return v < bp.time; });
    return std::prev(it)->value;
}

SignalBuilder::SignalBuilder(int initial_value)
{
    breakpoints_.push_back({0, initial_value});
}

void SignalBuilder::set(Tick t, int value)
{
    auto& last = breakpoints_.back();
    if (t < last.time) throw std::invalid_argument("trace writes must be time-ordered");
    if (value == last.value) return;
    if (t == last.time) {
        // overwrite in place; drop the breakpoint if it becomes redundant
        if (breakpoints_.size() > 1 && breakpoints_[breakpoints_.size() - 2].value == value) {
            breakpoints_.pop_back();
        } else {
            last.value = value;
        }
        return;
    }
    breakpoints_.push_back({t, value});
}

BinarySignal SignalBuilder::finish(Tick horizon_end) const
{
    std::vector<Breakpoint> bps;
    for (const auto& bp : breakpoints_) {
        if (bp.time < horizon_end) bps.push_back(bp);
    }
    return BinarySignal(std::move(bps), horizon_end);
}

BinarySignal survival_filter(const BinarySignal& y, Tick survival_time)
{
    require(survival_time >= 0, "survival time must be nonnegative");
    if (survival_time == 0) return y;

    const auto& bps = y.breakpoints();
    std::vector<Breakpoint> out;
    // Z starts at 1 unless Y starts a zero run at t=0 (the clipped window
    // [0, t] is already all-zero there).
    std::size_t i = 0;
    std::vector<std::pair<Tick, Tick>> z_zero_runs;
    while (i < bps.size()) {
        if (bps[i].value == 0) {
            Tick s = bps[i].time;
            Tick e = (i + 1 < bps.size()) ? bps[i + 1].time : y.horizon_end();
            Tick zs = (s == 0) ? 0 : s + survival_time;
            if (zs < e) z_zero_runs.emplace_back(zs, e);
        }
        ++i;
    }

    out.push_back({0, 1});
    for (const auto& [zs, ze] : z_zero_runs) {
        if (zs == 0) {
            out.back().value = 0;
        } else {
            out.push_back({zs, 0});
        }
        if (ze < y.horizon_end()) out.push_back({ze, 1});
    }
    return BinarySignal(std::move(out), y.horizon_end());
}

namespace {

void require_window(const BinarySignal& z, KpiWindow w)
{
    require(w.t_end > w.t_start, "window must have positive length");
    require(w.t_start >= 0 && w.t_end <= z.horizon_end(), "window outside signal domain");
}

} // namespace

Tick uptime_in(const BinarySignal& z, KpiWindow w)
{
    require_window(z, w);
    const auto& bps = z.breakpoints();
    Tick up = 0;
    for (std::size_t i = 0; i < bps.size(); ++i) {
        if (bps[i].value != 1) continue;
        Tick seg_start = bps[i].time;
        Tick seg_end = (i + 1 < bps.size()) ? bps[i + 1].time : z.horizon_end();
        Tick a = std::max(seg_start, w.t_start);
        Tick b = std::min(seg_end, w.t_end);
        if (b > a) up += b - a;
    }
    return up;
}

int downward_crossings_in(const BinarySignal& z, KpiWindow w)
{
    require_window(z, w);
    const auto& bps = z.breakpoints();
    int count = 0;
    for (std::size_t i = 1; i < bps.size(); ++i) {
        if (bps[i].value == 0 && bps[i].time >= w.t_start && bps[i].time < w.t_end) ++count;
    }
    return count;
}

double availability(const BinarySignal& z, KpiWindow w)
{
    return static_cast<double>(uptime_in(z, w)) / static_cast<double>(w.length());
}

double crossing_rate(const BinarySignal& z, KpiWindow w)
{
    return static_cast<double>(downward_crossings_in(z, w)) / w.length_s();
}

double mean_downtime_s(const BinarySignal& z, KpiWindow w)
{
    Tick down = w.length() - uptime_in(z, w);
    int f = downward_crossings_in(z, w);
    return to_seconds(down) / static_cast<double>(std::max(f, 1));
}

std::pair<double, double> long_run_kpis(const BinarySignal& z)
{
    KpiWindow whole{0, z.horizon_end()};
    Tick up = uptime_in(z, whole);
    int f = downward_crossings_in(z, whole);
    double avail = static_cast<double>(up) / static_cast<double>(whole.length());
    double mean_uptime = to_seconds(up) / static_cast<double>(std::max(f, 1));
    return {avail, mean_uptime};
}

KpiEstimate estimate(const BinarySignal& z, KpiWindow w)
{
    KpiEstimate e;
    e.availability = availability(z, w);
    e.crossing_rate = crossing_rate(z, w);
    e.downtime_mean_s = mean_downtime_s(z, w);
    e.window = w;
    return e;
}

void write_trace_csv(std::ostream& out, const BinarySignal& signal)
{
    out << "time_s,value\n";
    for (const auto& bp : signal.breakpoints()) {
        out << ticks_to_decimal(bp.time) << ',' << bp.value << '\n';
    }
}

BinarySignal read_trace_csv(std::istream& in, Tick horizon_end)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty trace file");
    if (line != "time_s,value") throw std::invalid_argument("bad trace header: " + line);
    std::vector<Breakpoint> bps;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad trace row: " + line);
        Tick t = decimal_to_ticks(line.substr(0, comma));
        std::string val = line.substr(comma + 1);
        if (val != "0" && val != "1") throw std::invalid_argument("bad trace value: " + line);
        bps.push_back({t, val == "1" ? 1 : 0});
    }
    return BinarySignal(std::move(bps), horizon_end);
}

} // namespace urllc::kpi

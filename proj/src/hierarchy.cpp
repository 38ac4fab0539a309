#include "urllc/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace urllc::hier {

namespace {

void require(bool cond, const std::string& msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const char* framework_name(Framework f)
{
    switch (f) {
    case Framework::kFixedBaseline: return "fixed_baseline";
    case Framework::kFlatRl: return "flat_rl";
    case Framework::kHrl: return "hrl";
    }
    return "?";
}

AgentPlacement AgentPlacement::standard(Framework f, int n_gnbs)
{
    AgentPlacement p;
    p.framework = f;
    if (f == Framework::kFlatRl) {
        p.entries.push_back({"flat", true, -1});
    } else if (f == Framework::kHrl) {
        p.entries.push_back({"high", true, -1});
        for (int b = 0; b < n_gnbs; ++b) {
            p.entries.push_back({"low" + std::to_string(b), false, b});
        }
    }
    p.validate(n_gnbs);
    return p;
}

void AgentPlacement::validate(int n_gnbs) const
{
    int remote = 0;
    std::vector<bool> colocated(static_cast<std::size_t>(n_gnbs), false);
    for (const auto& e : entries) {
        if (e.remote) {
            ++remote;
        } else {
            require(e.gnb >= 0 && e.gnb < n_gnbs, "co-located agent has no valid gNB");
            require(!colocated[e.gnb], "gNB hosts more than one co-located agent");
            colocated[e.gnb] = true;
        }
    }
    switch (framework) {
    case Framework::kFixedBaseline:
        require(entries.empty(), "fixed baseline places no agents");
        break;
    case Framework::kFlatRl:
        require(remote == 1 && entries.size() == 1, "flat RL places exactly one remote agent");
        break;
    case Framework::kHrl:
        require(remote == 1, "HRL places exactly one remote high-level agent");
        require(static_cast<int>(entries.size()) == 1 + n_gnbs,
                "HRL places one co-located agent per gNB");
        for (int b = 0; b < n_gnbs; ++b) require(colocated[b], "every gNB needs its low-level agent");
        break;
    }
}

void SignalLedger::record_remote_step(const std::string& agent, Phase phase, int n_gnbs)
{
    auto& c = counters_[{agent, static_cast<int>(phase)}];
    c.to_gnb += n_gnbs;
    c.from_gnb += n_gnbs;
}

std::int64_t SignalLedger::total() const
{
    std::int64_t t = 0;
    for (const auto& [key, c] : counters_) t += c.to_gnb + c.from_gnb;
    return t;
}

std::int64_t SignalLedger::total(Phase phase) const
{
    std::int64_t t = 0;
    for (const auto& [key, c] : counters_) {
        if (key.second == static_cast<int>(phase)) t += c.to_gnb + c.from_gnb;
    }
    return t;
}

void SignalLedger::merge(const SignalLedger& other)
{
    for (const auto& [key, c] : other.counters_) {
        counters_[key].to_gnb += c.to_gnb;
        counters_[key].from_gnb += c.from_gnb;
    }
}

std::int64_t count_signals(Framework f, std::int64_t n_low_steps, int timescale_ratio, int n_gnbs)
{
    require(timescale_ratio >= 1, "timescale ratio must be >= 1");
    require(n_low_steps >= 0, "step count must be >= 0");
    switch (f) {
    case Framework::kFixedBaseline: return 0;
    case Framework::kFlatRl: return 2LL * n_gnbs * n_low_steps;
    case Framework::kHrl:
        require(n_low_steps % timescale_ratio == 0,
                "low-level steps must be divisible by the timescale ratio");
        return 2LL * n_gnbs * (n_low_steps / timescale_ratio);
    }
    return 0;
}

void ConvergenceDetector::validate() const
{
    require(window >= 1, "convergence window must be >= 1");
    require(tolerance > 0.0, "convergence tolerance must be > 0");
    require(patience >= 1, "convergence patience must be >= 1");
}

std::optional<int> detect_convergence(std::span<const double> series,
                                      const ConvergenceDetector& det)
{
    det.validate();
    if (series.empty()) return std::nullopt;
    const int w = det.window;
    int streak = 0;
    // prefix sums for O(1) moving averages
    std::vector<double> prefix(series.size() + 1, 0.0);
    for (std::size_t i = 0; i < series.size(); ++i) prefix[i + 1] = prefix[i] + series[i];
    auto ma_ending_at = [&](int t) { // t is a 1-based iteration number
        return (prefix[t] - prefix[t - w]) / static_cast<double>(w);
    };
    for (int t = 2 * w; t <= static_cast<int>(series.size()); ++t) {
        double delta = std::abs(ma_ending_at(t) - ma_ending_at(t - w));
        if (delta < det.tolerance) {
            ++streak;
            if (streak >= det.patience) return t;
        } else {
            streak = 0;
        }
    }
    return std::nullopt;
}

SacActor::SacActor(learn::SacAgent agent, learn::StepKind kind, bool learning)
    : agent_(std::move(agent)), kind_(kind), learning_(learning)
{
}

std::vector<double> SacActor::decide(std::span<const double> state, std::optional<double> reward,
                                     std::int64_t /*step*/, bool explore)
{
    if (reward && prev_state_real_ && learning_) {
        learn::Transition t;
        t.state = prev_state_;
        t.action = prev_action_;
        t.reward = *reward;
        t.next_state.assign(state.begin(), state.end());
        t.kind = kind_;
        agent_.store(std::move(t));
        agent_.learn_step();
    }
    auto idx = agent_.act(state, explore);
    prev_state_.assign(state.begin(), state.end());
    prev_action_ = idx;
    prev_state_real_ = reward.has_value(); // only the first call carries the synthetic state
    return agent_.values_of(idx);
}

void SacActor::episode_reset(std::uint64_t /*seed*/)
{
    prev_state_real_ = false;
    prev_state_.clear();
    prev_action_.clear();
}

void AgentSet::validate(int n_gnbs) const
{
    switch (framework) {
    case Framework::kFixedBaseline:
        require(!flat && !high && low.empty(), "fixed baseline takes no agents");
        break;
    case Framework::kFlatRl:
        require(flat && !high && low.empty(), "flat RL takes exactly the joint agent");
        break;
    case Framework::kHrl:
        require(!flat && high && static_cast<int>(low.size()) == n_gnbs,
                "HRL takes one high-level agent and one low-level agent per gNB");
        for (const auto& l : low) require(l != nullptr, "missing low-level agent");
        break;
    }
}

learn::BranchingHead flat_head(const netsim::ScenarioConfig& s)
{
    learn::BranchingHead h;
    const int u = s.total_devices();
    for (int i = 0; i < u; ++i) h.levels.push_back(s.power_levels_w);
    for (int i = 0; i < u; ++i) {
        std::vector<double> r(s.retx_levels.begin(), s.retx_levels.end());
        h.levels.push_back(std::move(r));
    }
    return h;
}

learn::BranchingHead high_head(const netsim::ScenarioConfig& s)
{
    learn::BranchingHead h;
    for (int i = 0; i < s.total_devices(); ++i) h.levels.push_back(s.power_levels_w);
    return h;
}

learn::BranchingHead low_head(const netsim::ScenarioConfig& s, int gnb)
{
    learn::BranchingHead h;
    for (int i = 0; i < s.devices_per_gnb.at(gnb); ++i) {
        std::vector<double> r(s.retx_levels.begin(), s.retx_levels.end());
        h.levels.push_back(std::move(r));
    }
    return h;
}

namespace {

/// Windowed KPI estimates per gNB per device, with survival-time lookback
/// taken from each device's trace prefix.
std::vector<std::vector<kpi::KpiEstimate>> window_kpis(
    const std::vector<netsim::WindowMeasurements>& wins, Tick survival_ticks)
{
    std::vector<std::vector<kpi::KpiEstimate>> out;
    out.reserve(wins.size());
    for (const auto& wm : wins) {
        std::vector<kpi::KpiEstimate> cell;
        cell.reserve(wm.devices.size());
        for (const auto& dw : wm.devices) {
            auto z = kpi::survival_filter(dw.y, survival_ticks);
            cell.push_back(kpi::estimate(z, dw.window));
        }
        out.push_back(std::move(cell));
    }
    return out;
}

/// KPI estimates over the union window ending at the latest of `wins`.
std::vector<std::vector<kpi::KpiEstimate>> merged_kpis(
    const std::vector<netsim::WindowMeasurements>& latest, Tick span, Tick survival_ticks)
{
    std::vector<std::vector<kpi::KpiEstimate>> out;
    out.reserve(latest.size());
    for (const auto& wm : latest) {
        std::vector<kpi::KpiEstimate> cell;
        kpi::KpiWindow w{wm.window.t_end - span, wm.window.t_end};
        for (const auto& dw : wm.devices) {
            auto z = kpi::survival_filter(dw.y, survival_ticks);
            cell.push_back(kpi::estimate(z, w));
        }
        out.push_back(std::move(cell));
    }
    return out;
}

std::vector<double> zero_state(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); }

} // namespace

EpisodeLog run_episode(netsim::Simulator& sim, AgentSet& agents,
                       const rewards::RewardConfig& reward_cfg,
                       const features::NormalizationSpec& norm, const EpisodeOptions& opts)
{
    const auto& s = sim.scenario();
    agents.validate(s.n_gnbs);
    require(sim.now() == 0, "run_episode expects a fresh simulator");

    const int n_low = s.windows_per_episode();
    const int c = s.timescale_ratio;
    const int n_gnbs = s.n_gnbs;
    const int total_devices = s.total_devices();
    const Tick survival = to_ticks(s.survival_time_s);
    const Tick low_span = to_ticks(s.low_step_s);

    EpisodeLog log;

    if (agents.flat) agents.flat->episode_reset(opts.reset_seed);
    if (agents.high) agents.high->episode_reset(opts.reset_seed);
    for (auto& l : agents.low) l->episode_reset(opts.reset_seed);

    const int flat_dim = features::kFeaturesPerDevice * total_devices;
    const int high_dim = features::kFeaturesPerDevice * total_devices;

    std::vector<std::vector<netsim::WindowMeasurements>> recent; // last c windows, oldest first
    std::vector<std::vector<kpi::KpiEstimate>> last_window_kpis;
    double reward_sum = 0.0;

    for (int k = 0; k < n_low; ++k) {
        if (agents.framework == Framework::kHrl && k % c == 0) {
            std::vector<double> state;
            std::optional<double> reward;
            if (k == 0) {
                state = zero_state(high_dim);
            } else {
                state = features::assemble_high(recent, c, norm).values;
                reward = rewards::reward_high(merged_kpis(recent.back(), low_span * c, survival),
                                              reward_cfg);
            }
            auto values = agents.high->decide(state, reward, k / c, opts.explore);
            sim.apply_high_action(values);
            log.ledger.record_remote_step("high", opts.phase, n_gnbs);
            log.steps.push_back({k / c, "high", reward, values});
            log.n_high_steps += 1;
        }

        if (agents.framework == Framework::kFlatRl) {
            std::vector<double> state;
            std::optional<double> reward;
            if (k == 0) {
                state = zero_state(flat_dim);
            } else {
                std::span<const std::vector<netsim::WindowMeasurements>> span_one(&recent.back(),
                                                                                  1);
                state = features::assemble_high(span_one, 1, norm).values;
                reward = rewards::reward_high(last_window_kpis, reward_cfg);
            }
            auto values = agents.flat->decide(state, reward, k, opts.explore);
            require(static_cast<int>(values.size()) == 2 * total_devices,
                    "joint action has wrong width");
            std::span<const double> powers(values.data(), static_cast<std::size_t>(total_devices));
            sim.apply_high_action(powers);
            int off = total_devices;
            for (int b = 0; b < n_gnbs; ++b) {
                std::vector<int> retx;
                for (int i = 0; i < s.devices_per_gnb[b]; ++i)
                    retx.push_back(static_cast<int>(std::llround(values[off + i])));
                sim.apply_low_action(b, retx);
                off += s.devices_per_gnb[b];
            }
            log.ledger.record_remote_step("flat", opts.phase, n_gnbs);
            log.steps.push_back({k, "flat", reward, values});
            log.n_low_steps += 1;
        }

        if (agents.framework == Framework::kHrl) {
            for (int b = 0; b < n_gnbs; ++b) {
                std::vector<double> state;
                std::optional<double> reward;
                if (k == 0) {
                    state = zero_state(features::kFeaturesPerDevice * s.devices_per_gnb[b]);
                } else {
                    state = features::assemble_low(recent.back()[b], norm).values;
                    reward = rewards::reward_low(last_window_kpis[b], reward_cfg);
                }
                auto values = agents.low[b]->decide(state, reward, k, opts.explore);
                std::vector<int> retx;
                retx.reserve(values.size());
                for (double v : values) retx.push_back(static_cast<int>(std::llround(v)));
                sim.apply_low_action(b, retx);
                // co-located with the gNB: no remote messages
                log.steps.push_back({k, "low" + std::to_string(b), reward, values});
            }
            log.n_low_steps += 1;
        }

        auto wins = sim.run_window();
        last_window_kpis = window_kpis(wins, survival);
        reward_sum += rewards::reward_high(last_window_kpis, reward_cfg);
        recent.push_back(std::move(wins));
        if (static_cast<int>(recent.size()) > c) recent.erase(recent.begin());
    }

    log.mean_step_reward = reward_sum / static_cast<double>(n_low);

    for (int u = 0; u < total_devices; ++u) {
        auto y = sim.y_trace(u);
        auto z = kpi::survival_filter(y, survival);
        auto [avail, mean_up] = kpi::long_run_kpis(z);
        kpi::KpiWindow whole{0, z.horizon_end()};
        DeviceKpi dk;
        dk.device = u;
        dk.availability = avail;
        dk.crossing_rate = kpi::crossing_rate(z, whole);
        dk.mean_uptime_s = mean_up;
        log.device_kpis.push_back(dk);
        if (opts.keep_traces) log.y_traces.push_back(std::move(y));
    }

    return log;
}

void EpisodeLog::write_csv(std::ostream& out) const
{
    out << "step,agent,reward,action\n";
    for (const auto& r : steps) {
        out << r.step << ',' << r.agent << ',';
        if (r.reward) out << fmt_double(*r.reward);
        out << ',';
        for (std::size_t i = 0; i < r.action.size(); ++i) {
            if (i) out << ';';
            out << fmt_double(r.action[i]);
        }
        out << '\n';
    }
}

} // namespace urllc::hier

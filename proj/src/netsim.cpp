#include "urllc/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace urllc::netsim {

namespace {

void require(bool cond, const std::string& msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

int ScenarioConfig::total_devices() const
{
    int u = 0;
    for (int n : devices_per_gnb) u += n;
    return u;
}

int ScenarioConfig::gnb_of_device(int device) const
{
    int acc = 0;
    for (int b = 0; b < n_gnbs; ++b) {
        acc += devices_per_gnb[b];
        if (device < acc) return b;
    }
    throw std::invalid_argument("device index out of range");
}

std::vector<int> ScenarioConfig::devices_of_gnb(int gnb) const
{
    require(gnb >= 0 && gnb < n_gnbs, "gNB index out of range");
    int start = 0;
    for (int b = 0; b < gnb; ++b) start += devices_per_gnb[b];
    std::vector<int> out(static_cast<std::size_t>(devices_per_gnb[gnb]));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = start + static_cast<int>(i);
    return out;
}

int ScenarioConfig::ttis_per_window() const
{
    return static_cast<int>(to_ticks(low_step_s) / to_ticks(tti_s));
}

int ScenarioConfig::windows_per_episode() const
{
    return static_cast<int>(to_ticks(episode_s) / to_ticks(low_step_s));
}

void ScenarioConfig::validate() const
{
    require(n_gnbs >= 1, "n_gnbs must be >= 1");
    require(static_cast<int>(devices_per_gnb.size()) == n_gnbs,
            "devices_per_gnb must list one entry per gNB");
    for (int n : devices_per_gnb) require(n >= 1, "devices_per_gnb entries must be >= 1");
    require(tti_s > 0, "tti_s must be > 0");
    require(traffic_period_s > 0, "traffic_period_s must be > 0");
    require(delay_bound_s >= tti_s, "delay_bound_s must be >= tti_s");
    require(survival_time_s > 0, "survival_time_s must be > 0");
    require(!power_levels_w.empty(), "power_levels_w must be nonempty");
    require(std::is_sorted(power_levels_w.begin(), power_levels_w.end()),
            "power_levels_w must be sorted ascending");
    for (double p : power_levels_w) require(p > 0, "power_levels_w entries must be > 0");
    require(!retx_levels.empty(), "retx_levels must be nonempty");
    require(std::is_sorted(retx_levels.begin(), retx_levels.end()),
            "retx_levels must be sorted ascending");
    for (int r : retx_levels) require(r >= 1, "retx_levels entries must be >= 1");
    require(timescale_ratio >= 1, "timescale_ratio must be >= 1");
    require(low_step_s > 0 && episode_s > 0, "low_step_s and episode_s must be > 0");
    require(to_ticks(low_step_s) % to_ticks(tti_s) == 0, "low_step_s must be a multiple of tti_s");
    Tick high_step = to_ticks(low_step_s) * timescale_ratio;
    require(to_ticks(episode_s) % high_step == 0,
            "episode_s must be a multiple of timescale_ratio * low_step_s");
    require(harq_feedback_extra_ttis >= 0, "harq_feedback_extra_ttis must be >= 0");
    require(per_tti_capacity >= 0, "per_tti_capacity must be >= 0");
}

double DeviceWindow::packet_loss_rate() const
{
    return completed() > 0 ? static_cast<double>(dropped) / static_cast<double>(completed()) : 0.0;
}

double DeviceWindow::mean_delay_s() const
{
    return delivered > 0 ? delay_sum_s / static_cast<double>(delivered) : 0.0;
}

double DeviceWindow::mean_harq_tx() const
{
    return completed() > 0
               ? static_cast<double>(attempts_of_completed) / static_cast<double>(completed())
               : 0.0;
}

double DeviceWindow::mean_rb_used() const
{
    return n_ttis > 0 ? static_cast<double>(rb_used) / static_cast<double>(n_ttis) : 0.0;
}

double DeviceWindow::mean_downtime_s() const
{
    return kpi::mean_downtime_s(y, window);
}

Simulator::Simulator(ScenarioConfig scenario, channel::PathGainField field,
                     channel::RadioConfig radio, std::uint64_t run_seed)
    : scenario_(std::move(scenario)),
      field_(std::move(field)),
      radio_(radio),
      rng_(run_seed)
{
    scenario_.validate();
    radio_.validate();
    require(field_.n_gnbs() == scenario_.n_gnbs, "path-gain field gNB dimension mismatch");
    require(field_.n_devices() == scenario_.total_devices(),
            "path-gain field device dimension mismatch");
    tti_ = to_ticks(scenario_.tti_s);
    if (field_.mode() == channel::GainMode::kGaussMarkov) {
        require(field_.update_period() > 0 && field_.update_period() % tti_ == 0,
                "gain update period must be a positive multiple of tti_s");
    }

    const int total = scenario_.total_devices();
    // deterministic per-device arrival phases spread the periodic control
    // traffic over the TTI grid instead of colliding every device in the
    // same slot
    const Tick period = to_ticks(scenario_.traffic_period_s);
    const Tick slots = std::max<Tick>(1, period / tti_);
    devices_.reserve(static_cast<std::size_t>(total));
    for (int u = 0; u < total; ++u) {
        Device d;
        d.gnb = scenario_.gnb_of_device(u);
        d.power_w = scenario_.power_levels_w.back();
        d.max_tx = scenario_.retx_levels.back();
        d.next_arrival = period + (u % slots) * tti_;
        devices_.push_back(std::move(d));
    }
    gnb_devices_.resize(static_cast<std::size_t>(scenario_.n_gnbs));
    for (int b = 0; b < scenario_.n_gnbs; ++b) gnb_devices_[b] = scenario_.devices_of_gnb(b);
    rr_next_.assign(static_cast<std::size_t>(scenario_.n_gnbs), 0);

    active_ = std::make_unique<bool[]>(static_cast<std::size_t>(scenario_.n_gnbs));
    gnb_power_.assign(static_cast<std::size_t>(scenario_.n_gnbs), 0.0);
    powers_scratch_.assign(static_cast<std::size_t>(scenario_.n_gnbs), 0.0);
    tti_sinr_.assign(static_cast<std::size_t>(total), 0.0);
}

void Simulator::apply_high_action(std::span<const double> powers_w)
{
    require(static_cast<int>(powers_w.size()) == scenario_.total_devices(),
            "power vector must cover all devices");
    for (double p : powers_w) {
        bool known = std::find(scenario_.power_levels_w.begin(), scenario_.power_levels_w.end(),
                               p) != scenario_.power_levels_w.end();
        require(known, "power value not in the configured level set");
    }
    for (std::size_t u = 0; u < devices_.size(); ++u) devices_[u].power_w = powers_w[u];
}

void Simulator::apply_low_action(int gnb, std::span<const int> retx)
{
    require(gnb >= 0 && gnb < scenario_.n_gnbs, "gNB index out of range");
    require(static_cast<int>(retx.size()) == scenario_.devices_per_gnb[gnb],
            "retransmission vector length mismatch");
    for (int r : retx) {
        bool known = std::find(scenario_.retx_levels.begin(), scenario_.retx_levels.end(), r) !=
                     scenario_.retx_levels.end();
        require(known, "retransmission value not in the configured level set");
    }
    const auto& local = gnb_devices_[gnb];
    for (std::size_t i = 0; i < local.size(); ++i) devices_[local[i]].max_tx = retx[i];
}

void Simulator::drop_packet(Device& dev, Tick at, int attempts_used)
{
    dev.dropped += 1;
    dev.tot_dropped += 1;
    dev.attempts_of_completed += attempts_used;
    dev.y.set(at, 0);
}

void Simulator::deliver_packet(Device& dev, Tick at, const Packet& pkt, int attempts_used)
{
    dev.delivered += 1;
    dev.tot_delivered += 1;
    dev.attempts_of_completed += attempts_used;
    dev.delay_sum_s += to_seconds(at - pkt.arrival);
    dev.y.set(at, 1);
}

void Simulator::step_tti()
{
    const Tick t = now_;
    const Tick t_end = t + tti_;
    const Tick bound = to_ticks(scenario_.delay_bound_s);

    // channel evolution on its own grid
    if (field_.mode() == channel::GainMode::kGaussMarkov && t > 0 &&
        t % field_.update_period() == 0) {
        field_ = channel::evolve(field_, rng_.next(), to_seconds(field_.update_period()));
    }

    // arrivals, deadline purge, head-of-line promotion
    const Tick period = to_ticks(scenario_.traffic_period_s);
    for (auto& dev : devices_) {
        while (dev.next_arrival <= t) {
            dev.queue.push_back({next_packet_id_++, dev.next_arrival});
            dev.arrived += 1;
            dev.tot_arrived += 1;
            dev.next_arrival += period;
        }
        // a packet whose delivery this TTI would already violate the bound is hopeless
        if (dev.inflight && t_end - dev.inflight->pkt.arrival > bound) {
            drop_packet(dev, t, dev.inflight->attempts);
            dev.inflight.reset();
        }
        while (!dev.queue.empty() && t_end - dev.queue.front().arrival > bound) {
            drop_packet(dev, t, 0);
            dev.queue.pop_front();
        }
        if (!dev.inflight && !dev.queue.empty()) {
            Inflight f;
            f.pkt = dev.queue.front();
            dev.queue.pop_front();
            f.attempts = 0;
            f.max_tx = dev.max_tx; // frozen for the lifetime of the packet
            f.eligible_at = t;
            dev.inflight = f;
        }
    }

    // scheduling: per gNB, every eligible in-flight head, round-robin under a capacity cap
    scheduled_.clear();
    std::span<const bool> active(active_.get(), static_cast<std::size_t>(scenario_.n_gnbs));
    for (int b = 0; b < scenario_.n_gnbs; ++b) {
        const auto& local = gnb_devices_[b];
        candidates_.clear();
        for (std::size_t i = 0; i < local.size(); ++i) {
            // rotate the start index so a capacity cap shares the TTIs fairly
            int u = local[(rr_next_[b] + i) % local.size()];
            const auto& dev = devices_[u];
            if (dev.inflight && dev.inflight->eligible_at <= t) candidates_.push_back(u);
        }
        int cap = scenario_.per_tti_capacity > 0 ? scenario_.per_tti_capacity
                                                 : static_cast<int>(candidates_.size());
        if (!candidates_.empty()) rr_next_[b] = (rr_next_[b] + 1) % static_cast<int>(local.size());
        double power_sum = 0.0;
        int taken = 0;
        for (int u : candidates_) {
            if (taken >= cap) break;
            scheduled_.push_back(u);
            power_sum += devices_[u].power_w;
            ++taken;
        }
        active_[b] = taken > 0;
        // representative inter-cell interference power
        gnb_power_[b] = taken > 0 ? power_sum / taken : 0.0;
    }
    std::sort(scheduled_.begin(), scheduled_.end()); // fixed draw order for determinism

    // per-TTI state samples for every device (scheduled or not)
    for (int u = 0; u < static_cast<int>(devices_.size()); ++u) {
        auto& dev = devices_[u];
        powers_scratch_ = gnb_power_;
        powers_scratch_[dev.gnb] = dev.power_w;
        double s = channel::sinr_db(dev.gnb, u, powers_scratch_, active, field_, t, radio_);
        tti_sinr_[u] = s;
        dev.sinr_db.push_back(s);
        dev.gain_db.push_back(field_.gain_db(dev.gnb, u, t));
        dev.buffer_len.push_back(static_cast<double>(dev.queue.size()) +
                                 (dev.inflight ? 1.0 : 0.0));
    }

    // transmission attempts
    for (int u : scheduled_) {
        auto& dev = devices_[u];
        auto& f = *dev.inflight;
        f.attempts += 1;
        dev.rb_used += 1;
        double e = channel::bler(tti_sinr_[u], f.attempts, radio_);
        bool success = rng_.uniform() >= e;
        if (success) {
            deliver_packet(dev, t_end, f.pkt, f.attempts);
            dev.inflight.reset();
        } else if (f.attempts >= f.max_tx) {
            drop_packet(dev, t_end, f.attempts);
            dev.inflight.reset();
        } else {
            f.eligible_at = t_end + static_cast<Tick>(scenario_.harq_feedback_extra_ttis) * tti_;
        }
    }

    now_ = t_end;
}

std::vector<WindowMeasurements> Simulator::run_window()
{
    const int n_ttis = scenario_.ttis_per_window();
    for (int i = 0; i < n_ttis; ++i) step_tti();

    kpi::KpiWindow w{window_start_, now_};
    std::vector<WindowMeasurements> out;
    out.reserve(static_cast<std::size_t>(scenario_.n_gnbs));
    for (int b = 0; b < scenario_.n_gnbs; ++b) {
        WindowMeasurements wm;
        wm.gnb = b;
        wm.window = w;
        for (int u : gnb_devices_[b]) {
            auto& dev = devices_[u];
            DeviceWindow dw;
            dw.device = u;
            dw.arrived = dev.arrived;
            dw.delivered = dev.delivered;
            dw.dropped = dev.dropped;
            dw.attempts_of_completed = dev.attempts_of_completed;
            dw.rb_used = dev.rb_used;
            dw.n_ttis = n_ttis;
            dw.delay_sum_s = dev.delay_sum_s;
            dw.sinr_db = std::move(dev.sinr_db);
            dw.gain_db = std::move(dev.gain_db);
            dw.buffer_len = std::move(dev.buffer_len);
            dw.y = dev.y.finish(now_);
            dw.window = w;
            wm.devices.push_back(std::move(dw));

            dev.arrived = dev.delivered = dev.dropped = 0;
            dev.attempts_of_completed = dev.rb_used = 0;
            dev.delay_sum_s = 0.0;
            dev.sinr_db.clear();
            dev.gain_db.clear();
            dev.buffer_len.clear();
        }
        out.push_back(std::move(wm));
    }
    window_start_ = now_;
    return out;
}

kpi::BinarySignal Simulator::y_trace(int device) const
{
    require(device >= 0 && device < static_cast<int>(devices_.size()), "device index out of range");
    return devices_[device].y.finish(now_ > 0 ? now_ : tti_);
}

Simulator::Totals Simulator::totals(int device) const
{
    require(device >= 0 && device < static_cast<int>(devices_.size()), "device index out of range");
    const auto& dev = devices_[device];
    return {dev.tot_arrived, dev.tot_delivered, dev.tot_dropped,
            static_cast<std::int64_t>(dev.queue.size()), dev.inflight ? 1 : 0};
}

} // namespace urllc::netsim

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "urllc/channel.hpp"
#include "urllc/kpi.hpp"
#include "urllc/rng.hpp"
#include "urllc/ticks.hpp"

namespace urllc::netsim {

struct ScenarioConfig {
    int n_gnbs = 2;
    std::vector<int> devices_per_gnb = {5, 5};
    double tti_s = 0.5e-3;
    double traffic_period_s = 2e-3;
    double delay_bound_s = 2.5e-3;
    double survival_time_s = 5e-3;
    std::vector<double> power_levels_w = {0.008, 0.02};
    std::vector<int> retx_levels = {1, 2};
    double episode_s = 10.0;
    double low_step_s = 0.1;     // low-level decision period
    int timescale_ratio = 5;     // high-level period / low-level period
    std::uint64_t rng_seed = 1;

    // scheduler knobs; defaults match the unconstrained deployment
    int harq_feedback_extra_ttis = 0; // extra TTIs before a retransmission
    int per_tti_capacity = 0;         // max devices scheduled per gNB per TTI, 0 = unlimited

    int total_devices() const;
    int gnb_of_device(int device) const;
    std::vector<int> devices_of_gnb(int gnb) const;
    int ttis_per_window() const;
    int windows_per_episode() const;

    void validate() const; // throws std::invalid_argument naming the offending key
};

/// Raw per-device measurements over one low-level window, plus the trace
/// prefix needed to evaluate KPIs on the window with survival-time lookback.
struct DeviceWindow {
    int device = 0; // global device index
    std::int64_t arrived = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    std::int64_t attempts_of_completed = 0; // HARQ transmissions of packets that finished
    std::int64_t rb_used = 0;               // scheduled RB-groups (one per attempt)
    std::int64_t n_ttis = 0;
    double delay_sum_s = 0.0; // over delivered packets

    std::vector<double> sinr_db;    // one sample per TTI
    std::vector<double> gain_db;    // serving-link gain, one per TTI
    std::vector<double> buffer_len; // RLC occupancy incl. in-flight, one per TTI

    kpi::BinarySignal y = kpi::BinarySignal::constant(1, 1); // trace on [0, window.t_end)
    kpi::KpiWindow window;

    std::int64_t completed() const { return delivered + dropped; }
    double packet_loss_rate() const;
    double mean_delay_s() const;
    double mean_harq_tx() const;
    double mean_rb_used() const;
    double mean_downtime_s() const; // network-layer downtime per outage in the window

    friend bool operator==(const DeviceWindow&, const DeviceWindow&) = default;
};

struct WindowMeasurements {
    int gnb = 0;
    kpi::KpiWindow window;
    std::vector<DeviceWindow> devices; // local order within the gNB

    friend bool operator==(const WindowMeasurements&, const WindowMeasurements&) = default;
};

/// Single-threaded downlink simulator: periodic traffic into per-device RLC
/// queues, one head-of-line transmission per scheduled device per TTI, HARQ
/// retransmissions up to the configured maximum, delay-bound enforcement,
/// and Y(t) trace emission. All randomness comes from the instance seed.
class Simulator {
public:
    Simulator(ScenarioConfig scenario, channel::PathGainField field, channel::RadioConfig radio,
              std::uint64_t run_seed);

    void apply_high_action(std::span<const double> powers_w); // length U
    void apply_low_action(int gnb, std::span<const int> retx); // length U_b

    void step_tti();
    std::vector<WindowMeasurements> run_window();

    Tick now() const { return now_; }
    const ScenarioConfig& scenario() const { return scenario_; }
    const channel::RadioConfig& radio() const { return radio_; }

    kpi::BinarySignal y_trace(int device) const; // snapshot on [0, now)

    // cumulative per-device totals, for conservation checks and diagnostics
    struct Totals {
        std::int64_t arrived = 0, delivered = 0, dropped = 0;
        std::int64_t in_queue = 0, in_flight = 0;
    };
    Totals totals(int device) const;

private:
    struct Packet {
        std::int64_t id;
        Tick arrival;
    };
    struct Inflight {
        Packet pkt;
        int attempts = 0;
        int max_tx = 1;       // frozen when the packet is promoted
        Tick eligible_at = 0; // HARQ feedback gate
    };
    struct Device {
        int gnb = 0;
        std::deque<Packet> queue;
        std::optional<Inflight> inflight;
        double power_w = 0.0;
        int max_tx = 1;
        Tick next_arrival = 0;
        kpi::SignalBuilder y{1};
        // window accumulators
        std::int64_t arrived = 0, delivered = 0, dropped = 0;
        std::int64_t attempts_of_completed = 0, rb_used = 0;
        double delay_sum_s = 0.0;
        std::vector<double> sinr_db, gain_db, buffer_len;
        // episode totals
        std::int64_t tot_arrived = 0, tot_delivered = 0, tot_dropped = 0;
    };

    void drop_packet(Device& dev, Tick at, int attempts_used);
    void deliver_packet(Device& dev, Tick at, const Packet& pkt, int attempts_used);

    ScenarioConfig scenario_;
    channel::PathGainField field_;
    channel::RadioConfig radio_;
    Rng rng_;

    Tick now_ = 0;
    Tick tti_ = 0;
    Tick window_start_ = 0;
    std::int64_t next_packet_id_ = 0;
    std::vector<Device> devices_;
    std::vector<std::vector<int>> gnb_devices_; // global indices per gNB
    std::vector<int> rr_next_;                  // round-robin cursor per gNB

    // per-TTI scratch, reused to keep the hot loop allocation-free
    std::unique_ptr<bool[]> active_;
    std::vector<double> gnb_power_;
    std::vector<double> powers_scratch_;
    std::vector<int> scheduled_;
    std::vector<double> tti_sinr_;
    std::vector<int> candidates_;
};

} // namespace urllc::netsim

#include <doctest.h>

#include <cmath>

#include "urllc/netsim.hpp"

using namespace urllc;
using channel::GainMode;
using channel::PathGainField;
using channel::RadioConfig;
using netsim::ScenarioConfig;
using netsim::Simulator;

namespace {

Tick ms(double v) { return to_ticks(v * 1e-3); }

ScenarioConfig one_device_scenario()
{
    ScenarioConfig s;
    s.n_gnbs = 1;
    s.devices_per_gnb = {1};
    s.timescale_ratio = 1;
    s.episode_s = 0.1;
    s.retx_levels = {1, 2, 8};
    return s;
}

PathGainField one_device_field() { return PathGainField({{1e-8}}, 1, 1, 0, GainMode::kStatic); }

RadioConfig sure_success()
{
    RadioConfig r;
    r.bler_midpoint_db = -1e9; // logistic underflows to exactly 0
    return r;
}

RadioConfig sure_failure()
{
    RadioConfig r;
    r.bler_midpoint_db = 1e9; // logistic saturates to exactly 1
    return r;
}

double one_device_sinr_db(const RadioConfig& r)
{
    return 10.0 * std::log10(0.02 * 1e-8 / r.noise_power_w);
}

} // namespace

TEST_CASE("scenario validation names the offending key")
{
    ScenarioConfig s;
    s.devices_per_gnb = {5};
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("devices_per_gnb"),
                         std::invalid_argument);
    s = ScenarioConfig{};
    s.low_step_s = 0.00033;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("low_step_s"), std::invalid_argument);
    s = ScenarioConfig{};
    s.episode_s = 0.7; // not a multiple of c * low_step = 0.5
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("episode_s"), std::invalid_argument);
    s = ScenarioConfig{};
    s.delay_bound_s = 1e-4;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("delay_bound_s"), std::invalid_argument);
    CHECK_NOTHROW(ScenarioConfig{}.validate());
}

TEST_CASE("error-free channel delivers in one TTI with delay tti_s")
{
    Simulator sim(one_device_scenario(), one_device_field(), sure_success(), 1);
    auto wins = sim.run_window();
    REQUIRE(wins.size() == 1);
    const auto& dw = wins[0].devices[0];
    // arrivals at 2, 4, ..., 98 ms: 49 packets, all delivered first try
    CHECK(dw.arrived == 49);
    CHECK(dw.delivered == 49);
    CHECK(dw.dropped == 0);
    CHECK(dw.n_ttis == 200);
    CHECK(dw.mean_delay_s() == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(dw.mean_harq_tx() == doctest::Approx(1.0));
    CHECK(dw.packet_loss_rate() == 0.0);
    CHECK(dw.y == kpi::BinarySignal::constant(1, ms(100)));
    CHECK(kpi::availability(dw.y, dw.window) == 1.0);
}

TEST_CASE("forced failures drop after max_tx attempts and pull Y down")
{
    auto scn = one_device_scenario();
    Simulator sim(scn, one_device_field(), sure_failure(), 1);
    sim.apply_low_action(0, std::vector<int>{2});
    auto wins = sim.run_window();
    const auto& dw = wins[0].devices[0];
    // every packet: two failed attempts, dropped one TTI after the second
    CHECK(dw.arrived == 49);
    CHECK(dw.delivered == 0);
    CHECK(dw.dropped == 49);
    CHECK(dw.mean_harq_tx() == doctest::Approx(2.0));
    CHECK(dw.packet_loss_rate() == 1.0);
    // first arrival at 2 ms, attempts in [2, 2.5) and [2.5, 3), drop at 3 ms
    REQUIRE(dw.y.breakpoints().size() == 2);
    CHECK(dw.y.breakpoints()[1] == kpi::Breakpoint{ms(3), 0});
}

TEST_CASE("delay bound drops a packet that cannot finish in time")
{
    auto scn = one_device_scenario();
    Simulator sim(scn, one_device_field(), sure_failure(), 1);
    sim.apply_low_action(0, std::vector<int>{8}); // more attempts than the bound allows
    for (int i = 0; i < 20; ++i) sim.step_tti();  // 10 ms
    auto totals = sim.totals(0);
    // first packet: five attempts fit into the 2.5 ms bound, then hopeless
    CHECK(totals.arrived >= 1);
    CHECK(totals.dropped >= 1);
    auto y = sim.y_trace(0);
    REQUIRE(y.breakpoints().size() >= 2);
    // drop instant: the TTI starting at 4.5 ms would deliver at 5 ms > 2 + 2.5
    CHECK(y.breakpoints()[1] == kpi::Breakpoint{ms(4.5), 0});
}

TEST_CASE("hand-traced outage interval: drop then recovery")
{
    // attempt 1 always fails, attempt 2 always succeeds: the midpoint sits
    // 1.5 dB above the SINR and the combining gain is 3 dB with a hard slope
    RadioConfig r;
    r.bler_slope_per_db = 1000.0;
    r.harq_combining_gain_db = 3.0;
    r.bler_midpoint_db = one_device_sinr_db(r) + 1.5;

    auto scn = one_device_scenario();
    Simulator sim(scn, one_device_field(), r, 1);
    sim.apply_low_action(0, std::vector<int>{1}); // single attempt for packet 1
    while (sim.now() < ms(3)) sim.step_tti();
    // packet 1 (arrival 2 ms) failed its only attempt: dropped at 2.5 ms
    CHECK(sim.totals(0).dropped == 1);
    sim.apply_low_action(0, std::vector<int>{2}); // allow the retransmission
    while (sim.now() < ms(6)) sim.step_tti();
    // packet 2 (arrival 4 ms): attempt at [4, 4.5) fails, retransmission at
    // [4.5, 5) succeeds; service resumes at 5 ms
    auto y = sim.y_trace(0);
    CHECK(y.breakpoints() == std::vector<kpi::Breakpoint>{{0, 1}, {ms(2.5), 0}, {ms(5), 1}});
    CHECK(sim.totals(0).delivered == 1);
}

TEST_CASE("action vectors are validated against the level sets")
{
    ScenarioConfig s; // 2 gNBs, 5+5 devices
    Simulator sim(s, PathGainField({std::vector<double>(20, 1e-8)}, 2, 10, 0, GainMode::kStatic),
                  sure_success(), 1);
    CHECK_THROWS_WITH_AS(sim.apply_low_action(0, std::vector<int>{3, 2, 2, 2, 2}),
                         doctest::Contains("level set"), std::invalid_argument);
    CHECK_THROWS(sim.apply_low_action(0, std::vector<int>{2, 2}));
    CHECK_THROWS(sim.apply_low_action(2, std::vector<int>{2, 2, 2, 2, 2}));
    CHECK_NOTHROW(sim.apply_low_action(1, std::vector<int>{1, 2, 1, 2, 1}));

    std::vector<double> powers(10, 0.02);
    CHECK_NOTHROW(sim.apply_high_action(powers));
    powers[3] = 0.05; // not a configured level
    CHECK_THROWS_WITH_AS(sim.apply_high_action(powers), doctest::Contains("level set"),
                         std::invalid_argument);
    CHECK_THROWS(sim.apply_high_action(std::vector<double>(9, 0.02)));
}

TEST_CASE("window bookkeeping: TTI counts, zero traffic, determinism")
{
    SUBCASE("a 0.1 s window advances exactly 200 TTIs of 0.5 ms")
    {
        auto scn = one_device_scenario();
        Simulator sim(scn, one_device_field(), sure_success(), 1);
        CHECK(scn.ttis_per_window() == 200);
        auto wins = sim.run_window();
        CHECK(wins[0].devices[0].n_ttis == 200);
        CHECK(sim.now() == ms(100));
    }

    SUBCASE("zero traffic window is all-quiet")
    {
        auto scn = one_device_scenario();
        scn.traffic_period_s = 1000.0;
        Simulator sim(scn, one_device_field(), sure_success(), 1);
        auto wins = sim.run_window();
        const auto& dw = wins[0].devices[0];
        CHECK(dw.arrived == 0);
        CHECK(dw.packet_loss_rate() == 0.0);
        CHECK(dw.mean_delay_s() == 0.0);
        CHECK(dw.mean_harq_tx() == 0.0);
        CHECK(dw.mean_downtime_s() == 0.0);
        CHECK(kpi::availability(dw.y, dw.window) == 1.0);
        // per-TTI samples are still present
        CHECK(dw.sinr_db.size() == 200);
        CHECK(dw.buffer_len == std::vector<double>(200, 0.0));
    }

    SUBCASE("identical seeds and actions give bit-identical measurements")
    {
        ScenarioConfig s;
        RadioConfig r; // real decoding randomness
        r.bler_midpoint_db = 20.0;
        auto field = PathGainField({{1e-8, 2e-8, 3e-8, 1.5e-8, 2.5e-8, 1e-9, 2e-9, 3e-9, 1.5e-9,
                                     2.5e-9, 2e-9, 1e-9, 2.5e-9, 3e-9, 1.5e-9, 2e-8, 1e-8, 2.5e-8,
                                     3e-8, 1.5e-8}},
                                   2, 10, 0, GainMode::kStatic);
        Simulator a(s, field, r, 42), b(s, field, r, 42);
        for (int w = 0; w < 3; ++w) {
            auto wa = a.run_window();
            auto wb = b.run_window();
            CHECK(wa == wb);
        }
        Simulator c(s, field, r, 43);
        auto wc = c.run_window();
        CHECK_FALSE(a.run_window() == wc);
    }
}

TEST_CASE("conservation and clean-channel service invariants")
{
    ScenarioConfig s;
    RadioConfig r;
    r.bler_midpoint_db = 12.0; // mixed successes and failures
    auto field = PathGainField({{1e-8, 2e-8, 3e-8, 1.5e-8, 2.5e-8, 1e-9, 2e-9, 3e-9, 1.5e-9,
                                 2.5e-9, 2e-9, 1e-9, 2.5e-9, 3e-9, 1.5e-9, 2e-8, 1e-8, 2.5e-8,
                                 3e-8, 1.5e-8}},
                               2, 10, 0, GainMode::kStatic);
    Simulator sim(s, field, r, 7);
    for (int w = 0; w < 5; ++w) {
        sim.run_window();
        for (int u = 0; u < 10; ++u) {
            auto t = sim.totals(u);
            CHECK(t.arrived == t.delivered + t.dropped + t.in_queue + t.in_flight);
        }
    }

    // with error-free decoding every device stays fully available
    Simulator clean(s, field, sure_success(), 7);
    for (int w = 0; w < 5; ++w) clean.run_window();
    for (int u = 0; u < 10; ++u) {
        auto y = clean.y_trace(u);
        CHECK(y == kpi::BinarySignal::constant(1, clean.now()));
    }
}

TEST_CASE("a second transmission never hurts packet success (paired seeds)")
{
    auto scn = one_device_scenario();
    RadioConfig r;
    r.bler_midpoint_db = one_device_sinr_db(r) + 1.0; // per-attempt error around 0.73
    std::int64_t delivered1 = 0, delivered2 = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Simulator s1(scn, one_device_field(), r, seed);
        s1.apply_low_action(0, std::vector<int>{1});
        Simulator s2(scn, one_device_field(), r, seed);
        s2.apply_low_action(0, std::vector<int>{2});
        for (int w = 0; w < 2; ++w) {
            s1.run_window();
            s2.run_window();
        }
        delivered1 += s1.totals(0).delivered;
        delivered2 += s2.totals(0).delivered;
    }
    CHECK(delivered2 > delivered1);
}

TEST_CASE("per-TTI capacity limits scheduling and round-robin shares it")
{
    ScenarioConfig s;
    s.n_gnbs = 1;
    s.devices_per_gnb = {3};
    s.timescale_ratio = 1;
    s.episode_s = 0.1;
    s.per_tti_capacity = 1;
    s.traffic_period_s = 0.0005; // a packet per TTI per device: permanent backlog
    s.delay_bound_s = 0.01;      // roomy bound so queueing dominates
    auto field = PathGainField({{1e-8, 1e-8, 1e-8}}, 1, 3, 0, GainMode::kStatic);
    Simulator sim(s, field, sure_success(), 1);
    auto wins = sim.run_window();
    std::int64_t total_rb = 0;
    for (const auto& dw : wins[0].devices) {
        total_rb += dw.rb_used;
        CHECK(dw.rb_used > 0); // round-robin reaches every device
    }
    CHECK(total_rb <= 200); // at most one scheduled device per TTI
}

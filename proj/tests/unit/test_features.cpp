#include <doctest.h>

#include "urllc/features.hpp"

using namespace urllc;
using features::FeatureVector;
using features::NormalizationSpec;
using netsim::DeviceWindow;
using netsim::WindowMeasurements;

namespace {

Tick ms(double v) { return to_ticks(v * 1e-3); }

NormalizationSpec identity_norm()
{
    // wide symmetric ranges so scaled values stay readable in tests
    NormalizationSpec n;
    n.plr = {-1.0, 1.0};
    n.downtime_s = {-1.0, 1.0};
    n.delay_s = {-1.0, 1.0};
    n.harq_tx = {-1.0, 1.0};
    n.rb_used = {-1.0, 1.0};
    n.sinr_db = {-1.0, 1.0};
    n.path_gain_db = {-1.0, 1.0};
    n.rlc_buffer = {-1.0, 1.0};
    return n;
}

DeviceWindow make_window(int device, std::vector<double> sinr, Tick t_start, Tick t_end)
{
    DeviceWindow dw;
    dw.device = device;
    dw.n_ttis = static_cast<std::int64_t>(sinr.size());
    dw.sinr_db = sinr;
    dw.gain_db = std::vector<double>(sinr.size(), -80.0);
    dw.buffer_len = std::vector<double>(sinr.size(), 0.0);
    dw.y = kpi::BinarySignal::constant(1, t_end);
    dw.window = {t_start, t_end};
    return dw;
}

} // namespace

TEST_CASE("nearest-rank percentiles")
{
    std::vector<double> ladder;
    for (int i = 1; i <= 100; ++i) ladder.push_back(i);
    CHECK(features::nearest_rank_percentile(ladder, 95.0) == 95.0);
    CHECK(features::nearest_rank_percentile(ladder, 5.0) == 5.0);
    CHECK(features::nearest_rank_percentile(ladder, 50.0) == 50.0);
    CHECK(features::nearest_rank_percentile(ladder, 100.0) == 100.0);

    std::vector<double> constant(10, 3.5);
    for (double p : {5.0, 50.0, 95.0}) {
        CHECK(features::nearest_rank_percentile(constant, p) == 3.5);
    }

    CHECK_THROWS(features::nearest_rank_percentile({}, 50.0));
    CHECK_THROWS(features::nearest_rank_percentile(ladder, 101.0));

    // permutation invariance and min/max bounds on random samples
    Rng rng(5);
    std::vector<double> samples;
    for (int i = 0; i < 31; ++i) samples.push_back(rng.uniform());
    auto shuffled = samples;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
    for (double p : {1.0, 5.0, 37.0, 50.0, 95.0, 99.0}) {
        double v = features::nearest_rank_percentile(samples, p);
        CHECK(v == features::nearest_rank_percentile(shuffled, p));
        CHECK(v >= *std::min_element(samples.begin(), samples.end()));
        CHECK(v <= *std::max_element(samples.begin(), samples.end()));
    }
}

TEST_CASE("device feature layout and scaling")
{
    auto norm = identity_norm();
    auto dw = make_window(0, {0.25, 0.25, 0.25, 0.25}, 0, ms(2));
    auto f = features::device_features(dw, norm);
    REQUIRE(static_cast<int>(f.size()) == features::kFeaturesPerDevice);
    // no traffic: the five means are zero
    for (int i = 0; i < 5; ++i) CHECK(f[i] == 0.0);
    // constant samples: mean == median == p95 == p5
    CHECK(f[5] == doctest::Approx(0.25));
    CHECK(f[6] == doctest::Approx(0.25));
    CHECK(f[7] == doctest::Approx(0.25));
    CHECK(f[8] == doctest::Approx(0.25));
    // gain block is clamped: -80 dB is far below the [-1, 1] test range
    CHECK(f[9] == -1.0);
    // buffer block: all zero
    CHECK(f[13] == 0.0);

    // scaling clamps into [-1, 1] for any declared range
    NormalizationSpec tight;
    CHECK(features::scale_to_unit(0.5, {0.0, 1.0}) == 0.0);
    CHECK(features::scale_to_unit(2.0, {0.0, 1.0}) == 1.0);
    CHECK(features::scale_to_unit(-3.0, {0.0, 1.0}) == -1.0);
    CHECK_THROWS(features::scale_to_unit(0.0, {1.0, 1.0}));

    // layout id is versioned; moving a block is a contract break
    CHECK(FeatureVector{}.layout_id == std::string(features::kLayoutId));
    CHECK(std::string(features::kLayoutId).find("plr,downtime,delay,harq_tx,rb_used") !=
          std::string::npos);
}

TEST_CASE("low and high assembly lengths and the c=1 identity")
{
    auto norm = identity_norm();

    WindowMeasurements g0{0, {0, ms(2)}, {}};
    WindowMeasurements g1{1, {0, ms(2)}, {}};
    for (int i = 0; i < 5; ++i) {
        g0.devices.push_back(make_window(i, {0.1 * i, 0.1 * i}, 0, ms(2)));
        g1.devices.push_back(make_window(5 + i, {0.2 * i, 0.2 * i}, 0, ms(2)));
    }

    auto low0 = features::assemble_low(g0, norm);
    auto low1 = features::assemble_low(g1, norm);
    CHECK(low0.values.size() == 5 * 17);
    CHECK(low1.values.size() == 5 * 17);

    std::vector<std::vector<WindowMeasurements>> one_window{{g0, g1}};
    auto high = features::assemble_high(one_window, 1, norm);
    CHECK(high.values.size() == 10 * 17);

    // with c = 1 the high-level vector is the concatenated low-level blocks
    std::vector<double> expected = low0.values;
    expected.insert(expected.end(), low1.values.begin(), low1.values.end());
    CHECK(high.values == expected);

    CHECK_THROWS(features::assemble_high(one_window, 5, norm));
}

TEST_CASE("high-level statistics pool the union of samples")
{
    auto norm = identity_norm();

    // two windows with different sample counts would break a mean-of-means
    auto w1 = make_window(0, {0.0, 0.0, 0.0, 0.9}, 0, ms(2));
    auto w2 = make_window(0, {0.9, 0.9}, ms(2), ms(3));
    w2.n_ttis = 2;

    WindowMeasurements m1{0, {0, ms(2)}, {w1}};
    WindowMeasurements m2{0, {ms(2), ms(3)}, {w2}};
    std::vector<std::vector<WindowMeasurements>> both{{m1}, {m2}};
    auto high = features::assemble_high(both, 2, norm);

    // pooled mean over six samples: (0*3 + 0.9*3) / 6
    CHECK(high.values[5] == doctest::Approx(0.45));
    // sample-count-weighted mean of the window means matches exactly
    double pooled = (4.0 * (0.9 / 4.0) + 2.0 * 0.9) / 6.0;
    CHECK(high.values[5] == doctest::Approx(pooled));

    // constant samples across windows collapse to the low-level statistics
    auto c1 = make_window(0, {0.3, 0.3}, 0, ms(1));
    auto c2 = make_window(0, {0.3, 0.3}, ms(1), ms(2));
    std::vector<std::vector<WindowMeasurements>> cc{{{0, {0, ms(1)}, {c1}}},
                                                    {{0, {ms(1), ms(2)}, {c2}}}};
    auto high_const = features::assemble_high(cc, 2, norm);
    auto low_const = features::device_features(c1, norm);
    for (int i = 5; i < 17; ++i) CHECK(high_const.values[i] == doctest::Approx(low_const[i]));
}

TEST_CASE("merging device windows sums counters and pools samples")
{
    auto a = make_window(3, {1.0}, 0, ms(1));
    a.arrived = 5;
    a.delivered = 4;
    a.dropped = 1;
    a.attempts_of_completed = 7;
    a.rb_used = 7;
    a.delay_sum_s = 0.004;
    auto b = make_window(3, {2.0, 3.0}, ms(1), ms(2));
    b.arrived = 2;
    b.delivered = 2;
    b.attempts_of_completed = 2;
    b.rb_used = 2;
    b.delay_sum_s = 0.001;

    const netsim::DeviceWindow* parts[] = {&a, &b};
    auto m = features::merge_device_windows(parts);
    CHECK(m.arrived == 7);
    CHECK(m.delivered == 6);
    CHECK(m.dropped == 1);
    CHECK(m.attempts_of_completed == 9);
    CHECK(m.n_ttis == 3);
    CHECK(m.sinr_db == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(m.window.t_start == 0);
    CHECK(m.window.t_end == ms(2));
    CHECK(m.packet_loss_rate() == doctest::Approx(1.0 / 7.0));

    auto c = make_window(4, {1.0}, 0, ms(1));
    const netsim::DeviceWindow* mismatched[] = {&a, &c};
    CHECK_THROWS(features::merge_device_windows(mismatched));
}

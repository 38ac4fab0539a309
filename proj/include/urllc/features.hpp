#pragma once

#include <span>
#include <string>
#include <vector>

#include "urllc/netsim.hpp"

namespace urllc::features {

/// Fixed per-device layout: five window means followed by four order
/// statistics for each sampled signal. Any change must bump the id.
inline constexpr int kFeaturesPerDevice = 17;
inline constexpr const char* kLayoutId =
    "v1:plr,downtime,delay,harq_tx,rb_used,"
    "sinr_db[mean,median,p95,p5],path_gain_db[mean,median,p95,p5],"
    "rlc_buffer[mean,median,p95,p5]";

struct FeatureVector {
    std::vector<double> values;
    std::string layout_id = kLayoutId;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

/// Fixed affine scaling ranges, declared in the scenario config so replayed
/// experiences stay stationary. Scaled features are clamped into [-1, 1].
struct NormalizationSpec {
    Range plr{0.0, 1.0};
    Range downtime_s{0.0, 0.1};
    Range delay_s{0.0, 0.0025};
    Range harq_tx{0.0, 4.0};
    Range rb_used{0.0, 1.0};
    Range sinr_db{-10.0, 40.0};
    Range path_gain_db{-120.0, -60.0};
    Range rlc_buffer{0.0, 10.0};
};

double scale_to_unit(double x, Range r);

/// Nearest-rank percentile (no interpolation): the ceil(p/100 * n)-th
/// smallest sample, 1-based. Throws on an empty sample set.
double nearest_rank_percentile(std::span<const double> samples, double percentile);

/// 17 normalized features for one device window.
std::vector<double> device_features(const netsim::DeviceWindow& dw, const NormalizationSpec& norm);

/// Low-level state: concatenation over the gNB's devices (17 * U_b).
FeatureVector assemble_low(const netsim::WindowMeasurements& m, const NormalizationSpec& norm);

/// High-level state: per device, statistics recomputed over the union of the
/// c low-level windows' samples (not the mean of window statistics), then
/// concatenated over all devices of all gNBs (17 * U). `windows` holds c
/// entries, each the per-gNB measurements of one low-level window, oldest
/// first.
FeatureVector assemble_high(std::span<const std::vector<netsim::WindowMeasurements>> windows,
                            int timescale_ratio, const NormalizationSpec& norm);

/// Union of consecutive windows for one device: counters summed, sample
/// lists concatenated, trace prefix taken from the latest window.
netsim::DeviceWindow merge_device_windows(std::span<const netsim::DeviceWindow* const> parts);

} // namespace urllc::features

#include "urllc/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urllc::features {

namespace {

double mean_of(std::span<const double> xs)
{
    if (xs.empty()) throw std::invalid_argument("empty sample list");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

void append_stats(std::vector<double>& out, std::span<const double> samples, Range r)
{
    out.push_back(scale_to_unit(mean_of(samples), r));
    out.push_back(scale_to_unit(nearest_rank_percentile(samples, 50.0), r));
    out.push_back(scale_to_unit(nearest_rank_percentile(samples, 95.0), r));
    out.push_back(scale_to_unit(nearest_rank_percentile(samples, 5.0), r));
}

} // namespace

double scale_to_unit(double x, Range r)
{
    if (!(r.hi > r.lo)) throw std::invalid_argument("normalization range must have hi > lo");
    double v = 2.0 * (x - r.lo) / (r.hi - r.lo) - 1.0;
    return std::clamp(v, -1.0, 1.0);
}

double nearest_rank_percentile(std::span<const double> samples, double percentile)
{
    if (samples.empty()) throw std::invalid_argument("percentile of empty sample list");
    if (percentile < 0.0 || percentile > 100.0)
        throw std::invalid_argument("percentile outside [0, 100]");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

std::vector<double> device_features(const netsim::DeviceWindow& dw, const NormalizationSpec& norm)
{
    if (dw.n_ttis <= 0) throw std::invalid_argument("device features need a nonempty window");
    std::vector<double> out;
    out.reserve(kFeaturesPerDevice);
    out.push_back(scale_to_unit(dw.packet_loss_rate(), norm.plr));
    out.push_back(scale_to_unit(dw.mean_downtime_s(), norm.downtime_s));
    out.push_back(scale_to_unit(dw.mean_delay_s(), norm.delay_s));
    out.push_back(scale_to_unit(dw.mean_harq_tx(), norm.harq_tx));
    out.push_back(scale_to_unit(dw.mean_rb_used(), norm.rb_used));
    append_stats(out, dw.sinr_db, norm.sinr_db);
    append_stats(out, dw.gain_db, norm.path_gain_db);
    append_stats(out, dw.buffer_len, norm.rlc_buffer);
    return out;
}

FeatureVector assemble_low(const netsim::WindowMeasurements& m, const NormalizationSpec& norm)
{
    FeatureVector fv;
    fv.values.reserve(m.devices.size() * kFeaturesPerDevice);
    for (const auto& dw : m.devices) {
        auto f = device_features(dw, norm);
        fv.values.insert(fv.values.end(), f.begin(), f.end());
    }
    return fv;
}

netsim::DeviceWindow merge_device_windows(std::span<const netsim::DeviceWindow* const> parts)
{
    if (parts.empty()) throw std::invalid_argument("cannot merge zero windows");
    netsim::DeviceWindow out;
    out.device = parts.front()->device;
    for (const auto* p : parts) {
        if (p->device != out.device)
            throw std::invalid_argument("merge requires windows of the same device");
        out.arrived += p->arrived;
        out.delivered += p->delivered;
        out.dropped += p->dropped;
        out.attempts_of_completed += p->attempts_of_completed;
        out.rb_used += p->rb_used;
        out.n_ttis += p->n_ttis;
        out.delay_sum_s += p->delay_sum_s;
        out.sinr_db.insert(out.sinr_db.end(), p->sinr_db.begin(), p->sinr_db.end());
        out.gain_db.insert(out.gain_db.end(), p->gain_db.begin(), p->gain_db.end());
        out.buffer_len.insert(out.buffer_len.end(), p->buffer_len.begin(), p->buffer_len.end());
    }
    // the latest trace prefix covers the union window
    out.y = parts.back()->y;
    out.window = {parts.front()->window.t_start, parts.back()->window.t_end};
    return out;
}

FeatureVector assemble_high(std::span<const std::vector<netsim::WindowMeasurements>> windows,
                            int timescale_ratio, const NormalizationSpec& norm)
{
    if (static_cast<int>(windows.size()) != timescale_ratio)
        throw std::invalid_argument("high-level state needs exactly timescale_ratio windows");
    const auto& first = windows.front();
    FeatureVector fv;
    for (std::size_t b = 0; b < first.size(); ++b) {
        for (std::size_t i = 0; i < first[b].devices.size(); ++i) {
            std::vector<const netsim::DeviceWindow*> parts;
            parts.reserve(windows.size());
            for (const auto& win : windows) {
                if (win.size() != first.size() || win[b].devices.size() != first[b].devices.size())
                    throw std::invalid_argument("window shape mismatch across the high-level span");
                parts.push_back(&win[b].devices[i]);
            }
            auto merged = merge_device_windows(parts);
            auto f = device_features(merged, norm);
            fv.values.insert(fv.values.end(), f.begin(), f.end());
        }
    }
    return fv;
}

} // namespace urllc::features

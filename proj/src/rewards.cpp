#include "urllc/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace urllc::rewards {

void RewardConfig::validate() const
{
    if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("omega must be in (0, 1)");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
}

double reward_avg(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg)
{
    cfg.validate();
    if (device_kpis.empty()) throw std::invalid_argument("reward over empty device set");
    double sum = 0.0;
    for (const auto& k : device_kpis) {
        sum += cfg.omega * k.availability - (1.0 - cfg.omega) * k.crossing_rate;
    }
    return sum / (cfg.omega * static_cast<double>(device_kpis.size()));
}

namespace {

double risk_from_extrema(double min_avail, double max_crossing, const RewardConfig& cfg)
{
    double r_prime = cfg.omega * min_avail - (1.0 - cfg.omega) * max_crossing;
    double r = std::exp((cfg.eta / cfg.omega) * (r_prime - cfg.omega));
    // exp underflows to +0 for terrible KPIs; the reward contract is (0, 1]
    return std::max(r, std::numeric_limits<double>::min());
}

} // namespace

double reward_risk(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg)
{
    cfg.validate();
    if (device_kpis.empty()) throw std::invalid_argument("reward over empty device set");
    double min_avail = device_kpis.front().availability;
    double max_crossing = device_kpis.front().crossing_rate;
    for (const auto& k : device_kpis) {
        min_avail = std::min(min_avail, k.availability);
        max_crossing = std::max(max_crossing, k.crossing_rate);
    }
    return risk_from_extrema(min_avail, max_crossing, cfg);
}

double reward_low(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg)
{
    return cfg.mode == Mode::kAverage ? reward_avg(device_kpis, cfg)
                                      : reward_risk(device_kpis, cfg);
}

double reward_high(std::span<const std::vector<kpi::KpiEstimate>> per_gnb_kpis,
                   const RewardConfig& cfg)
{
    cfg.validate();
    if (per_gnb_kpis.empty()) throw std::invalid_argument("reward over empty gNB set");
    if (cfg.mode == Mode::kAverage) {
        double sum = 0.0;
        for (const auto& cell : per_gnb_kpis) sum += reward_avg(cell, cfg);
        return sum / static_cast<double>(per_gnb_kpis.size());
    }
    // risk mode: extrema taken over all devices of all cells
    bool any = false;
    double min_avail = 0.0, max_crossing = 0.0;
    for (const auto& cell : per_gnb_kpis) {
        for (const auto& k : cell) {
            if (!any) {
                min_avail = k.availability;
                max_crossing = k.crossing_rate;
                any = true;
            } else {
                min_avail = std::min(min_avail, k.availability);
                max_crossing = std::max(max_crossing, k.crossing_rate);
            }
        }
    }
    if (!any) throw std::invalid_argument("reward over empty device set");
    return risk_from_extrema(min_avail, max_crossing, cfg);
}

} // namespace urllc::rewards

#pragma once

#include <span>
#include <vector>

#include "urllc/kpi.hpp"

namespace urllc::rewards {

enum class Mode { kAverage, kRiskSensitive };

struct RewardConfig {
    double omega = 0.5; // availability weight, in (0, 1)
    double eta = 2.0;   // risk-sensitivity coefficient, > 0
    Mode mode = Mode::kRiskSensitive;

    void validate() const;
};

/// Average reward over a cell's devices:
///   r = (1 / (omega U)) sum_u [ omega a_u - (1 - omega) psi_u ].
/// Bounded above by 1, reached exactly when every a_u = 1 and psi_u = 0.
double reward_avg(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg);

/// Risk-sensitive reward from the cell's worst device:
///   r = exp((eta / omega) (r' - omega)),
///   r' = omega min_u a_u - (1 - omega) max_u psi_u.
/// Always in (0, 1], equal to 1 only at the all-perfect point.
double reward_risk(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg);

/// Mode dispatch for a single cell.
double reward_low(std::span<const kpi::KpiEstimate> device_kpis, const RewardConfig& cfg);

/// Cross-cell reward: in average mode the mean of the per-cell averages; in
/// risk mode the extrema range over every device of every cell.
double reward_high(std::span<const std::vector<kpi::KpiEstimate>> per_gnb_kpis,
                   const RewardConfig& cfg);

} // namespace urllc::rewards

#include <doctest.h>

#include <cmath>

#include "urllc/rewards.hpp"
#include "urllc/rng.hpp"

using namespace urllc;
using kpi::KpiEstimate;
using rewards::Mode;
using rewards::RewardConfig;

namespace {

KpiEstimate kp(double avail, double crossing)
{
    KpiEstimate k;
    k.availability = avail;
    k.crossing_rate = crossing;
    return k;
}

} // namespace

TEST_CASE("average reward on worked examples")
{
    RewardConfig cfg;
    cfg.mode = Mode::kAverage;

    SUBCASE("all-perfect devices reach the bound exactly")
    {
        for (double omega : {0.1, 0.5, 0.9}) {
            cfg.omega = omega;
            std::vector<KpiEstimate> kpis{kp(1, 0), kp(1, 0), kp(1, 0)};
            CHECK(rewards::reward_avg(kpis, cfg) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }

    SUBCASE("direct evaluation with a crossing penalty")
    {
        cfg.omega = 0.5;
        std::vector<KpiEstimate> kpis{kp(1.0, 0.0), kp(0.9, 10.0)};
        CHECK(rewards::reward_avg(kpis, cfg) == doctest::Approx(-4.05).epsilon(1e-12));
    }

    SUBCASE("single dead device")
    {
        cfg.omega = 0.5;
        std::vector<KpiEstimate> kpis{kp(0.0, 0.0)};
        CHECK(rewards::reward_avg(kpis, cfg) == 0.0);
    }

    CHECK_THROWS(rewards::reward_avg({}, cfg));
    cfg.omega = 1.5;
    std::vector<KpiEstimate> kpis{kp(1, 0)};
    CHECK_THROWS(rewards::reward_avg(kpis, cfg));
}

TEST_CASE("risk-sensitive reward on worked examples")
{
    RewardConfig cfg;
    cfg.mode = Mode::kRiskSensitive;

    SUBCASE("perfect extrema give exactly 1")
    {
        std::vector<KpiEstimate> kpis{kp(1, 0), kp(1, 0)};
        CHECK(rewards::reward_risk(kpis, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("direct evaluation: r' = 0.35, r = exp(-0.6)")
    {
        cfg.omega = 0.5;
        cfg.eta = 2.0;
        std::vector<KpiEstimate> kpis{kp(0.9, 0.0), kp(0.95, 0.2)};
        CHECK(rewards::reward_risk(kpis, cfg) ==
              doctest::Approx(std::exp(-0.6)).epsilon(1e-12));
        CHECK(rewards::reward_risk(kpis, cfg) == doctest::Approx(0.5488).epsilon(1e-4));
    }

    CHECK_THROWS(rewards::reward_risk({}, cfg));
}

TEST_CASE("bounds and monotonicity over random KPI tuples")
{
    Rng rng(31337);
    RewardConfig avg_cfg;
    avg_cfg.mode = Mode::kAverage;
    RewardConfig risk_cfg;
    risk_cfg.mode = Mode::kRiskSensitive;

    for (int trial = 0; trial < 2000; ++trial) {
        avg_cfg.omega = risk_cfg.omega = 0.05 + 0.9 * rng.uniform();
        risk_cfg.eta = 0.1 + 5.0 * rng.uniform();
        std::size_t n = 1 + rng.index(6);
        std::vector<KpiEstimate> kpis;
        for (std::size_t i = 0; i < n; ++i) {
            kpis.push_back(kp(rng.uniform(), rng.uniform() < 0.3 ? 0.0 : 50.0 * rng.uniform()));
        }
        double ra = rewards::reward_avg(kpis, avg_cfg);
        double rr = rewards::reward_risk(kpis, risk_cfg);
        CHECK(ra <= 1.0);
        CHECK(rr > 0.0);
        CHECK(rr <= 1.0);

        // monotone: improving any availability or reducing any crossing rate helps
        std::size_t pick = rng.index(n);
        auto better = kpis;
        better[pick].availability = std::min(1.0, better[pick].availability + 0.1);
        CHECK(rewards::reward_avg(better, avg_cfg) >= ra);
        CHECK(rewards::reward_risk(better, risk_cfg) >= rr);
        auto worse = kpis;
        worse[pick].crossing_rate += 1.0;
        CHECK(rewards::reward_avg(worse, avg_cfg) <= ra);
        CHECK(rewards::reward_risk(worse, risk_cfg) <= rr);

        // permutation invariance
        auto shuffled = kpis;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
        CHECK(rewards::reward_avg(shuffled, avg_cfg) == doctest::Approx(ra).epsilon(1e-12));
        CHECK(rewards::reward_risk(shuffled, risk_cfg) == rr);
    }
}

TEST_CASE("high-level reward composition")
{
    RewardConfig cfg;

    SUBCASE("average mode: mean of identical per-cell rewards is that reward")
    {
        cfg.mode = Mode::kAverage;
        cfg.omega = 0.5;
        std::vector<KpiEstimate> cell{kp(0.99, 1.0)};
        std::vector<std::vector<KpiEstimate>> cells{cell, cell};
        CHECK(rewards::reward_high(cells, cfg) ==
              doctest::Approx(rewards::reward_avg(cell, cfg)).epsilon(1e-15));
    }

    SUBCASE("risk mode: global extrema, not the mean of per-cell risk rewards")
    {
        cfg.mode = Mode::kRiskSensitive;
        cfg.omega = 0.5;
        cfg.eta = 2.0;
        // cell 0 has the worst availability, cell 1 the worst crossing rate
        std::vector<std::vector<KpiEstimate>> cells{{kp(0.80, 0.0), kp(1.0, 0.0)},
                                                    {kp(0.99, 0.4), kp(1.0, 0.1)}};
        double high = rewards::reward_high(cells, cfg);
        double expected = std::exp((2.0 / 0.5) * ((0.5 * 0.80 - 0.5 * 0.4) - 0.5));
        CHECK(high == doctest::Approx(expected).epsilon(1e-12));
        double mean_of_cells =
            0.5 * (rewards::reward_risk(cells[0], cfg) + rewards::reward_risk(cells[1], cfg));
        CHECK(high != doctest::Approx(mean_of_cells).epsilon(1e-6));
    }

    SUBCASE("all-perfect KPIs give 1 in both modes")
    {
        std::vector<std::vector<KpiEstimate>> cells{{kp(1, 0)}, {kp(1, 0)}};
        cfg.mode = Mode::kAverage;
        CHECK(rewards::reward_high(cells, cfg) == doctest::Approx(1.0).epsilon(1e-15));
        cfg.mode = Mode::kRiskSensitive;
        CHECK(rewards::reward_high(cells, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    }

    CHECK_THROWS(rewards::reward_high({}, cfg));
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urllc/features.hpp"
#include "urllc/netsim.hpp"
#include "urllc/rewards.hpp"
#include "urllc/sac.hpp"

namespace urllc::hier {

enum class Framework { kFixedBaseline, kFlatRl, kHrl };
enum class Phase { kTraining, kInference };

const char* framework_name(Framework f);

/// Where each agent runs. Remote agents exchange metered messages with the
/// gNB sites; co-located agents talk locally for free.
struct AgentPlacement {
    struct Entry {
        std::string agent_id;
        bool remote = false;
        int gnb = -1; // co-location site when not remote
    };
    Framework framework = Framework::kFixedBaseline;
    std::vector<Entry> entries;

    static AgentPlacement standard(Framework f, int n_gnbs);
    void validate(int n_gnbs) const;
};

/// Remote-message meter. One remote decision epoch costs one action message
/// to each gNB plus one state/reward reply from each, so 2B messages.
class SignalLedger {
public:
    void record_remote_step(const std::string& agent, Phase phase, int n_gnbs);

    std::int64_t total() const;
    std::int64_t total(Phase phase) const;

    struct Counts {
        std::int64_t to_gnb = 0;
        std::int64_t from_gnb = 0;
        friend bool operator==(const Counts&, const Counts&) = default;
    };
    const std::map<std::pair<std::string, int>, Counts>& counters() const { return counters_; }

    void merge(const SignalLedger& other);

    std::optional<std::int64_t> convergence_step;

    friend bool operator==(const SignalLedger&, const SignalLedger&) = default;

private:
    std::map<std::pair<std::string, int>, Counts> counters_; // key: (agent, phase index)
};

/// Closed-form remote-message total over a fixed horizon of low-level steps:
/// flat RL pays 2B per low-level step, HRL pays 2B per high-level step.
std::int64_t count_signals(Framework f, std::int64_t n_low_steps, int timescale_ratio, int n_gnbs);

struct ConvergenceDetector {
    int window = 20;      // iterations per moving average
    double tolerance = 0.01;
    int patience = 3;     // consecutive passing checks required

    void validate() const;
};

/// First iteration (1-based) at which |MA_w(t) - MA_w(t - w)| < tolerance has
/// held for `patience` consecutive iterations; nullopt if it never does.
std::optional<int> detect_convergence(std::span<const double> series,
                                      const ConvergenceDetector& det);

/// Decision-maker behind one agent role. `reward` is the return of the
/// previous decision's window and is absent on the first call of an episode.
/// Returns the level values to apply.
class Actor {
public:
    virtual ~Actor() = default;
    virtual std::vector<double> decide(std::span<const double> state, std::optional<double> reward,
                                       std::int64_t step, bool explore) = 0;
    virtual void episode_reset(std::uint64_t /*seed*/) {}
};

class FixedActor : public Actor {
public:
    explicit FixedActor(std::vector<double> values) : values_(std::move(values)) {}
    std::vector<double> decide(std::span<const double>, std::optional<double>, std::int64_t,
                               bool) override
    {
        return values_;
    }

private:
    std::vector<double> values_;
};

/// Owns a SacAgent: reconstructs (s, a, r, s') tuples from consecutive
/// decide() calls, stores them, and trains after each stored transition.
/// The transition whose before-state would be the synthetic zero state of
/// the first call is skipped.
class SacActor : public Actor {
public:
    SacActor(learn::SacAgent agent, learn::StepKind kind, bool learning);

    std::vector<double> decide(std::span<const double> state, std::optional<double> reward,
                               std::int64_t step, bool explore) override;
    void episode_reset(std::uint64_t seed) override;

    learn::SacAgent& agent() { return agent_; }
    const learn::SacAgent& agent() const { return agent_; }
    void set_learning(bool learning) { learning_ = learning; }

private:
    learn::SacAgent agent_;
    learn::StepKind kind_;
    bool learning_ = true;
    bool prev_state_real_ = false;
    std::vector<double> prev_state_;
    std::vector<int> prev_action_;
};

/// The agents of one framework. Flat RL owns exactly `flat`; HRL owns `high`
/// plus one `low` per gNB; the fixed baseline owns none.
struct AgentSet {
    Framework framework = Framework::kFixedBaseline;
    std::unique_ptr<Actor> flat;
    std::unique_ptr<Actor> high;
    std::vector<std::unique_ptr<Actor>> low;

    void validate(int n_gnbs) const;
};

// action heads per role
learn::BranchingHead flat_head(const netsim::ScenarioConfig& s);
learn::BranchingHead high_head(const netsim::ScenarioConfig& s);
learn::BranchingHead low_head(const netsim::ScenarioConfig& s, int gnb);

struct StepRecord {
    std::int64_t step = 0;
    std::string agent;
    std::optional<double> reward; // reward delivered with this decision
    std::vector<double> action;
};

struct DeviceKpi {
    int device = 0;
    double availability = 1.0;
    double crossing_rate = 0.0;
    double mean_uptime_s = 0.0;
};

struct EpisodeLog {
    std::vector<StepRecord> steps;
    std::int64_t n_low_steps = 0;  // low-level decision epochs
    std::int64_t n_high_steps = 0; // high-level decision epochs
    SignalLedger ledger;
    std::vector<DeviceKpi> device_kpis; // whole-episode KPIs per device
    std::vector<kpi::BinarySignal> y_traces;
    double mean_step_reward = 0.0; // global per-window reward, averaged

    void write_csv(std::ostream& out) const; // step records
};

struct EpisodeOptions {
    bool explore = true;
    Phase phase = Phase::kTraining;
    std::uint64_t reset_seed = 0;
    bool keep_traces = false;
};

/// One episode of the two-timescale loop. Per low step k: the high-level
/// agent acts first when k is a multiple of the timescale ratio (so the
/// low-level agents already see the new powers), then every low-level agent
/// acts, then the simulator advances one window. Rewards and states handed
/// to an agent always describe the previous completed window on its own
/// timescale.
EpisodeLog run_episode(netsim::Simulator& sim, AgentSet& agents,
                       const rewards::RewardConfig& reward_cfg,
                       const features::NormalizationSpec& norm, const EpisodeOptions& opts);

} // namespace urllc::hier

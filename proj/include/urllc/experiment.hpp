#pragma once

#include <optional>
#include <string>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/hierarchy.hpp"

namespace urllc::cli {

enum class Setup { kMaxRetPwr, kRlAvg, kRlRiskSen, kHrlAvg, kHrlRiskSen };

Setup parse_setup(const std::string& name); // maxretpwr | rlavg | rlrisksen | hrlavg | hrlrisksen
const char* setup_name(Setup s);
hier::Framework framework_of(Setup s);
bool is_learning(Setup s);

/// Reward mode implied by the setup; nullopt keeps the configured mode.
std::optional<rewards::Mode> reward_mode_of(Setup s);

struct MetricRow {
    int eval_episode = 0;
    int device = 0;
    double availability = 1.0;
    double crossing_rate = 0.0;
    double mean_uptime_s = 0.0;
};

struct RunOutcome {
    std::string run_id;
    Setup setup = Setup::kMaxRetPwr;
    std::uint64_t seed = 0;
    int episodes_trained = 0;
    std::optional<int> convergence_episode; // 1-based, training reward series
    hier::SignalLedger ledger;
    std::vector<double> training_rewards; // one per training episode
    std::vector<double> eval_rewards;     // one per evaluation episode
    std::vector<MetricRow> metrics;       // one per (eval episode, device)
    std::vector<kpi::BinarySignal> sample_traces; // eval episode 0, per device

    double mean_availability() const;
    double p5_availability() const;
    double mean_crossing_rate() const;
};

/// Agents for one setup, freshly seeded.
hier::AgentSet build_agents(const config::ExperimentConfig& cfg, Setup setup, std::uint64_t seed);

/// Replace the in-process learners with wire-connected external agents: listen
/// on `endpoint`, wait for one hello per expected agent id, and wrap the
/// sessions as actors.
hier::AgentSet connect_gateway_agents(const std::string& endpoint,
                                      const netsim::ScenarioConfig& scenario,
                                      hier::Framework framework);

/// Train (if the setup learns) until convergence or the episode budget, then
/// evaluate the greedy policy on fresh evaluation seeds. Pure in-memory; the
/// file-writing wrapper below layers persistence on top.
RunOutcome run_single(const config::ExperimentConfig& cfg, Setup setup, std::uint64_t seed,
                      hier::AgentSet* external_agents = nullptr, bool keep_traces = false);

struct ExperimentSpec {
    config::ExperimentConfig cfg;
    Setup setup = Setup::kMaxRetPwr;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    bool dump_traces = false;
    std::string gateway_endpoint; // empty = in-process agents
};

void run_experiment(const ExperimentSpec& spec);

/// Plot-ready CSVs (CDF / CCDF / error-bar stats / signal bars) from the
/// metrics and signals files in `metrics_dir`; pure function of those files.
void emit_plot_data(const std::string& metrics_dir);

// seed streams
std::uint64_t channel_seed(std::uint64_t base);
std::uint64_t episode_seed(std::uint64_t base, int episode);
std::uint64_t eval_seed(std::uint64_t base, int eval_episode);
std::uint64_t agent_seed(std::uint64_t base, int ordinal);

} // namespace urllc::cli

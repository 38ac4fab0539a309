#pragma once

#include <iosfwd>
#include <string>

#include "urllc/channel.hpp"
#include "urllc/features.hpp"
#include "urllc/hierarchy.hpp"
#include "urllc/netsim.hpp"
#include "urllc/rewards.hpp"
#include "urllc/sac.hpp"

namespace urllc::config {

/// Everything a run needs, loadable from a `key=value` text file (one key
/// per line, `#` comments). Unknown keys and malformed values are hard
/// errors that name the key. `write_resolved` materializes every effective
/// value back out, so a run is reproducible from that file alone.
struct ExperimentConfig {
    netsim::ScenarioConfig scenario;
    channel::RadioConfig radio;
    channel::SyntheticChannelParams synth;
    std::string channel_mode = "static"; // static | gauss_markov | ingested
    std::string gains_csv;               // required for ingested mode
    features::NormalizationSpec norm;
    rewards::RewardConfig reward;
    learn::AgentHyperparams hyper;
    hier::ConvergenceDetector convergence;
    int episode_budget = 300;
    int eval_episodes = 10;

    void apply(const std::string& key, const std::string& value);
    void validate() const;

    static ExperimentConfig from_stream(std::istream& in);
    static ExperimentConfig from_file(const std::string& path);

    void write_resolved(std::ostream& out) const;

    /// The path-gain field for one run (seeded synthetic or ingested file).
    channel::PathGainField make_field(std::uint64_t channel_seed) const;
};

} // namespace urllc::config

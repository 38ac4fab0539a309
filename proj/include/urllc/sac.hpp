#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urllc/mlp.hpp"
#include "urllc/replay.hpp"
#include "urllc/rng.hpp"

namespace urllc::learn {

/// Factored discrete action space: one independent logit group per action
/// dimension, so the network output width is the sum (not the product) of
/// the per-dimension level-set sizes.
struct BranchingHead {
    std::vector<std::vector<double>> levels; // level values per dimension

    int dims() const { return static_cast<int>(levels.size()); }
    int width() const;
    int offset(int dim) const; // start of dimension's logit group
    void validate() const;

    friend bool operator==(const BranchingHead&, const BranchingHead&) = default;
};

struct AgentHyperparams {
    double discount = 0.1;
    double learning_rate = 3e-4;
    int batch_size = 200;
    double entropy_temperature = 0.2;
    double target_update_rate = 0.005;
    std::size_t replay_capacity = 100000;
    std::vector<int> hidden = {128, 128};
    // exploration schedule: the sampling temperature starts at
    // entropy_temperature * explore_temp_scale and decays linearly to
    // entropy_temperature over explore_decay_steps exploratory actions
    double explore_temp_scale = 3.0;
    std::int64_t explore_decay_steps = 1500;

    void validate() const;
};

/// Discrete soft actor-critic over a branching head. The critic learns
/// per-dimension soft Q values against a Polyak-averaged target (the joint
/// soft state value is the mean of the dimension-wise soft values); the
/// actor's per-head softmax is regressed (MSE, mini-batch SGD) onto the
/// Boltzmann distribution of the critic's Q values.
class SacAgent {
public:
    SacAgent(int state_dim, BranchingHead head, AgentHyperparams hp, std::uint64_t seed);

    int state_dim() const { return state_dim_; }
    const BranchingHead& head() const { return head_; }
    const AgentHyperparams& hyperparams() const { return hp_; }

    /// Level index per dimension. explore=true samples each head from
    /// softmax(logits / tau), explore=false takes the per-head argmax.
    /// Throws on non-finite logits.
    std::vector<int> act(std::span<const double> state, bool explore);

    std::vector<double> values_of(std::span<const int> action_idx) const;

    void store(Transition t);
    std::size_t replay_size() const { return replay_.size(); }
    const ReplayBuffer& replay() const { return replay_; }

    struct Diagnostics {
        double critic_loss = 0.0;
        double actor_loss = 0.0;
        std::vector<double> head_entropy; // mean over the batch, per dimension
    };
    /// One mini-batch update; no-op (nullopt) while the buffer is short.
    /// Throws on non-finite losses.
    std::optional<Diagnostics> learn_step();

    /// Per-head Boltzmann probabilities of the actor at this state.
    std::vector<std::vector<double>> policy(std::span<const double> state) const;
    /// Per-dimension Q values of the critic at this state.
    std::vector<std::vector<double>> q_values(std::span<const double> state) const;

    void save(std::ostream& out) const;
    static SacAgent load(std::istream& in);

private:
    SacAgent() = default;

    double explore_temperature() const;

    int state_dim_ = 0;
    BranchingHead head_;
    AgentHyperparams hp_;
    Mlp actor_{{1, 1}, 0};
    Mlp critic_{{1, 1}, 0};
    Mlp target_critic_{{1, 1}, 0};
    ReplayBuffer replay_{1};
    Rng rng_{0};
    std::int64_t explore_calls_ = 0;
    std::int64_t learn_calls_ = 0;
};

/// softmax(z / tau) with the usual max-shift; tau must be positive.
std::vector<double> softmax(std::span<const double> logits, double tau);

} // namespace urllc::learn

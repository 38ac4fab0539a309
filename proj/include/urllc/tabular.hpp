#pragma once

#include <cstdint>
#include <vector>

#include "urllc/rng.hpp"

namespace urllc::learn {

/// Tabular soft Q-learning over enumerated state bins: Boltzmann behavior
/// policy, exact per-transition Bellman updates toward the soft value
///   V(s') = tau * logsumexp(Q(s', .) / tau)
/// (the hard max when tau == 0). Small-scale fallback and test oracle for
/// the neural agent.
class TabularSoftQ {
public:
    TabularSoftQ(int n_states, int n_actions, double learning_rate, double discount, double tau,
                 std::uint64_t seed);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }

    int act(int state, bool explore);
    int greedy(int state) const;

    void update(int state, int action, double reward, int next_state);

    double q(int state, int action) const;
    double soft_value(int state) const;

private:
    int n_states_;
    int n_actions_;
    double lr_;
    double discount_;
    double tau_;
    std::vector<double> table_; // [state * n_actions + action]
    Rng rng_;
};

} // namespace urllc::learn

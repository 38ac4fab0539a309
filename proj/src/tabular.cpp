#include "urllc/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "urllc/sac.hpp"

namespace urllc::learn {

TabularSoftQ::TabularSoftQ(int n_states, int n_actions, double learning_rate, double discount,
                           double tau, std::uint64_t seed)
    : n_states_(n_states),
      n_actions_(n_actions),
      lr_(learning_rate),
      discount_(discount),
      tau_(tau),
      table_(static_cast<std::size_t>(n_states) * n_actions, 0.0),
      rng_(seed)
{
    if (n_states < 1 || n_actions < 1) throw std::invalid_argument("table dimensions must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in [0,1)");
    if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
}

double TabularSoftQ::q(int state, int action) const
{
    if (state < 0 || state >= n_states_ || action < 0 || action >= n_actions_)
        throw std::invalid_argument("state or action out of range");
    return table_[static_cast<std::size_t>(state) * n_actions_ + action];
}

double TabularSoftQ::soft_value(int state) const
{
    std::span<const double> row(table_.data() + static_cast<std::size_t>(state) * n_actions_,
                                static_cast<std::size_t>(n_actions_));
    double m = *std::max_element(row.begin(), row.end());
    if (tau_ == 0.0) return m;
    double s = 0.0;
    for (double v : row) s += std::exp((v - m) / tau_);
    return m + tau_ * std::log(s);
}

int TabularSoftQ::greedy(int state) const
{
    std::span<const double> row(table_.data() + static_cast<std::size_t>(state) * n_actions_,
                                static_cast<std::size_t>(n_actions_));
    return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

int TabularSoftQ::act(int state, bool explore)
{
    if (!explore || tau_ == 0.0) return greedy(state);
    std::span<const double> row(table_.data() + static_cast<std::size_t>(state) * n_actions_,
                                static_cast<std::size_t>(n_actions_));
    auto p = softmax(row, tau_);
    double u = rng_.uniform();
    double acc = 0.0;
    for (int a = 0; a < n_actions_; ++a) {
        acc += p[a];
        if (u < acc) return a;
    }
    return n_actions_ - 1;
}

void TabularSoftQ::update(int state, int action, double reward, int next_state)
{
    double target = reward + discount_ * soft_value(next_state);
    double& cell = table_[static_cast<std::size_t>(state) * n_actions_ + action];
    cell += lr_ * (target - cell);
}

} // namespace urllc::learn

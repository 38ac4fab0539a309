#include "urllc/sac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace urllc::learn {

namespace {

void require(bool cond, const char* msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double logsumexp_over_tau(std::span<const double> q, double tau)
{
    double m = *std::max_element(q.begin(), q.end());
    double s = 0.0;
    for (double v : q) s += std::exp((v - m) / tau);
    return m + tau * std::log(s);
}

} // namespace

int BranchingHead::width() const
{
    int w = 0;
    for (const auto& l : levels) w += static_cast<int>(l.size());
    return w;
}

int BranchingHead::offset(int dim) const
{
    int off = 0;
    for (int d = 0; d < dim; ++d) off += static_cast<int>(levels[d].size());
    return off;
}

void BranchingHead::validate() const
{
    require(!levels.empty(), "branching head needs at least one dimension");
    for (const auto& l : levels) require(!l.empty(), "every level set must be nonempty");
}

void AgentHyperparams::validate() const
{
    require(discount >= 0.0 && discount < 1.0, "discount must be in [0, 1)");
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(entropy_temperature > 0.0, "entropy_temperature must be > 0");
    require(target_update_rate > 0.0 && target_update_rate <= 1.0,
            "target_update_rate must be in (0, 1]");
    require(replay_capacity >= static_cast<std::size_t>(batch_size),
            "replay_capacity must hold at least one batch");
    require(explore_temp_scale >= 1.0, "explore_temp_scale must be >= 1");
    require(explore_decay_steps >= 1, "explore_decay_steps must be >= 1");
}

std::vector<double> softmax(std::span<const double> logits, double tau)
{
    require(tau > 0.0, "softmax temperature must be positive");
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp((logits[i] - m) / tau);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

SacAgent::SacAgent(int state_dim, BranchingHead head, AgentHyperparams hp, std::uint64_t seed)
    : state_dim_(state_dim),
      head_(std::move(head)),
      hp_(hp),
      actor_({1, 1}, 0),
      critic_({1, 1}, 0),
      target_critic_({1, 1}, 0),
      replay_(hp.replay_capacity),
      rng_(derive_seed(seed, 0x5ac))
{
    require(state_dim_ >= 1, "state dimension must be positive");
    head_.validate();
    hp_.validate();
    std::vector<int> sizes;
    sizes.push_back(state_dim_);
    sizes.insert(sizes.end(), hp_.hidden.begin(), hp_.hidden.end());
    sizes.push_back(head_.width());
    actor_ = Mlp(sizes, derive_seed(seed, 1));
    critic_ = Mlp(sizes, derive_seed(seed, 2));
    target_critic_ = critic_;
}

double SacAgent::explore_temperature() const
{
    double frac = std::min(1.0, static_cast<double>(explore_calls_) /
                                    static_cast<double>(hp_.explore_decay_steps));
    double scale = hp_.explore_temp_scale + frac * (1.0 - hp_.explore_temp_scale);
    return hp_.entropy_temperature * scale;
}

std::vector<int> SacAgent::act(std::span<const double> state, bool explore)
{
    auto logits = actor_.forward(state);
    for (double v : logits) {
        if (!std::isfinite(v)) throw std::runtime_error("non-finite policy logits");
    }
    std::vector<int> choice(static_cast<std::size_t>(head_.dims()));
    double tau = explore ? explore_temperature() : hp_.entropy_temperature;
    if (explore) ++explore_calls_;
    for (int d = 0; d < head_.dims(); ++d) {
        const int off = head_.offset(d);
        const int n = static_cast<int>(head_.levels[d].size());
        std::span<const double> group(logits.data() + off, static_cast<std::size_t>(n));
        if (explore) {
            auto p = softmax(group, tau);
            double u = rng_.uniform();
            double acc = 0.0;
            int pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += p[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            choice[d] = pick;
        } else {
            choice[d] = static_cast<int>(
                std::max_element(group.begin(), group.end()) - group.begin());
        }
    }
    return choice;
}

std::vector<double> SacAgent::values_of(std::span<const int> action_idx) const
{
    require(static_cast<int>(action_idx.size()) == head_.dims(), "action index length mismatch");
    std::vector<double> vals(action_idx.size());
    for (int d = 0; d < head_.dims(); ++d) {
        const auto& lv = head_.levels[d];
        require(action_idx[d] >= 0 && action_idx[d] < static_cast<int>(lv.size()),
                "action index out of range");
        vals[d] = lv[action_idx[d]];
    }
    return vals;
}

void SacAgent::store(Transition t)
{
    require(static_cast<int>(t.state.size()) == state_dim_, "transition state size mismatch");
    require(static_cast<int>(t.next_state.size()) == state_dim_,
            "transition next-state size mismatch");
    require(static_cast<int>(t.action.size()) == head_.dims(), "transition action size mismatch");
    replay_.push(std::move(t));
}

std::optional<SacAgent::Diagnostics> SacAgent::learn_step()
{
    if (replay_.size() < static_cast<std::size_t>(hp_.batch_size)) return std::nullopt;
    const auto idx = replay_.sample_indices(hp_.batch_size, rng_);
    const int dims = head_.dims();
    const double tau = hp_.entropy_temperature;
    const double inv_bd = 1.0 / (static_cast<double>(hp_.batch_size) * dims);

    Diagnostics diag;
    diag.head_entropy.assign(static_cast<std::size_t>(dims), 0.0);

    // critic: per-dimension soft Q regression onto r + gamma * mean_d V_d(s')
    auto critic_grads = critic_.zero_gradients();
    std::vector<double> targets(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const Transition& tr = replay_.at(idx[s]);
        auto tq = target_critic_.forward(tr.next_state);
        double v_next = 0.0;
        for (int d = 0; d < dims; ++d) {
            std::span<const double> group(tq.data() + head_.offset(d), head_.levels[d].size());
            v_next += logsumexp_over_tau(group, tau);
        }
        v_next /= dims;
        targets[s] = tr.reward + hp_.discount * v_next;
    }
    double critic_loss = 0.0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const Transition& tr = replay_.at(idx[s]);
        Mlp::Workspace ws;
        auto q = critic_.forward(tr.state, ws);
        std::vector<double> dq(q.size(), 0.0);
        for (int d = 0; d < dims; ++d) {
            const int j = head_.offset(d) + tr.action[d];
            const double err = q[j] - targets[s];
            critic_loss += err * err * inv_bd;
            dq[j] = 2.0 * err * inv_bd;
        }
        critic_.backward(tr.state, ws, dq, critic_grads);
    }
    critic_.sgd_step(critic_grads, hp_.learning_rate);

    // actor: per-head softmax regressed onto the critic's Boltzmann weights
    auto actor_grads = actor_.zero_gradients();
    double actor_loss = 0.0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const Transition& tr = replay_.at(idx[s]);
        auto q = critic_.forward(tr.state);
        Mlp::Workspace ws;
        auto logits = actor_.forward(tr.state, ws);
        std::vector<double> dlogits(logits.size(), 0.0);
        for (int d = 0; d < dims; ++d) {
            const int off = head_.offset(d);
            const int n = static_cast<int>(head_.levels[d].size());
            auto target_p = softmax({q.data() + off, static_cast<std::size_t>(n)}, tau);
            auto pi = softmax({logits.data() + off, static_cast<std::size_t>(n)}, tau);
            // dL/dlogit_k = (2 / tau) * sum_i (pi_i - p_i) * pi_i (delta_ik - pi_k)
            double inner = 0.0;
            for (int i = 0; i < n; ++i) {
                double diff = pi[i] - target_p[i];
                actor_loss += diff * diff * inv_bd;
                inner += diff * pi[i];
            }
            for (int k = 0; k < n; ++k) {
                double g = 0.0;
                for (int i = 0; i < n; ++i) {
                    double diff = pi[i] - target_p[i];
                    g += diff * pi[i] * ((i == k ? 1.0 : 0.0) - pi[k]);
                }
                dlogits[off + k] = 2.0 * g * inv_bd / tau;
            }
            for (int i = 0; i < n; ++i) {
                if (pi[i] > 0.0) diag.head_entropy[d] -= pi[i] * std::log(pi[i]);
            }
        }
        actor_.backward(tr.state, ws, dlogits, actor_grads);
    }
    actor_.sgd_step(actor_grads, hp_.learning_rate);
    target_critic_.polyak_from(critic_, hp_.target_update_rate);

    for (auto& h : diag.head_entropy) h /= static_cast<double>(hp_.batch_size);
    diag.critic_loss = critic_loss;
    diag.actor_loss = actor_loss;
    if (!std::isfinite(critic_loss) || !std::isfinite(actor_loss))
        throw std::runtime_error("non-finite training loss");
    ++learn_calls_;
    return diag;
}

std::vector<std::vector<double>> SacAgent::policy(std::span<const double> state) const
{
    auto logits = actor_.forward(state);
    std::vector<std::vector<double>> out;
    for (int d = 0; d < head_.dims(); ++d) {
        out.push_back(softmax({logits.data() + head_.offset(d), head_.levels[d].size()},
                              hp_.entropy_temperature));
    }
    return out;
}

std::vector<std::vector<double>> SacAgent::q_values(std::span<const double> state) const
{
    auto q = critic_.forward(state);
    std::vector<std::vector<double>> out;
    for (int d = 0; d < head_.dims(); ++d) {
        const int off = head_.offset(d);
        out.emplace_back(q.begin() + off,
                         q.begin() + off + static_cast<int>(head_.levels[d].size()));
    }
    return out;
}

void SacAgent::save(std::ostream& out) const
{
    out << "urllc-agent v1\n";
    out << "state_dim " << state_dim_ << '\n';
    out << "dims " << head_.dims() << '\n';
    for (int d = 0; d < head_.dims(); ++d) {
        out << "levels " << head_.levels[d].size();
        for (double v : head_.levels[d]) out << ' ' << fmt_double(v);
        out << '\n';
    }
    out << "hyper " << fmt_double(hp_.discount) << ' ' << fmt_double(hp_.learning_rate) << ' '
        << hp_.batch_size << ' ' << fmt_double(hp_.entropy_temperature) << ' '
        << fmt_double(hp_.target_update_rate) << ' ' << hp_.replay_capacity << ' '
        << fmt_double(hp_.explore_temp_scale) << ' ' << hp_.explore_decay_steps;
    out << " hidden " << hp_.hidden.size();
    for (int h : hp_.hidden) out << ' ' << h;
    out << '\n';
    out << "counters " << explore_calls_ << ' ' << learn_calls_ << '\n';
    out << "rng " << rng_ << '\n';
    actor_.save(out);
    critic_.save(out);
    target_critic_.save(out);
}

SacAgent SacAgent::load(std::istream& in)
{
    std::string tag, version;
    in >> tag >> version;
    if (tag != "urllc-agent" || version != "v1")
        throw std::invalid_argument("bad agent checkpoint header");
    SacAgent a;
    std::string key;
    in >> key >> a.state_dim_;
    if (key != "state_dim") throw std::invalid_argument("bad checkpoint field: " + key);
    int dims = 0;
    in >> key >> dims;
    if (key != "dims" || dims < 1) throw std::invalid_argument("bad checkpoint dims");
    a.head_.levels.resize(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
        std::size_t n = 0;
        in >> key >> n;
        if (key != "levels") throw std::invalid_argument("bad checkpoint levels");
        a.head_.levels[d].resize(n);
        for (auto& v : a.head_.levels[d]) in >> v;
    }
    in >> key;
    if (key != "hyper") throw std::invalid_argument("bad checkpoint hyper");
    in >> a.hp_.discount >> a.hp_.learning_rate >> a.hp_.batch_size >>
        a.hp_.entropy_temperature >> a.hp_.target_update_rate >> a.hp_.replay_capacity >>
        a.hp_.explore_temp_scale >> a.hp_.explore_decay_steps;
    std::size_t nh = 0;
    in >> key >> nh;
    if (key != "hidden") throw std::invalid_argument("bad checkpoint hidden");
    a.hp_.hidden.resize(nh);
    for (auto& h : a.hp_.hidden) in >> h;
    in >> key >> a.explore_calls_ >> a.learn_calls_;
    if (key != "counters") throw std::invalid_argument("bad checkpoint counters");
    in >> key >> a.rng_;
    if (key != "rng") throw std::invalid_argument("bad checkpoint rng");
    a.actor_ = Mlp::load(in);
    a.critic_ = Mlp::load(in);
    a.target_critic_ = Mlp::load(in);
    a.replay_ = ReplayBuffer(a.hp_.replay_capacity);
    a.head_.validate();
    a.hp_.validate();
    return a;
}

} // namespace urllc::learn

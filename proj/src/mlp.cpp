#include "urllc/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "urllc/rng.hpp"

namespace urllc::learn {

namespace {

void require(bool cond, const char* msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

Mlp::Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : layer_sizes_(std::move(layer_sizes))
{
    require(layer_sizes_.size() >= 2, "network needs at least input and output layers");
    for (int s : layer_sizes_) require(s >= 1, "layer sizes must be positive");

    Rng rng(seed);
    const std::size_t n_layers = layer_sizes_.size() - 1;
    weights_.resize(n_layers);
    biases_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in = layer_sizes_[l];
        const int out = layer_sizes_[l + 1];
        weights_[l].resize(static_cast<std::size_t>(in) * out);
        biases_[l].assign(static_cast<std::size_t>(out), 0.0);
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (auto& w : weights_[l]) w = scale * rng.normal();
    }
}

std::vector<double> Mlp::forward(std::span<const double> x) const
{
    Workspace ws;
    return forward(x, ws);
}

std::vector<double> Mlp::forward(std::span<const double> x, Workspace& ws) const
{
    require(static_cast<int>(x.size()) == input_size(), "input size mismatch");
    const std::size_t n_layers = weights_.size();
    ws.pre.assign(n_layers, {});
    ws.post.assign(n_layers, {});

    std::vector<double> act(x.begin(), x.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in = layer_sizes_[l];
        const int out = layer_sizes_[l + 1];
        std::vector<double> z(static_cast<std::size_t>(out));
        const double* w = weights_[l].data();
        for (int o = 0; o < out; ++o) {
            double acc = biases_[l][o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * act[i];
            z[o] = acc;
        }
        ws.pre[l] = z;
        if (l + 1 < n_layers) {
            for (auto& v : z) v = v > 0.0 ? v : 0.0;
        }
        ws.post[l] = z;
        act = std::move(z);
    }
    return act;
}

Mlp::Gradients Mlp::zero_gradients() const
{
    Gradients g;
    g.w.resize(weights_.size());
    g.b.resize(biases_.size());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        g.w[l].assign(weights_[l].size(), 0.0);
        g.b[l].assign(biases_[l].size(), 0.0);
    }
    return g;
}

void Mlp::Gradients::scale(double factor)
{
    for (auto& layer : w)
        for (auto& v : layer) v *= factor;
    for (auto& layer : b)
        for (auto& v : layer) v *= factor;
}

void Mlp::backward(std::span<const double> x, const Workspace& ws,
                   std::span<const double> dloss_dy, Gradients& grads) const
{
    require(static_cast<int>(dloss_dy.size()) == output_size(), "output gradient size mismatch");
    const std::size_t n_layers = weights_.size();
    std::vector<double> delta(dloss_dy.begin(), dloss_dy.end());

    for (std::size_t l = n_layers; l-- > 0;) {
        const int in = layer_sizes_[l];
        const int out = layer_sizes_[l + 1];
        std::span<const double> input = l == 0 ? x : std::span<const double>(ws.post[l - 1]);
        // accumulate dL/dW and dL/db
        for (int o = 0; o < out; ++o) {
            const double d = delta[o];
            grads.b[l][o] += d;
            double* grow = grads.w[l].data() + static_cast<std::size_t>(o) * in;
            const double* inp = input.data();
            for (int i = 0; i < in; ++i) grow[i] += d * inp[i];
        }
        if (l == 0) break;
        // propagate through the layer and its rectifier
        std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
        const double* w = weights_[l].data();
        for (int o = 0; o < out; ++o) {
            const double d = delta[o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) prev[i] += d * row[i];
        }
        for (int i = 0; i < in; ++i) {
            if (ws.pre[l - 1][i] <= 0.0) prev[i] = 0.0;
        }
        delta = std::move(prev);
    }
}

void Mlp::sgd_step(const Gradients& grads, double learning_rate)
{
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (std::size_t i = 0; i < weights_[l].size(); ++i)
            weights_[l][i] -= learning_rate * grads.w[l][i];
        for (std::size_t i = 0; i < biases_[l].size(); ++i)
            biases_[l][i] -= learning_rate * grads.b[l][i];
    }
}

void Mlp::polyak_from(const Mlp& source, double rate)
{
    require(layer_sizes_ == source.layer_sizes_, "polyak requires identical architectures");
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (std::size_t i = 0; i < weights_[l].size(); ++i)
            weights_[l][i] += rate * (source.weights_[l][i] - weights_[l][i]);
        for (std::size_t i = 0; i < biases_[l].size(); ++i)
            biases_[l][i] += rate * (source.biases_[l][i] - biases_[l][i]);
    }
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

std::vector<double> Mlp::flatten_parameters() const
{
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].begin(), weights_[l].end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void Mlp::load_parameters(std::span<const double> flat)
{
    require(flat.size() == parameter_count(), "flat parameter size mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (auto& w : weights_[l]) w = flat[k++];
        for (auto& b : biases_[l]) b = flat[k++];
    }
}

void Mlp::save(std::ostream& out) const
{
    out << "mlp " << layer_sizes_.size();
    for (int s : layer_sizes_) out << ' ' << s;
    out << '\n';
    char buf[40];
    auto flat = flatten_parameters();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", flat[i]);
        out << buf << ((i + 1) % 8 == 0 ? '\n' : ' ');
    }
    out << '\n';
}

Mlp Mlp::load(std::istream& in)
{
    std::string tag;
    in >> tag;
    if (tag != "mlp") throw std::invalid_argument("bad mlp header: " + tag);
    std::size_t n = 0;
    in >> n;
    if (!in || n < 2 || n > 64) throw std::invalid_argument("bad mlp layer count");
    std::vector<int> sizes(n);
    for (auto& s : sizes) in >> s;
    Mlp net;
    net.layer_sizes_ = sizes;
    net.weights_.resize(n - 1);
    net.biases_.resize(n - 1);
    for (std::size_t l = 0; l + 1 < n; ++l) {
        net.weights_[l].resize(static_cast<std::size_t>(sizes[l]) * sizes[l + 1]);
        net.biases_[l].resize(static_cast<std::size_t>(sizes[l + 1]));
    }
    std::vector<double> flat(net.parameter_count());
    for (auto& v : flat) in >> v;
    if (!in) throw std::invalid_argument("truncated mlp parameters");
    net.load_parameters(flat);
    return net;
}

} // namespace urllc::learn

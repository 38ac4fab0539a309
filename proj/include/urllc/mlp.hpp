#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace urllc::learn {

/// Fully-connected network with rectifier hidden layers and a linear output,
/// plain hand-written forward/backward. Parameters are double precision so
/// gradient checks against central differences are meaningful.
class Mlp {
public:
    Mlp(std::vector<int> layer_sizes, std::uint64_t seed);

    int input_size() const { return layer_sizes_.front(); }
    int output_size() const { return layer_sizes_.back(); }
    const std::vector<int>& layer_sizes() const { return layer_sizes_; }

    std::vector<double> forward(std::span<const double> x) const;

    /// Training-mode forward: keeps pre-activations and activations around
    /// for the matching backward call.
    struct Workspace {
        std::vector<std::vector<double>> pre;  // per layer
        std::vector<std::vector<double>> post; // per layer (post-activation)
    };
    std::vector<double> forward(std::span<const double> x, Workspace& ws) const;

    struct Gradients {
        std::vector<std::vector<double>> w; // same shapes as the layers
        std::vector<std::vector<double>> b;
        void scale(double factor);
    };
    Gradients zero_gradients() const;

    /// Accumulates exact gradients for one sample into `grads`, given the
    /// loss gradient with respect to the network output.
    void backward(std::span<const double> x, const Workspace& ws,
                  std::span<const double> dloss_dy, Gradients& grads) const;

    void sgd_step(const Gradients& grads, double learning_rate);

    /// theta_target <- (1 - rate) theta_target + rate theta_source
    void polyak_from(const Mlp& source, double rate);

    std::size_t parameter_count() const;

    // flat parameter views, used by checks and serialization
    std::vector<double> flatten_parameters() const;
    void load_parameters(std::span<const double> flat);

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);

private:
    Mlp() = default;

    std::vector<int> layer_sizes_;
    std::vector<std::vector<double>> weights_; // [layer][out * in], row-major
    std::vector<std::vector<double>> biases_;  // [layer][out]
};

} // namespace urllc::learn

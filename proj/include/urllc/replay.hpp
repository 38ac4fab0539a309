#pragma once

#include <cstdint>
#include <vector>

#include "urllc/rng.hpp"

namespace urllc::learn {

enum class StepKind : std::uint8_t { kLow = 0, kHigh = 1, kFlat = 2 };

struct Transition {
    std::vector<double> state;
    std::vector<int> action; // level index per action dimension
    double reward = 0.0;
    std::vector<double> next_state;
    StepKind kind = StepKind::kLow;
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    std::vector<std::size_t> sample_indices(int batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t write_ = 0;
    std::vector<Transition> data_;
};

} // namespace urllc::learn

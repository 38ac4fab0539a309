#include "urllc/replay.hpp"

#include <stdexcept>

namespace urllc::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t)
{
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[write_] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int batch, Rng& rng) const
{
    if (batch <= 0) throw std::invalid_argument("batch size must be positive");
    if (data_.size() < static_cast<std::size_t>(batch))
        throw std::logic_error("sampling requires size >= batch");
    std::vector<std::size_t> idx(static_cast<std::size_t>(batch));
    for (auto& i : idx) i = rng.index(data_.size());
    return idx;
}

} // namespace urllc::learn

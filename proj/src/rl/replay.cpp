#include "gelsim/rl/replay.hpp"

#include <stdexcept>

namespace gelsim::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("capacity must be > 0");
    storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (size_ < capacity_) {
        storage_.push_back(std::move(t));
        ++size_;
    } else {
        storage_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch,
                                                    std::mt19937_64& rng) const {
    if (size_ == 0) throw std::runtime_error("sampling from empty replay buffer");
    std::uniform_int_distribution<std::size_t> dist(0, size_ - 1);
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        out.push_back(&storage_[dist(rng)]);
    }
    return out;
}

}  // namespace gelsim::rl

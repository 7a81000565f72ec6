#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gelsim::rl {

struct Transition {
    Eigen::VectorXd s;
    Eigen::VectorXd a;
    double r = 0;
    Eigen::VectorXd s2;
    bool done = false;
    Eigen::VectorXd expert_v;  // demonstration action recorded at collection
};

// Fixed-capacity ring; the oldest entries are overwritten first.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& operator[](std::size_t i) const { return storage_[i]; }

    std::vector<const Transition*> sample(std::size_t batch,
                                          std::mt19937_64& rng) const;

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::vector<Transition> storage_;
};

}  // namespace gelsim::rl

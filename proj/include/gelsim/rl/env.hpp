#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace gelsim::rl {

struct StepResult {
    Eigen::VectorXd observation;
    double reward = 0;
    bool done = false;
};

// Minimal reset/step contract consumed by the TD3 loops. Implementations
// own their state; one instance per thread of execution.
class Env {
  public:
    virtual ~Env() = default;
    virtual int observation_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual double action_limit() const = 0;
    virtual int episode_length() const = 0;
    virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
    virtual StepResult step(const Eigen::VectorXd& action) = 0;
    // Demonstration action for the current state; empty when the task has
    // no expert trajectory.
    virtual Eigen::VectorXd expert_action() const = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>()>;

}  // namespace gelsim::rl

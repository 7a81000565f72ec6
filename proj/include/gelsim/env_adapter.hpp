#pragma once

#include "gelsim/rl/env.hpp"
#include "gelsim/tasks.hpp"

namespace gelsim {

// Wraps the manipulation scene as an rl::Env: actions are the actuated
// gel's commanded velocity, observations one of the three transferable
// kinds, rewards per task.
class ManipulationEnv : public rl::Env {
  public:
    ManipulationEnv(SceneConfig scene, TaskSpec task, ExpertTrajectory expert,
                    int mask_raster = 64, int mask_pooled = 16);

    int observation_dim() const override;
    int action_dim() const override;
    double action_limit() const override { return scene_.action_limit; }
    int episode_length() const override { return task_.episode_length; }
    Eigen::VectorXd reset(std::uint64_t seed) override;
    rl::StepResult step(const Eigen::VectorXd& action) override;
    Eigen::VectorXd expert_action() const override;

    const SimState& state() const;
    double initial_radius() const { return r0_; }

  private:
    Eigen::VectorXd observation() const;
    double reward() const;

    SceneConfig scene_;
    TaskSpec task_;
    ExpertTrajectory expert_;
    int mask_raster_;
    int mask_pooled_;
    double depth_threshold_;
    bool has_state_ = false;
    SimState state_;
    double r0_ = 0;
};

}  // namespace gelsim

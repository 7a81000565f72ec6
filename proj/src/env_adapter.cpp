#include "gelsim/env_adapter.hpp"

#include <stdexcept>

namespace gelsim {

ManipulationEnv::ManipulationEnv(SceneConfig scene, TaskSpec task,
                                 ExpertTrajectory expert, int mask_raster,
                                 int mask_pooled)
    : scene_(std::move(scene)), task_(task), expert_(expert),
      mask_raster_(mask_raster), mask_pooled_(mask_pooled),
      depth_threshold_(scene_.squeeze_threshold_frac *
                       scene_.gel_size[scene_.gel_axis]) {
    scene_.episode_length = task_.episode_length;
    expert_.kind = task_.kind;
}

int ManipulationEnv::observation_dim() const {
    switch (task_.observation_kind) {
        case ObservationKind::relative_position:
            return 6;
        default:
            return mask_pooled_ * mask_pooled_;
    }
}

int ManipulationEnv::action_dim() const {
    return scene_.bottom_gel_static ? 3 : 6;
}

const SimState& ManipulationEnv::state() const {
    if (!has_state_) throw std::runtime_error("env used before reset");
    return state_;
}

Eigen::VectorXd ManipulationEnv::reset(std::uint64_t seed) {
    state_ = env_reset(scene_, seed);
    has_state_ = true;
    r0_ = task_.kind == TaskKind::cylinder
              ? max_radius_planar(state_, scene_.gel_axis)
              : max_radius_3d(state_);
    return observation();
}

Eigen::VectorXd ManipulationEnv::observation() const {
    ObservationRaster raster{mask_raster_, mask_raster_};
    std::vector<double> v;
    switch (task_.observation_kind) {
        case ObservationKind::relative_position:
            v = observation_vector(sim_relative_position(state_, kGelA));
            break;
        case ObservationKind::squeezed_area:
            v = observation_vector(
                sim_squeezed_area(state_, kGelA, raster, depth_threshold_),
                mask_pooled_, mask_pooled_);
            break;
        case ObservationKind::object_contour:
            v = observation_vector(
                sim_object_contour(state_, kGelA, raster, depth_threshold_),
                mask_pooled_, mask_pooled_);
            break;
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(),
                                       static_cast<Eigen::Index>(v.size()));
}

double ManipulationEnv::reward() const {
    switch (task_.kind) {
        case TaskKind::position_control:
            return reward_position(state_, task_.target_position);
        case TaskKind::squeeze:
            return reward_squeeze(state_, task_.target_thickness);
        case TaskKind::cylinder:
            return reward_cylinder(state_, r0_, scene_.gel_axis);
        case TaskKind::sphere:
            return reward_sphere(state_, r0_);
    }
    return 0;
}

rl::StepResult ManipulationEnv::step(const Eigen::VectorXd& action) {
    if (action.size() != action_dim()) {
        throw std::invalid_argument("action dimension mismatch");
    }
    Action a;
    a.gel_a = Vec3(action[0], action[1], action[2]);
    if (action.size() == 6) a.gel_b = Vec3(action[3], action[4], action[5]);
    env_step(state_, a);
    rl::StepResult result;
    result.observation = observation();
    result.reward = reward();
    result.done = state_.step_index >= task_.episode_length;
    return result;
}

Eigen::VectorXd ManipulationEnv::expert_action() const {
    Action a = expert_velocity(expert_, state_.step_index, state_);
    Eigen::VectorXd v(action_dim());
    v.head<3>() = a.gel_a;
    if (v.size() == 6) v.tail<3>() = a.gel_b;
    // Demonstrations obey the same actuation limits as the policy.
    double limit = scene_.action_limit;
    return v.cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace gelsim

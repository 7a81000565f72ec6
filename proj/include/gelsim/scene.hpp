#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gelsim/mpm.hpp"

namespace gelsim {

enum Body : int { kGelA = 0, kGelB = 1, kObject = 2 };

struct SceneConfig {
    Vec3 object_size{0.2, 0.2, 0.2};
    Vec3 object_center{0.5, 0.5, 0.5};
    Material object_material =
        Material::make(1e4, 0.3, kYieldElastoplastic, 1000.0);
    Vec3 gel_size{0.24, 0.04, 0.24};  // transverse extents + thickness on gel_axis
    Material gel_material = Material::make(1e4, 0.3, kYieldElastic, 1000.0);
    int gel_axis = 1;          // axis along which the two gels oppose each other
    double gel_gap = 0.01;     // build-time clearance between gel face and object
    double particle_spacing = 1.0 / 128;
    double action_limit = 0.5;  // max commanded backing speed
    int substeps_per_env_step = 10;
    int episode_length = 100;
    int grid_resolution = 64;
    double dt = 2e-4;
    int boundary_margin = 3;
    Vec3 gravity = Vec3::Zero();
    bool bottom_gel_static = true;  // gel B acts as a fixed gasket
    double center_jitter_frac = 0.02;  // reset perturbation, fraction of object_size
    double reset_touch_speed = 0.25;
    int reset_max_substeps = 40000;
    double squeeze_threshold_frac = 0.15;  // depth threshold / gel thickness
};

// Rigid backing bookkeeping for one gel. Backing particles (the rearmost
// two layers) are velocity-overridden to track frame_position exactly;
// surface particles (the front layer) are what the tactile observations
// read.
struct GelInfo {
    std::vector<int> backing_indices;
    std::vector<int> surface_indices;
    std::vector<Vec3> backing_rest_offsets;  // from frame_position, at build
    std::vector<Vec3> surface_rest_offsets;
    Vec3 frame_position = Vec3::Zero();
    Vec3 inward_normal = Vec3::Zero();  // unit, points toward the object
};

struct SimState {
    SceneConfig config;
    std::vector<Particle> particles;
    std::vector<Material> materials;  // [kGelA]=gel, [kGelB]=gel, [kObject]=object
    Grid grid;
    std::array<GelInfo, 2> gels;
    std::array<Vec3, 2> initial_gel_positions{};  // observation normalization basis
    int step_index = 0;

    SubstepConfig substep_config() const {
        return {config.dt, config.gravity, config.boundary_margin};
    }
};

// Commanded translational velocity of each gel backing.
struct Action {
    Vec3 gel_a = Vec3::Zero();
    Vec3 gel_b = Vec3::Zero();
};

SimState build_scene(const SceneConfig& config);

// Builds the scene (with a seeded +/-jitter on the object center), then
// drives both gels inward until each squeezed-area mask reports contact.
SimState env_reset(const SceneConfig& config, std::uint64_t seed);

// Advances one environment step: clips the action, then runs
// substeps_per_env_step MPM substeps with the backing slabs kinematically
// driven at the commanded velocities.
void env_step(SimState& state, const Action& action);

// Runs one MPM substep with the backing slabs of both gels driven at the
// given velocities (already clipped). Exposed for reset and testing.
void driven_substep(SimState& state, const Vec3& vel_a, const Vec3& vel_b);

double total_particle_mass(const SimState& state);

}  // namespace gelsim

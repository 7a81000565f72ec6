#pragma once

#include <string>
#include <vector>

#include "gelsim/math.hpp"
#include "gelsim/observations.hpp"
#include "gelsim/scene.hpp"

namespace gelsim {

enum class TaskKind { position_control, squeeze, cylinder, sphere };

enum class ObservationKind { relative_position, squeezed_area, object_contour };

struct TaskSpec {
    TaskKind kind = TaskKind::position_control;
    Vec3 target_position = Vec3::Zero();  // position_control
    double target_thickness = 0;          // squeeze
    int episode_length = 100;
    ObservationKind observation_kind = ObservationKind::relative_position;
};

struct ExpertTrajectory {
    TaskKind kind = TaskKind::cylinder;
    int period = 20;          // env steps per rub cycle / revolution
    double amplitude = 0.05;  // lateral half-travel (cylinder)
    double radius = 0.05;     // orbit radius (sphere)
    double press_depth = 0.01;  // inward travel per period
};

Vec3 object_midpoint(const SimState& state);

double reward_position(const SimState& state, const Vec3& target);

// Thickness = object extent along the gel axis.
double reward_squeeze(const SimState& state, double target_thickness);

// r(t) = max_j |p_j - mean(p)|, reward R(t) = r0 - r(t).
double max_radius_3d(const SimState& state);
double reward_sphere(const SimState& state, double r0);

// Same, with distances restricted to the plane transverse to plane_axis
// (default: the x-z plane, plane_axis = 1).
double max_radius_planar(const SimState& state, int plane_axis);
double reward_cylinder(const SimState& state, double r0, int plane_axis = 1);

// Human-designed demonstration velocity for the actuated gel.
Action expert_velocity(const ExpertTrajectory& traj, int step_index,
                       const SimState& state);

// R_min / R_max of a boundary point set about its centroid.
double roundness(const std::vector<Eigen::Vector2d>& boundary);

// Boundary pixels of a mask, as points, fed to roundness().
std::vector<Eigen::Vector2d> mask_boundary(const BinaryMask& mask);

struct RoundnessReport {
    std::string face;  // front / top / side
    double r_min = 0;
    double r_max = 0;
    double ratio = 0;
};

// Roundness of the object's convex-hull cross sections through its centroid
// on the three coordinate planes.
std::vector<RoundnessReport> object_roundness(const SimState& state);

bool success_check(double roundness_value, double baseline,
                   double margin = 0.05);

}  // namespace gelsim

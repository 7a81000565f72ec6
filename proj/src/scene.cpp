#include "gelsim/scene.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gelsim/observations.hpp"
#include "gelsim/rng.hpp"

namespace gelsim {

namespace {

// Cell-centered lattice: n = floor(extent/spacing) cells per axis, one
// particle per cell center. For 0.2 at spacing 1/128 this gives 25 points.
Vec3i lattice_counts(const Vec3& extent, double spacing) {
    Vec3i n;
    for (int a = 0; a < 3; ++a) {
        n[a] = std::max(1, static_cast<int>(std::floor(extent[a] / spacing)));
    }
    return n;
}

void fill_box(std::vector<Particle>& particles, const Vec3& center,
              const Vec3& extent, double spacing, const Material& material,
              int material_id, int body_id) {
    Vec3i n = lattice_counts(extent, spacing);
    double cell_volume =
        (extent[0] * extent[1] * extent[2]) / (n[0] * n[1] * n[2]);
    Vec3 cell(extent[0] / n[0], extent[1] / n[1], extent[2] / n[2]);
    Vec3 origin = center - extent / 2;
    for (int i = 0; i < n[0]; ++i) {
        for (int j = 0; j < n[1]; ++j) {
            for (int k = 0; k < n[2]; ++k) {
                Particle p;
                p.position = origin + Vec3((i + 0.5) * cell[0],
                                           (j + 0.5) * cell[1],
                                           (k + 0.5) * cell[2]);
                p.mass = material.density * cell_volume;
                p.volume0 = cell_volume;
                p.material_id = material_id;
                p.body_id = body_id;
                particles.push_back(p);
            }
        }
    }
}

void check_inside_domain(const Vec3& lo, const Vec3& hi, const Grid& grid,
                         int margin, const std::string& name) {
    double wall = (margin + 1) * grid.spacing;
    double top = (grid.resolution - 1 - margin - 1) * grid.spacing;
    for (int a = 0; a < 3; ++a) {
        if (lo[a] < wall || hi[a] > top) {
            throw std::invalid_argument(name + " extends outside grid domain");
        }
    }
}

void pin_backing(SimState& state, int gel, const Vec3& vel) {
    GelInfo& g = state.gels[gel];
    for (std::size_t i = 0; i < g.backing_indices.size(); ++i) {
        Particle& p = state.particles[g.backing_indices[i]];
        p.position = g.frame_position + g.backing_rest_offsets[i];
        p.velocity = vel;
        p.affine_velocity = Mat3::Zero();
        p.deformation_gradient = Mat3::Identity();
        p.stress = Mat3::Zero();
    }
}

}  // namespace

SimState build_scene(const SceneConfig& config) {
    if (config.action_limit <= 0) {
        throw std::invalid_argument("action_limit must be positive");
    }
    if (config.gel_axis < 0 || config.gel_axis > 2) {
        throw std::invalid_argument("gel_axis must be 0, 1 or 2");
    }

    SimState state;
    state.config = config;
    state.materials = {config.gel_material, config.gel_material,
                       config.object_material};
    state.grid = Grid(config.grid_resolution, 1.0 / config.grid_resolution);

    const int axis = config.gel_axis;
    double gel_thickness = config.gel_size[axis];
    double face_offset = config.object_size[axis] / 2 + config.gel_gap;
    if (config.gel_gap < 0) {
        throw std::invalid_argument("gel overlaps object at build time");
    }

    check_inside_domain(config.object_center - config.object_size / 2,
                        config.object_center + config.object_size / 2,
                        state.grid, config.boundary_margin, "object");

    fill_box(state.particles, config.object_center, config.object_size,
             config.particle_spacing, config.object_material, kObject, kObject);

    for (int gel = 0; gel < 2; ++gel) {
        double side = (gel == kGelA) ? +1.0 : -1.0;  // gel A on the + side
        Vec3 center = config.object_center;
        center[axis] += side * (face_offset + gel_thickness / 2);
        check_inside_domain(center - config.gel_size / 2,
                            center + config.gel_size / 2, state.grid,
                            config.boundary_margin,
                            gel == kGelA ? "gel A" : "gel B");

        std::size_t first = state.particles.size();
        fill_box(state.particles, center, config.gel_size,
                 config.particle_spacing, config.gel_material, gel, gel);

        GelInfo& info = state.gels[gel];
        info.inward_normal = Vec3::Zero();
        info.inward_normal[axis] = -side;
        info.frame_position = center;
        info.frame_position[axis] += side * gel_thickness / 2;  // rear face

        // Classify layers along the gel axis. Backing = rearmost two
        // layers, surface = front layer (facing the object).
        Vec3i n = lattice_counts(config.gel_size, config.particle_spacing);
        double cell = config.gel_size[axis] / n[axis];
        double rear = info.frame_position[axis];
        for (std::size_t idx = first; idx < state.particles.size(); ++idx) {
            const Particle& p = state.particles[idx];
            double depth_from_rear = std::abs(p.position[axis] - rear);
            double depth_from_front =
                gel_thickness - depth_from_rear;
            if (depth_from_rear < 2 * cell) {
                info.backing_indices.push_back(static_cast<int>(idx));
                info.backing_rest_offsets.push_back(p.position -
                                                    info.frame_position);
            }
            if (depth_from_front < cell) {
                info.surface_indices.push_back(static_cast<int>(idx));
                info.surface_rest_offsets.push_back(p.position -
                                                    info.frame_position);
            }
        }
        state.initial_gel_positions[gel] = info.frame_position;
    }
    state.step_index = 0;
    return state;
}

void driven_substep(SimState& state, const Vec3& vel_a, const Vec3& vel_b) {
    SubstepConfig cfg = state.substep_config();
    const Vec3 vels[2] = {vel_a, vel_b};
    for (int gel = 0; gel < 2; ++gel) {
        state.gels[gel].frame_position += vels[gel] * cfg.dt;
        // Scatter with the commanded velocity; position catches up after
        // the substep.
        for (int idx : state.gels[gel].backing_indices) {
            Particle& p = state.particles[idx];
            p.velocity = vels[gel];
            p.affine_velocity = Mat3::Zero();
            p.deformation_gradient = Mat3::Identity();
            p.stress = Mat3::Zero();
        }
    }
    mpm_substep(state.particles, state.materials, state.grid, cfg);
    pin_backing(state, kGelA, vel_a);
    pin_backing(state, kGelB, vel_b);
}

SimState env_reset(const SceneConfig& config, std::uint64_t seed) {
    SceneConfig cfg = config;
    auto rng = make_rng(seed, "scene");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int a = 0; a < 3; ++a) {
        cfg.object_center[a] +=
            cfg.center_jitter_frac * cfg.object_size[a] * unit(rng);
    }

    SimState state = build_scene(cfg);
    double depth_threshold =
        cfg.squeeze_threshold_frac * cfg.gel_size[cfg.gel_axis];

    Vec3 inward_a = state.gels[kGelA].inward_normal * cfg.reset_touch_speed;
    Vec3 inward_b = state.gels[kGelB].inward_normal * cfg.reset_touch_speed;
    ObservationRaster raster{32, 32};
    auto in_contact = [&] {
        for (int gel = 0; gel < 2; ++gel) {
            BinaryMask mask =
                sim_squeezed_area(state, gel, raster, depth_threshold);
            if (mask_area(mask) == 0) return false;
        }
        return true;
    };
    bool touching = false;
    for (int sub = 0; sub < cfg.reset_max_substeps && !touching; ++sub) {
        driven_substep(state, inward_a, inward_b);
        if (sub % 16 != 0) continue;  // contact test is off the hot path
        if (!in_contact()) continue;
        // Stop the drive; accept only if contact survives the elastic
        // spring-back, otherwise keep pressing.
        driven_substep(state, Vec3::Zero(), Vec3::Zero());
        touching = in_contact();
    }
    if (!touching) {
        throw std::runtime_error(
            "env_reset: light touch not achieved within " +
            std::to_string(cfg.reset_max_substeps) + " substeps");
    }
    state.initial_gel_positions[0] = state.gels[0].frame_position;
    state.initial_gel_positions[1] = state.gels[1].frame_position;
    state.step_index = 0;
    return state;
}

void env_step(SimState& state, const Action& action) {
    if (state.step_index >= state.config.episode_length) {
        throw std::runtime_error("env_step called after episode end (step " +
                                 std::to_string(state.step_index) + ")");
    }
    const double limit = state.config.action_limit;
    auto clip = [limit](const Vec3& v) {
        return Vec3(v.cwiseMax(-limit).cwiseMin(limit));
    };
    Vec3 va = clip(action.gel_a);
    Vec3 vb = state.config.bottom_gel_static ? Vec3(Vec3::Zero())
                                             : clip(action.gel_b);
    for (int sub = 0; sub < state.config.substeps_per_env_step; ++sub) {
        driven_substep(state, va, vb);
    }
    state.step_index += 1;
}

double total_particle_mass(const SimState& state) {
    double m = 0;
    for (const Particle& p : state.particles) m += p.mass;
    return m;
}

}  // namespace gelsim

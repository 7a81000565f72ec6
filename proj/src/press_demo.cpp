#include "gelsim/press_demo.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gelsim/observations.hpp"

namespace gelsim {

namespace {

// Trimmed extent: a handful of particles can detach during release and fly
// off, so min/max would not measure the body. Use the 1st-99th percentile span.
double object_extent(const SimState& state, int axis) {
    std::vector<double> coords;
    for (const Particle& p : state.particles) {
        if (p.body_id != kObject) continue;
        coords.push_back(p.position[axis]);
    }
    std::sort(coords.begin(), coords.end());
    const size_t trim = coords.size() / 100;
    return coords[coords.size() - 1 - trim] - coords[trim];
}

}  // namespace

PressDemoResult run_press_demo(SceneConfig scene, double yield_stress,
                               const std::string& output_dir,
                               double press_strain) {
    namespace fs = std::filesystem;
    // Soft press material: the partially-yielding preset's elastic rebound
    // is sigma_y / (2 mu) of the applied strain, and with a stiff object it
    // shrinks below what the grid resolves. 2200 Pa puts that rebound a few
    // tenths of a cell above the noise floor at the default resolution.
    const double demo_youngs_modulus = 2200;
    scene.object_material =
        Material::make(demo_youngs_modulus,
                       scene.object_material.poisson_ratio, yield_stress,
                       scene.object_material.density);

    SimState state = build_scene(scene);
    const int axis = scene.gel_axis;
    const double speed = scene.reset_touch_speed;
    const double travel =
        scene.gel_gap + press_strain * scene.object_size[axis] / 2;
    const int press_substeps =
        static_cast<int>(std::ceil(travel / (speed * scene.dt)));
    const int hold_substeps = press_substeps / 2;
    const int settle_substeps = 4 * press_substeps;

    const double depth_threshold =
        scene.squeeze_threshold_frac * scene.gel_size[axis];
    const Vec3 inward_a = state.gels[kGelA].inward_normal * speed;
    const Vec3 inward_b = state.gels[kGelB].inward_normal * speed;
    const ObservationRaster raster{64, 64};

    PressDemoResult result;
    result.initial_height = object_extent(state, axis);

    int frame = 0;
    auto maybe_frame = [&](int substep) {
        if (output_dir.empty() || substep % 200 != 0) return;
        char name[64];
        std::snprintf(name, sizeof(name), "squeezed_%04d.pgm", frame++);
        write_pgm((fs::path(output_dir) / name).string(),
                  sim_squeezed_area(state, kGelA, raster, depth_threshold));
    };

    int substep = 0;
    for (int i = 0; i < press_substeps; ++i, ++substep) {
        driven_substep(state, inward_a, inward_b);
        maybe_frame(substep);
    }
    for (int i = 0; i < hold_substeps; ++i, ++substep) {
        driven_substep(state, Vec3::Zero(), Vec3::Zero());
        maybe_frame(substep);
    }
    result.pressed_height = object_extent(state, axis);

    // Grid-mediated contact is sticky: a kinematic retraction drags the
    // object's boundary particles along and re-stretches it. Release by
    // translating both gels clear of the object between substeps instead,
    // so the object relaxes freely.
    const double dx = 1.0 / scene.grid_resolution;
    for (int g = 0; g < 2; ++g) {
        GelInfo& gel = state.gels[g];
        Vec3 outward = -gel.inward_normal;
        double desired = travel + 3.0 * dx;
        // Keep every gel particle comfortably inside the domain.
        const double limit_lo = (scene.boundary_margin + 2.0) * dx;
        const double limit_hi =
            (scene.grid_resolution - 2.0 - scene.boundary_margin) * dx;
        const bool positive = outward[axis] > 0;
        double allowed = desired;
        for (const Particle& p : state.particles) {
            if (p.body_id != g) continue;
            double c = p.position[axis];
            allowed = std::min(allowed, positive ? limit_hi - c : c - limit_lo);
        }
        Vec3 shift = outward * std::max(0.0, allowed);
        gel.frame_position += shift;
        for (Particle& p : state.particles) {
            if (p.body_id != g) continue;
            p.position += shift;
            p.velocity.setZero();
            p.affine_velocity.setZero();
        }
    }
    // Settle quasi-statically: without damping the release excites an
    // undamped ring whose strain amplitude re-yields the material every
    // cycle and ratchets the height down. Bleed kinetic energy each
    // substep so the object relaxes to its static equilibrium.
    const double settle_damping = 0.99;
    for (int i = 0; i < settle_substeps; ++i, ++substep) {
        driven_substep(state, Vec3::Zero(), Vec3::Zero());
        for (Particle& p : state.particles) {
            p.velocity *= settle_damping;
            p.affine_velocity *= settle_damping;
        }
        maybe_frame(substep);
    }
    result.final_height = object_extent(state, axis);
    result.recovery_ratio =
        (result.final_height - result.pressed_height) /
        (result.initial_height - result.pressed_height);

    if (!output_dir.empty()) {
        // Final x-z cross-section: object particles in a one-spacing slab
        // around the mid-height plane.
        int t0 = (axis == 0) ? 1 : 0;
        int t1 = (axis == 2) ? 1 : 2;
        Vec3 mid = Vec3::Zero();
        int count = 0;
        for (const Particle& p : state.particles) {
            if (p.body_id != kObject) continue;
            mid += p.position;
            ++count;
        }
        mid /= count;
        std::ofstream dump(fs::path(output_dir) / "cross_section.csv");
        dump << "x,z\n";
        for (const Particle& p : state.particles) {
            if (p.body_id != kObject) continue;
            if (std::abs(p.position[axis] - mid[axis]) > scene.particle_spacing)
                continue;
            char line[80];
            std::snprintf(line, sizeof(line), "%.9g,%.9g\n", p.position[t0],
                          p.position[t1]);
            dump << line;
        }
    }
    return result;
}

}  // namespace gelsim

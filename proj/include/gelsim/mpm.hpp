#pragma once

#include <cstddef>
#include <vector>

#include "gelsim/material.hpp"
#include "gelsim/math.hpp"

namespace gelsim {

struct Particle {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Mat3 affine_velocity = Mat3::Zero();      // APIC C
    Mat3 deformation_gradient = Mat3::Identity();
    // Kirchhoff stress of deformation_gradient, maintained by
    // grid_to_particle from the return map's factorization so
    // particle_to_grid does not need a second SVD per substep. Seed it
    // with kirchhoff_stress() when prescribing a non-identity F directly.
    Mat3 stress = Mat3::Zero();
    double mass = 0;
    double volume0 = 0;
    int material_id = 0;
    int body_id = 0;
};

struct GridNode {
    double mass = 0;
    Vec3 momentum = Vec3::Zero();  // velocity after grid_update
};

struct Grid {
    int resolution = 64;  // node count per axis
    double spacing = 1.0 / 64;
    std::vector<GridNode> nodes;

    Grid() = default;
    Grid(int resolution, double spacing)
        : resolution(resolution), spacing(spacing),
          nodes(static_cast<std::size_t>(resolution) * resolution *
                resolution) {}

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * resolution + j) * resolution + k;
    }
    GridNode& node(int i, int j, int k) { return nodes[index(i, j, k)]; }
    const GridNode& node(int i, int j, int k) const {
        return nodes[index(i, j, k)];
    }
    void clear();
};

struct SubstepConfig {
    double dt = 2e-4;
    Vec3 gravity = Vec3::Zero();
    int boundary_margin = 3;
};

// Quadratic B-spline weights for the 3-node stencil along one axis.
// fx is the particle offset from the base node in cells, in [0.5, 1.5).
inline void bspline_weights(double fx, double w[3]) {
    w[0] = 0.5 * (1.5 - fx) * (1.5 - fx);
    w[1] = 0.75 - (fx - 1.0) * (fx - 1.0);
    w[2] = 0.5 * (fx - 0.5) * (fx - 0.5);
}

// Stages of the particle/grid loop. Each stage mutates its target in place.
void particle_to_grid(const std::vector<Particle>& particles,
                      const std::vector<Material>& materials, Grid& grid,
                      const SubstepConfig& cfg);

void grid_update(Grid& grid, const SubstepConfig& cfg);

void grid_to_particle(const Grid& grid,
                      const std::vector<Material>& materials,
                      std::vector<Particle>& particles,
                      const SubstepConfig& cfg);

// One full step of the particle/grid loop:
// particle_to_grid -> grid_update -> grid_to_particle.
void mpm_substep(std::vector<Particle>& particles,
                 const std::vector<Material>& materials, Grid& grid,
                 const SubstepConfig& cfg);

// Projects a trial deformation gradient back onto the von Mises yield
// surface. Works on the Hencky strain eps = log(singular values):
//   dgamma = |dev(eps)| - yield_stress / (2 mu)
// dgamma <= 0 leaves f untouched; otherwise dev(eps) is shortened by dgamma
// along itself and the result exponentiated back.
Mat3 von_mises_return_map(const Mat3& f, const Material& material);

// Kirchhoff stress of the Hencky-strain St. Venant-Kirchhoff model,
// tau = U (2 mu eps + lambda tr(eps) I) U^T.
Mat3 kirchhoff_stress(const Mat3& f, const Material& material);

}  // namespace gelsim

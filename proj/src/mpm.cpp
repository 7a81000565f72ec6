#include "gelsim/mpm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gelsim {

void Grid::clear() {
    std::fill(nodes.begin(), nodes.end(), GridNode{});
}

namespace {

struct Stencil {
    int base[3];
    double w[3][3];   // per-axis weights
    double fx[3];     // offset from base node in cells
};

Stencil make_stencil(const Vec3& position, const Grid& grid,
                     std::size_t particle_index, int margin) {
    const double inv_dx = 1.0 / grid.spacing;
    Stencil s;
    for (int a = 0; a < 3; ++a) {
        double xc = position[a] * inv_dx;
        int base = static_cast<int>(std::floor(xc - 0.5));
        if (base < margin - 1 || base + 2 > grid.resolution - margin) {
            throw std::runtime_error(
                "particle " + std::to_string(particle_index) +
                " outside grid domain (axis " + std::to_string(a) + ")");
        }
        s.base[a] = base;
        s.fx[a] = xc - base;
        bspline_weights(s.fx[a], s.w[a]);
    }
    return s;
}

// Return map and Kirchhoff stress from a single factorization of the
// trial gradient; von_mises_return_map / kirchhoff_stress expose the same
// math piecewise for callers holding only an F.
struct Projected {
    Mat3 f;
    Mat3 stress;
};

Projected project_with_stress(const Mat3& f, const Material& material) {
    if (!f.allFinite()) {
        throw std::domain_error("non-finite deformation gradient");
    }
    Svd3 svd = svd3(f);
    Vec3 eps = svd.sigma.array().log();
    Vec3 dev = eps - Vec3::Constant(eps.sum() / 3.0);
    double dev_norm = dev.norm();
    double dgamma = dev_norm - material.yield_stress / (2.0 * material.mu);
    Projected out;
    if (dgamma <= 0) {
        out.f = f;
    } else {
        assert(dev_norm > 0);  // dgamma > 0 forces |dev| > sigma_y/(2mu) >= 0
        eps -= (dgamma / dev_norm) * dev;
        Vec3 sigma = eps.array().exp();
        out.f = svd.u * sigma.asDiagonal() * svd.v.transpose();
    }
    Vec3 tau_diag = 2.0 * material.mu * eps.array() + material.lambda * eps.sum();
    out.stress = svd.u * tau_diag.asDiagonal() * svd.u.transpose();
    return out;
}

}  // namespace

Mat3 kirchhoff_stress(const Mat3& f, const Material& material) {
    Svd3 svd = svd3(f);
    Vec3 eps = svd.sigma.array().log();
    Vec3 tau_diag =
        2.0 * material.mu * eps.array() + material.lambda * eps.sum();
    return svd.u * tau_diag.asDiagonal() * svd.u.transpose();
}

void particle_to_grid(const std::vector<Particle>& particles,
                      const std::vector<Material>& materials, Grid& grid,
                      const SubstepConfig& cfg) {
    (void)materials;  // stress is carried per particle, see Particle::stress
    grid.clear();
    const double inv_dx = 1.0 / grid.spacing;
    // D^{-1} = 4 / dx^2 for the quadratic kernel
    const double d_inv = 4.0 * inv_dx * inv_dx;

    for (std::size_t pi = 0; pi < particles.size(); ++pi) {
        const Particle& p = particles[pi];
        Stencil st = make_stencil(p.position, grid, pi, cfg.boundary_margin);

        const Mat3& tau = p.stress;
        // MLS-MPM fused force: momentum contribution is
        //   w * (m v + (m C - dt V0 D^{-1} tau) (x_i - x_p))
        Mat3 affine = p.mass * p.affine_velocity - cfg.dt * p.volume0 * d_inv * tau;
        Vec3 mv = p.mass * p.velocity;

        // Scalar scatter over the 3x3x3 stencil; the k-run is contiguous
        // in node storage.
        const double a00 = affine(0, 0), a01 = affine(0, 1), a02 = affine(0, 2);
        const double a10 = affine(1, 0), a11 = affine(1, 1), a12 = affine(1, 2);
        const double a20 = affine(2, 0), a21 = affine(2, 1), a22 = affine(2, 2);
        double dx0[3], dx1[3], dx2[3];
        for (int i = 0; i < 3; ++i) {
            dx0[i] = (i - st.fx[0]) * grid.spacing;
            dx1[i] = (i - st.fx[1]) * grid.spacing;
            dx2[i] = (i - st.fx[2]) * grid.spacing;
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double wij = st.w[0][i] * st.w[1][j];
                const double bx = mv[0] + a00 * dx0[i] + a01 * dx1[j];
                const double by = mv[1] + a10 * dx0[i] + a11 * dx1[j];
                const double bz = mv[2] + a20 * dx0[i] + a21 * dx1[j];
                GridNode* node =
                    &grid.node(st.base[0] + i, st.base[1] + j, st.base[2]);
                for (int k = 0; k < 3; ++k, ++node) {
                    const double w = wij * st.w[2][k];
                    const double dz = dx2[k];
                    node->mass += w * p.mass;
                    node->momentum[0] += w * (bx + a02 * dz);
                    node->momentum[1] += w * (by + a12 * dz);
                    node->momentum[2] += w * (bz + a22 * dz);
                }
            }
        }
    }
}

void grid_update(Grid& grid, const SubstepConfig& cfg) {
    const int res = grid.resolution;
    const int margin = cfg.boundary_margin;
    double max_speed = 0;
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            for (int k = 0; k < res; ++k) {
                GridNode& node = grid.node(i, j, k);
                if (node.mass <= 0) continue;
                Vec3 v = node.momentum / node.mass + cfg.gravity * cfg.dt;
                // Domain walls: zero the wall-normal component, keep
                // tangential motion.
                int idx[3] = {i, j, k};
                for (int a = 0; a < 3; ++a) {
                    if (idx[a] < margin || idx[a] >= res - margin) v[a] = 0;
                }
                node.momentum = v;  // holds velocity from here on
                max_speed = std::max(max_speed, v.cwiseAbs().maxCoeff());
            }
        }
    }
    if (cfg.dt * max_speed >= grid.spacing) {
        throw std::runtime_error(
            "CFL violation: dt * max|v| = " +
            std::to_string(cfg.dt * max_speed) + " >= dx = " +
            std::to_string(grid.spacing) + "; reduce dt");
    }
}

Mat3 von_mises_return_map(const Mat3& f, const Material& material) {
    return project_with_stress(f, material).f;
}

void grid_to_particle(const Grid& grid,
                      const std::vector<Material>& materials,
                      std::vector<Particle>& particles,
                      const SubstepConfig& cfg) {
    const double inv_dx = 1.0 / grid.spacing;
    const double d_inv = 4.0 * inv_dx * inv_dx;

    // Exceptions must not escape the parallel region; remember the first
    // failure and rethrow afterwards.
    std::exception_ptr error;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(particles.size());
         ++pi) {
      try {
        Particle& p = particles[pi];
        Stencil st = make_stencil(p.position, grid, pi, cfg.boundary_margin);

        double dx0[3], dx1[3], dx2[3];
        for (int i = 0; i < 3; ++i) {
            dx0[i] = (i - st.fx[0]) * grid.spacing;
            dx1[i] = (i - st.fx[1]) * grid.spacing;
            dx2[i] = (i - st.fx[2]) * grid.spacing;
        }
        // Scalar gather; v = sum w gv, C = D^{-1} sum w gv dpos^T.
        double vx = 0, vy = 0, vz = 0;
        double c00 = 0, c01 = 0, c02 = 0, c10 = 0, c11 = 0, c12 = 0,
               c20 = 0, c21 = 0, c22 = 0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double wij = st.w[0][i] * st.w[1][j];
                const GridNode* node =
                    &grid.node(st.base[0] + i, st.base[1] + j, st.base[2]);
                for (int k = 0; k < 3; ++k, ++node) {
                    if (node->mass <= 0) continue;
                    const double w = wij * st.w[2][k];
                    // velocity post grid_update
                    const double gx = w * node->momentum[0];
                    const double gy = w * node->momentum[1];
                    const double gz = w * node->momentum[2];
                    vx += gx;
                    vy += gy;
                    vz += gz;
                    const double d0 = dx0[i], d1 = dx1[j], d2 = dx2[k];
                    c00 += gx * d0; c01 += gx * d1; c02 += gx * d2;
                    c10 += gy * d0; c11 += gy * d1; c12 += gy * d2;
                    c20 += gz * d0; c21 += gz * d1; c22 += gz * d2;
                }
            }
        }
        Vec3 v(vx, vy, vz);
        Mat3 c;
        c << c00, c01, c02, c10, c11, c12, c20, c21, c22;
        c *= d_inv;
        p.velocity = v;
        p.affine_velocity = c;
        Mat3 f = (Mat3::Identity() + cfg.dt * c) * p.deformation_gradient;
        if (f.determinant() <= 0) {
            throw std::runtime_error(
                "deformation gradient inverted at particle " +
                std::to_string(pi) + "; reduce dt");
        }
        Projected proj = project_with_stress(f, materials[p.material_id]);
        p.deformation_gradient = proj.f;
        p.stress = proj.stress;
        p.position += cfg.dt * v;
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
}

void mpm_substep(std::vector<Particle>& particles,
                 const std::vector<Material>& materials, Grid& grid,
                 const SubstepConfig& cfg) {
    particle_to_grid(particles, materials, grid, cfg);
    grid_update(grid, cfg);
    grid_to_particle(grid, materials, particles, cfg);
}

}  // namespace gelsim

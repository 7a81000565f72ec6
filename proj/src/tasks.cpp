#include "gelsim/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gelsim {

namespace {

std::vector<const Particle*> object_particles(const SimState& state) {
    std::vector<const Particle*> out;
    for (const Particle& p : state.particles) {
        if (p.body_id == kObject) out.push_back(&p);
    }
    if (out.empty()) throw std::runtime_error("state has no object particles");
    return out;
}

}  // namespace

Vec3 object_midpoint(const SimState& state) {
    auto parts = object_particles(state);
    Vec3 mid = Vec3::Zero();
    for (const Particle* p : parts) mid += p->position;
    return mid / static_cast<double>(parts.size());
}

double reward_position(const SimState& state, const Vec3& target) {
    return -(object_midpoint(state) - target).norm();
}

double reward_squeeze(const SimState& state, double target_thickness) {
    auto parts = object_particles(state);
    const int axis = state.config.gel_axis;
    double lo = parts[0]->position[axis], hi = lo;
    for (const Particle* p : parts) {
        lo = std::min(lo, p->position[axis]);
        hi = std::max(hi, p->position[axis]);
    }
    return -std::abs((hi - lo) - target_thickness);
}

double max_radius_3d(const SimState& state) {
    auto parts = object_particles(state);
    Vec3 mid = object_midpoint(state);
    double r = 0;
    for (const Particle* p : parts) {
        r = std::max(r, (p->position - mid).norm());
    }
    return r;
}

double reward_sphere(const SimState& state, double r0) {
    return r0 - max_radius_3d(state);
}

double max_radius_planar(const SimState& state, int plane_axis) {
    auto parts = object_particles(state);
    Vec3 mid = object_midpoint(state);
    int t0 = (plane_axis == 0) ? 1 : 0;
    int t1 = (plane_axis == 2) ? 1 : 2;
    double r2 = 0;
    for (const Particle* p : parts) {
        double d0 = p->position[t0] - mid[t0];
        double d1 = p->position[t1] - mid[t1];
        r2 = std::max(r2, d0 * d0 + d1 * d1);
    }
    return std::sqrt(r2);
}

double reward_cylinder(const SimState& state, double r0, int plane_axis) {
    return r0 - max_radius_planar(state, plane_axis);
}

Action expert_velocity(const ExpertTrajectory& traj, int step_index,
                       const SimState& state) {
    if (traj.period <= 0) throw std::invalid_argument("period must be > 0");
    const double dt_env =
        state.config.dt * state.config.substeps_per_env_step;
    const int axis = state.config.gel_axis;
    int t0 = (axis == 0) ? 1 : 0;
    int t1 = (axis == 2) ? 1 : 2;
    const GelInfo& gel = state.gels[kGelA];

    Action action;
    // Inward bias advances press_depth per period.
    action.gel_a =
        gel.inward_normal * (traj.press_depth / (traj.period * dt_env));

    if (traj.kind == TaskKind::cylinder) {
        // Square-wave rub: travel `amplitude` per half period.
        double speed = 2.0 * traj.amplitude / (traj.period * dt_env);
        double sign = (step_index % traj.period) < traj.period / 2 ? 1.0 : -1.0;
        action.gel_a[t0] += sign * speed;
    } else if (traj.kind == TaskKind::sphere) {
        // Orbit: tangential velocity about the object's in-plane midpoint,
        // one revolution per period.
        Vec3 mid = object_midpoint(state);
        double d0 = gel.frame_position[t0] - mid[t0];
        double d1 = gel.frame_position[t1] - mid[t1];
        double len = std::hypot(d0, d1);
        double speed =
            2.0 * std::numbers::pi * traj.radius / (traj.period * dt_env);
        if (len > 1e-12) {
            action.gel_a[t0] += speed * (-d1 / len);
            action.gel_a[t1] += speed * (d0 / len);
        } else {
            action.gel_a[t0] += speed;
        }
    }
    // position_control / squeeze have no demonstration trajectory beyond
    // the inward bias.
    return action;
}

double roundness(const std::vector<Eigen::Vector2d>& boundary) {
    if (boundary.size() < 3) {
        throw std::invalid_argument("roundness needs at least 3 boundary points");
    }
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    for (const auto& p : boundary) center += p;
    center /= static_cast<double>(boundary.size());

    // Collinearity: all points within a sliver of the principal axis.
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : boundary) {
        Eigen::Vector2d d = p - center;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    if (eig.eigenvalues()[0] <= 1e-14 * eig.eigenvalues()[1] ||
        eig.eigenvalues()[1] <= 0) {
        throw std::invalid_argument("degenerate boundary: points are collinear");
    }

    double r_min = std::numeric_limits<double>::infinity(), r_max = 0;
    for (const auto& p : boundary) {
        double r = (p - center).norm();
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
    }
    return r_min / r_max;
}

std::vector<Eigen::Vector2d> mask_boundary(const BinaryMask& mask) {
    std::vector<Eigen::Vector2d> points;
    auto filled = [&](int y, int x) {
        if (y < 0 || y >= mask.height || x < 0 || x >= mask.width) return false;
        return mask.at(y, x) != 0;
    };
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            if (!filled(y - 1, x) || !filled(y + 1, x) || !filled(y, x - 1) ||
                !filled(y, x + 1)) {
                points.emplace_back(x + 0.5, y + 0.5);
            }
        }
    }
    return points;
}

namespace {

// Andrew monotone chain; returns hull vertices in order.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a == b; }),
              pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                    const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) -
               (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

std::vector<RoundnessReport> object_roundness(const SimState& state) {
    auto parts = object_particles(state);
    Vec3 mid = object_midpoint(state);
    const double slab = state.config.particle_spacing;

    struct Face {
        const char* name;
        int normal_axis;
    };
    const Face faces[3] = {{"front", 2}, {"top", 1}, {"side", 0}};

    std::vector<RoundnessReport> reports;
    for (const Face& face : faces) {
        int t0 = (face.normal_axis == 0) ? 1 : 0;
        int t1 = (face.normal_axis == 2) ? 1 : 2;
        std::vector<Eigen::Vector2d> slice;
        for (const Particle* p : parts) {
            if (std::abs(p->position[face.normal_axis] -
                         mid[face.normal_axis]) > slab) {
                continue;
            }
            slice.emplace_back(p->position[t0], p->position[t1]);
        }
        std::vector<Eigen::Vector2d> hull = convex_hull(std::move(slice));
        if (hull.size() < 3) {
            throw std::runtime_error(std::string("degenerate cross section on ") +
                                     face.name);
        }
        // Densify hull edges so R_min can land mid-edge.
        std::vector<Eigen::Vector2d> boundary;
        const int samples = 64;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Eigen::Vector2d& a = hull[i];
            const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
            for (int s = 0; s < samples; ++s) {
                double t = static_cast<double>(s) / samples;
                boundary.emplace_back(a + t * (b - a));
            }
        }
        Eigen::Vector2d center = Eigen::Vector2d::Zero();
        for (const auto& p : boundary) center += p;
        center /= static_cast<double>(boundary.size());
        RoundnessReport rep;
        rep.face = face.name;
        rep.r_min = std::numeric_limits<double>::infinity();
        for (const auto& p : boundary) {
            double r = (p - center).norm();
            rep.r_min = std::min(rep.r_min, r);
            rep.r_max = std::max(rep.r_max, r);
        }
        rep.ratio = rep.r_min / rep.r_max;
        reports.push_back(rep);
    }
    return reports;
}

bool success_check(double roundness_value, double baseline, double margin) {
    if (baseline <= 0 || baseline > 1) {
        throw std::invalid_argument("baseline must lie in (0, 1]");
    }
    return roundness_value >= baseline * (1.0 - margin);
}

}  // namespace gelsim

#include "gelsim/observations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "gelsim/scene.hpp"

namespace gelsim {

namespace {

void transverse_axes(int gel_axis, int& t0, int& t1) {
    t0 = (gel_axis == 0) ? 1 : 0;
    t1 = (gel_axis == 2) ? 1 : 2;
}

const GelInfo& checked_gel(const SimState& state, int gel_id) {
    if (gel_id < 0 || gel_id > 1 ||
        state.gels[gel_id].surface_indices.empty()) {
        throw std::invalid_argument("no gel surface particles for gel id " +
                                    std::to_string(gel_id));
    }
    return state.gels[gel_id];
}

}  // namespace

int mask_area(const BinaryMask& mask) {
    int n = 0;
    for (auto v : mask.data) n += v;
    return n;
}

RelativePosition sim_relative_position(const SimState& state, int gel_id) {
    const GelInfo& gel = checked_gel(state, gel_id);
    Vec3 object_mid = Vec3::Zero();
    std::size_t count = 0;
    for (const Particle& p : state.particles) {
        if (p.body_id != kObject) continue;
        object_mid += p.position;
        ++count;
    }
    object_mid /= static_cast<double>(count);

    RelativePosition obs;
    Vec3 basis = state.initial_gel_positions[gel_id];
    obs.sensor_mid = gel.frame_position - basis;
    obs.object_mid = object_mid - basis;
    obs.has_object_z = true;
    obs.normalized = true;
    return obs;
}

DepthImage sim_depth_image(const SimState& state, int gel_id,
                           const ObservationRaster& raster,
                           double depth_threshold) {
    if (raster.width < 8 || raster.height < 8) {
        throw std::invalid_argument("observation raster must be at least 8x8");
    }
    const GelInfo& gel = checked_gel(state, gel_id);
    int t0, t1;
    transverse_axes(state.config.gel_axis, t0, t1);
    double lo0 = gel.frame_position[t0] - state.config.gel_size[t0] / 2;
    double lo1 = gel.frame_position[t1] - state.config.gel_size[t1] / 2;
    double px0 = state.config.gel_size[t0] / raster.width;
    double px1 = state.config.gel_size[t1] / raster.height;

    DepthImage depth(raster.width, raster.height);
    depth.threshold = depth_threshold;
    std::vector<double> weight(depth.data.size(), 0.0);

    for (std::size_t i = 0; i < gel.surface_indices.size(); ++i) {
        const Particle& p = state.particles[gel.surface_indices[i]];
        Vec3 rest = gel.frame_position + gel.surface_rest_offsets[i];
        double d = (rest - p.position).dot(gel.inward_normal);
        d = std::max(0.0, d);

        // Bilinear splat of the scattered surface point onto the raster.
        double u = (p.position[t0] - lo0) / px0 - 0.5;
        double v = (p.position[t1] - lo1) / px1 - 0.5;
        int x0 = static_cast<int>(std::floor(u));
        int y0 = static_cast<int>(std::floor(v));
        double fu = u - x0;
        double fv = v - y0;
        for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
                int x = x0 + dx, y = y0 + dy;
                if (x < 0 || x >= raster.width || y < 0 || y >= raster.height)
                    continue;
                double w = (dx ? fu : 1 - fu) * (dy ? fv : 1 - fv);
                depth.at(y, x) += w * d;
                weight[static_cast<std::size_t>(y) * raster.width + x] += w;
            }
        }
    }
    for (std::size_t i = 0; i < depth.data.size(); ++i) {
        if (weight[i] > 0) depth.data[i] /= weight[i];
    }
    return depth;
}

BinaryMask sim_squeezed_area(const SimState& state, int gel_id,
                             const ObservationRaster& raster,
                             double depth_threshold) {
    DepthImage depth = sim_depth_image(state, gel_id, raster, depth_threshold);
    BinaryMask mask(raster.width, raster.height);
    for (std::size_t i = 0; i < depth.data.size(); ++i) {
        mask.data[i] = depth.data[i] > depth_threshold ? 1 : 0;
    }
    return mask;
}

TernaryMask sim_object_contour(const SimState& state, int gel_id,
                               const ObservationRaster& raster,
                               double depth_threshold) {
    BinaryMask squeezed =
        sim_squeezed_area(state, gel_id, raster, depth_threshold);
    const GelInfo& gel = state.gels[gel_id];
    int t0, t1;
    transverse_axes(state.config.gel_axis, t0, t1);
    double lo0 = gel.frame_position[t0] - state.config.gel_size[t0] / 2;
    double lo1 = gel.frame_position[t1] - state.config.gel_size[t1] / 2;
    double px0 = state.config.gel_size[t0] / raster.width;
    double px1 = state.config.gel_size[t1] / raster.height;

    // Particle lattices are coarser than the raster; cover half a spacing
    // around each projected particle so the footprint is gap-free.
    double r = state.config.particle_spacing / 2;
    BinaryMask cover(raster.width, raster.height);
    for (const Particle& p : state.particles) {
        if (p.body_id != kObject) continue;
        int xa = static_cast<int>(std::floor((p.position[t0] - r - lo0) / px0));
        int xb = static_cast<int>(std::floor((p.position[t0] + r - lo0) / px0));
        int ya = static_cast<int>(std::floor((p.position[t1] - r - lo1) / px1));
        int yb = static_cast<int>(std::floor((p.position[t1] + r - lo1) / px1));
        xa = std::clamp(xa, 0, raster.width - 1);
        xb = std::clamp(xb, 0, raster.width - 1);
        ya = std::clamp(ya, 0, raster.height - 1);
        yb = std::clamp(yb, 0, raster.height - 1);
        for (int y = ya; y <= yb; ++y) {
            for (int x = xa; x <= xb; ++x) cover.at(y, x) = 1;
        }
    }

    TernaryMask contour(raster.width, raster.height);
    for (std::size_t i = 0; i < contour.data.size(); ++i) {
        if (squeezed.data[i]) {
            contour.data[i] = -1;
        } else if (cover.data[i]) {
            contour.data[i] = 1;
        }
    }
    return contour;
}

std::vector<double> luminance_gradient(const RgbImage& image) {
    const int w = image.width, h = image.height;
    std::vector<double> lum(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            lum[static_cast<std::size_t>(y) * w + x] =
                (0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
                 0.114 * image.at(y, x, 2)) /
                255.0;
        }
    }
    auto at = [&](int y, int x) {
        y = std::clamp(y, 0, h - 1);
        x = std::clamp(x, 0, w - 1);
        return lum[static_cast<std::size_t>(y) * w + x];
    };
    // Max Sobel response on a [0,1] channel is 4*sqrt(2).
    const double norm = 1.0 / (4.0 * std::numbers::sqrt2);
    std::vector<double> grad(lum.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = (at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1));
            double gy = (at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1));
            grad[static_cast<std::size_t>(y) * w + x] =
                std::sqrt(gx * gx + gy * gy) * norm;
        }
    }
    return grad;
}

SegmentationResult segment_tactile_image(const RgbImage& image,
                                         double threshold1,
                                         double threshold2) {
    if (image.width <= 0 || image.height <= 0) {
        throw std::invalid_argument("empty image");
    }
    const int w = image.width, h = image.height;
    std::vector<double> grad = luminance_gradient(image);

    SegmentationResult res;
    res.object = BinaryMask(w, h);
    res.squeezed = BinaryMask(w, h);
    res.contour = TernaryMask(w, h);

    double sum_x = 0, sum_y = 0;
    double aver[3] = {0, 0, 0};
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (grad[static_cast<std::size_t>(y) * w + x] <= threshold1) continue;
            res.object.at(y, x) = 1;
            sum_x += x;
            sum_y += y;
            for (int c = 0; c < 3; ++c) aver[c] += image.at(y, x, c);
            ++count;
        }
    }
    if (count == 0) {
        throw std::runtime_error("no object found in tactile image");
    }
    res.centroid_x = sum_x / static_cast<double>(count);
    res.centroid_y = sum_y / static_cast<double>(count);
    for (double& a : aver) a /= static_cast<double>(count);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!res.object.at(y, x)) continue;
            bool brighter = true;
            for (int c = 0; c < 3 && brighter; ++c) {
                brighter = image.at(y, x, c) > aver[c] + threshold2;
            }
            if (brighter) res.squeezed.at(y, x) = 1;
            res.contour.at(y, x) = brighter ? -1 : 1;
        }
    }
    return res;
}

double critical_angle(double n1, double n2) {
    if (n1 <= 0 || n2 <= 0) {
        throw std::domain_error("refractive indices must be positive");
    }
    if (n1 > n2) {
        throw std::domain_error(
            "n1 > n2: no total internal reflection, critical angle undefined");
    }
    return std::asin(n1 / n2) * 180.0 / std::numbers::pi;
}

namespace {

template <typename Mask>
std::vector<double> pool_mask(const Mask& mask, int pooled_width,
                              int pooled_height) {
    if (pooled_width <= 0 || pooled_height <= 0 ||
        mask.width % pooled_width != 0 || mask.height % pooled_height != 0) {
        throw std::invalid_argument(
            "mask resolution is not a multiple of the pooled resolution");
    }
    int bx = mask.width / pooled_width;
    int by = mask.height / pooled_height;
    std::vector<double> out(static_cast<std::size_t>(pooled_width) *
                            pooled_height);
    for (int py = 0; py < pooled_height; ++py) {
        for (int px = 0; px < pooled_width; ++px) {
            double sum = 0;
            for (int y = py * by; y < (py + 1) * by; ++y) {
                for (int x = px * bx; x < (px + 1) * bx; ++x) {
                    sum += mask.at(y, x);
                }
            }
            out[static_cast<std::size_t>(py) * pooled_width + px] =
                sum / (bx * by);
        }
    }
    return out;
}

}  // namespace

std::vector<double> observation_vector(const RelativePosition& obs) {
    std::vector<double> v = {obs.sensor_mid[0], obs.sensor_mid[1],
                             obs.sensor_mid[2], obs.object_mid[0],
                             obs.object_mid[1]};
    if (obs.has_object_z) v.push_back(obs.object_mid[2]);
    return v;
}

std::vector<double> observation_vector(const BinaryMask& mask,
                                       int pooled_width, int pooled_height) {
    return pool_mask(mask, pooled_width, pooled_height);
}

std::vector<double> observation_vector(const TernaryMask& mask,
                                       int pooled_width, int pooled_height) {
    return pool_mask(mask, pooled_width, pooled_height);
}

namespace {

void write_pgm_bytes(const std::string& path, int width, int height,
                     const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace

void write_pgm(const std::string& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = mask.data[i] ? 255 : 0;
    }
    write_pgm_bytes(path, mask.width, mask.height, bytes);
}

void write_pgm(const std::string& path, const TernaryMask& mask) {
    std::vector<std::uint8_t> bytes(mask.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = mask.data[i] == 1 ? 255 : (mask.data[i] == -1 ? 128 : 0);
    }
    write_pgm_bytes(path, mask.width, mask.height, bytes);
}

void write_pgm(const std::string& path, const DepthImage& depth) {
    double max_depth = 0;
    for (double d : depth.data) max_depth = std::max(max_depth, d);
    double scale = max_depth > 0 ? 255.0 / max_depth : 0.0;
    std::vector<std::uint8_t> bytes(depth.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(
            std::clamp(depth.data[i] * scale, 0.0, 255.0));
    }
    write_pgm_bytes(path, depth.width, depth.height, bytes);
}

BinaryMask read_binary_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    int width, height, maxval;
    in >> magic >> width >> height >> maxval;
    if (magic != "P5" || maxval != 255 || width <= 0 || height <= 0) {
        throw std::runtime_error(path + ": not an 8-bit P5 PGM");
    }
    in.get();  // single whitespace after the header
    BinaryMask mask(width, height);
    std::vector<char> bytes(mask.data.size());
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw std::runtime_error(path + ": truncated PGM");
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        mask.data[i] = static_cast<unsigned char>(bytes[i]) >= 128 ? 1 : 0;
    }
    return mask;
}

}  // namespace gelsim

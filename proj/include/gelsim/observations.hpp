#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gelsim/image.hpp"
#include "gelsim/math.hpp"

namespace gelsim {

struct SimState;  // scene.hpp

struct ObservationRaster {
    int width = 64;
    int height = 64;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // {0,1}

    BinaryMask() = default;
    BinaryMask(int width, int height)
        : width(width), height(height),
          data(static_cast<std::size_t>(width) * height, 0) {}
    std::uint8_t& at(int y, int x) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

struct TernaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::int8_t> data;  // {-1,0,1}

    TernaryMask() = default;
    TernaryMask(int width, int height)
        : width(width), height(height),
          data(static_cast<std::size_t>(width) * height, 0) {}
    std::int8_t& at(int y, int x) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::int8_t at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // indentation depth, >= 0
    double threshold = 0;

    DepthImage() = default;
    DepthImage(int width, int height)
        : width(width), height(height),
          data(static_cast<std::size_t>(width) * height, 0) {}
    double& at(int y, int x) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    double at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

// Sensor/object midpoints, optionally normalized against the
// episode-initial sensor pose.
struct RelativePosition {
    Vec3 sensor_mid = Vec3::Zero();
    Vec3 object_mid = Vec3::Zero();
    bool has_object_z = true;  // the real-image path cannot observe object Z
    bool normalized = false;
};

int mask_area(const BinaryMask& mask);

RelativePosition sim_relative_position(const SimState& state, int gel_id);

// Gel-surface indentation rasterized over the gel face plane.
DepthImage sim_depth_image(const SimState& state, int gel_id,
                           const ObservationRaster& raster,
                           double depth_threshold);

BinaryMask sim_squeezed_area(const SimState& state, int gel_id,
                             const ObservationRaster& raster,
                             double depth_threshold);

TernaryMask sim_object_contour(const SimState& state, int gel_id,
                               const ObservationRaster& raster,
                               double depth_threshold);

struct SegmentationResult {
    BinaryMask object;    // Binarization1
    BinaryMask squeezed;  // Binarization2
    TernaryMask contour;  // Binarization3
    double centroid_x = 0;  // X2, column coordinate
    double centroid_y = 0;  // Y2, row coordinate
};

// Observation segmentation over a real tactile image: the object mask from
// a Sobel gradient threshold, the squeezed area from per-channel brightness
// above the object's average color, and the ternary contour from both.
SegmentationResult segment_tactile_image(const RgbImage& image,
                                         double threshold1,
                                         double threshold2);

// Sobel gradient magnitude of the luminance channel, normalized to [0,1].
std::vector<double> luminance_gradient(const RgbImage& image);

// Total-internal-reflection critical angle in degrees, arcsin(n1/n2).
double critical_angle(double n1, double n2);

// Flattening at the network boundary: relative position -> 5 or 6 numbers,
// masks area-pooled to pooled_width x pooled_height.
std::vector<double> observation_vector(const RelativePosition& obs);
std::vector<double> observation_vector(const BinaryMask& mask,
                                       int pooled_width, int pooled_height);
std::vector<double> observation_vector(const TernaryMask& mask,
                                       int pooled_width, int pooled_height);

// PGM (P5, 8-bit) persistence; ternary values encode 0->0, 1->255, -1->128.
void write_pgm(const std::string& path, const BinaryMask& mask);
void write_pgm(const std::string& path, const TernaryMask& mask);
void write_pgm(const std::string& path, const DepthImage& depth);
BinaryMask read_binary_pgm(const std::string& path);

}  // namespace gelsim

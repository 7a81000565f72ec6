#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gelsim {

// Interleaved 8-bit RGB.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int width, int height)
        : width(width), height(height),
          data(static_cast<std::size_t>(width) * height * 3, 0) {}

    std::uint8_t& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

// Reads a PNG or PPM (P6/P3) file, dispatching on content.
RgbImage read_image(const std::string& path);

void write_ppm(const std::string& path, const RgbImage& image);

}  // namespace gelsim

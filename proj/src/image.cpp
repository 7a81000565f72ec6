#include "gelsim/image.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace gelsim {

namespace {

RgbImage read_ppm(std::ifstream& in, const std::string& path,
                  const std::string& magic) {
    auto skip_space_and_comments = [&in] {
        while (true) {
            int c = in.peek();
            if (c == '#') {
                in.ignore(1 << 20, '\n');
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
    };
    int width, height, maxval;
    skip_space_and_comments();
    in >> width;
    skip_space_and_comments();
    in >> height;
    skip_space_and_comments();
    in >> maxval;
    if (!in || width <= 0 || height <= 0 || maxval != 255) {
        throw std::runtime_error(path + ": unsupported PPM header");
    }
    RgbImage image(width, height);
    if (magic == "P6") {
        in.get();
        in.read(reinterpret_cast<char*>(image.data.data()),
                static_cast<std::streamsize>(image.data.size()));
        if (!in) throw std::runtime_error(path + ": truncated PPM");
    } else {  // P3
        for (auto& byte : image.data) {
            int v;
            in >> v;
            if (!in || v < 0 || v > 255) {
                throw std::runtime_error(path + ": bad P3 sample");
            }
            byte = static_cast<std::uint8_t>(v);
        }
    }
    return image;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        if (file) std::fclose(file);
    }
};

RgbImage read_png(const std::string& path) {
    PngReader r;
    r.file = std::fopen(path.c_str(), "rb");
    if (!r.file) throw std::runtime_error("cannot open " + path);
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                   nullptr);
    r.info = png_create_info_struct(r.png);
    if (!r.png || !r.info || setjmp(png_jmpbuf(r.png))) {
        throw std::runtime_error(path + ": PNG decode failed");
    }
    png_init_io(r.png, r.file);
    png_read_info(r.png, r.info);

    // Normalize everything to 8-bit RGB.
    png_set_strip_16(r.png);
    png_set_palette_to_rgb(r.png);
    png_set_expand_gray_1_2_4_to_8(r.png);
    png_set_gray_to_rgb(r.png);
    png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    int width = static_cast<int>(png_get_image_width(r.png, r.info));
    int height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_rowbytes(r.png, r.info) !=
        static_cast<std::size_t>(width) * 3) {
        throw std::runtime_error(path + ": unexpected PNG row layout");
    }
    RgbImage image(width, height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = image.data.data() + static_cast<std::size_t>(y) * width * 3;
    }
    png_read_image(r.png, rows.data());
    return image;
}

}  // namespace

RgbImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (!in) throw std::runtime_error(path + ": empty file");
    if (magic == "P6" || magic == "P3") {
        return read_ppm(in, path, magic);
    }
    if (magic[0] == '\x89' && magic[1] == 'P') {
        in.close();
        return read_png(path);
    }
    throw std::runtime_error(path + ": not a PNG or PPM image");
}

void write_ppm(const std::string& path, const RgbImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data.data()),
              static_cast<std::streamsize>(image.data.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace gelsim

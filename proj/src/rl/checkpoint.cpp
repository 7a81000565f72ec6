#include "gelsim/rl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gelsim::rl {

namespace {

constexpr char kMagic[8] = {'G', 'S', 'C', 'K', 'P', 'T', '0', '\n'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error(path + ": corrupt checkpoint (truncated)");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<NamedNet>& nets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(nets.size()));
    for (const NamedNet& n : nets) {
        put(out, static_cast<std::uint32_t>(n.name.size()));
        out.write(n.name.data(), static_cast<std::streamsize>(n.name.size()));
        put(out, n.net.output_scale());
        put(out, static_cast<std::uint32_t>(n.net.widths().size()));
        for (int w : n.net.widths()) put(out, static_cast<std::uint32_t>(w));
        for (std::size_t l = 0; l < n.net.weights().size(); ++l) {
            const Matrix& w = n.net.weights()[l];
            // row-major layout on disk
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                for (Eigen::Index c = 0; c < w.cols(); ++c) put(out, w(r, c));
            }
            const Vector& b = n.net.biases()[l];
            for (Eigen::Index i = 0; i < b.size(); ++i) put(out, b[i]);
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<NamedNet> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error(path + ": not a checkpoint (bad magic header)");
    }
    auto version = get<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
    }
    auto count = get<std::uint32_t>(in, path);
    std::vector<NamedNet> nets;
    for (std::uint32_t n = 0; n < count; ++n) {
        auto name_len = get<std::uint32_t>(in, path);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) throw std::runtime_error(path + ": corrupt checkpoint (truncated)");
        auto scale = get<double>(in, path);
        auto n_widths = get<std::uint32_t>(in, path);
        if (n_widths < 2 || n_widths > 64) {
            throw std::runtime_error(path + ": corrupt checkpoint (widths)");
        }
        std::vector<int> widths;
        for (std::uint32_t i = 0; i < n_widths; ++i) {
            widths.push_back(static_cast<int>(get<std::uint32_t>(in, path)));
        }
        Mlp net(widths, scale, 0);
        for (std::size_t l = 0; l < net.weights().size(); ++l) {
            Matrix& w = net.weights()[l];
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                for (Eigen::Index c = 0; c < w.cols(); ++c) {
                    w(r, c) = get<double>(in, path);
                }
            }
            Vector& b = net.biases()[l];
            for (Eigen::Index i = 0; i < b.size(); ++i) {
                b[i] = get<double>(in, path);
            }
        }
        nets.push_back({std::move(name), std::move(net)});
    }
    return nets;
}

Mlp load_checkpoint_net(const std::string& path, const std::string& name) {
    for (NamedNet& n : load_checkpoint(path)) {
        if (n.name == name) return std::move(n.net);
    }
    throw std::runtime_error(path + ": checkpoint has no network named " + name);
}

}  // namespace gelsim::rl

#pragma once

#include <string>
#include <vector>

#include "gelsim/rl/mlp.hpp"

namespace gelsim::rl {

struct NamedNet {
    std::string name;
    Mlp net;
};

// Self-describing binary format: magic + version, then per net a name,
// the output scale, the layer widths, and row-major little-endian float64
// parameter arrays. Round-trips bit-exactly.
void save_checkpoint(const std::string& path,
                     const std::vector<NamedNet>& nets);

std::vector<NamedNet> load_checkpoint(const std::string& path);

// Convenience: the actor of a saved agent, by name.
Mlp load_checkpoint_net(const std::string& path, const std::string& name);

}  // namespace gelsim::rl

#pragma once

#include <cstdint>
#include <string>

#include "gelsim/rl/td3.hpp"
#include "gelsim/tasks.hpp"

namespace gelsim {

struct RunConfig {
    SceneConfig scene;
    TaskSpec task;
    rl::Td3Config td3;
    ExpertTrajectory expert;
    int observation_raster = 64;
    int observation_pooled = 16;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

// Parses the JSON config file. Unknown keys are errors; every key is
// optional and falls back to the compiled default.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

std::string run_config_to_json(const RunConfig& config);

}  // namespace gelsim

#pragma once

#include <string>

#include "gelsim/scene.hpp"

namespace gelsim {

struct PressDemoResult {
    double initial_height = 0;
    double pressed_height = 0;
    double final_height = 0;
    // Fraction of the pressed-in indentation recovered after release:
    // (final - pressed) / (initial - pressed). ~1 elastic, ~0 plastic.
    double recovery_ratio = 0;
};

// Presses both gels inward a fixed depth, holds, releases, and lets the
// object settle. Writes per-frame squeezed-area PGMs and the final x-z
// cross-section point dump into output_dir (pass "" to skip artifacts).
PressDemoResult run_press_demo(SceneConfig scene, double yield_stress,
                               const std::string& output_dir,
                               double press_strain = 0.05);

}  // namespace gelsim

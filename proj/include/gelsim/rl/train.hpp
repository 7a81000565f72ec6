#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gelsim/rl/env.hpp"
#include "gelsim/rl/td3.hpp"

namespace gelsim::rl {

struct CurvePoint {
    int episode = 0;
    double mean_reward = 0;
    double std_reward = 0;
};

struct LearningCurve {
    std::vector<CurvePoint> points;
};

struct TrainResult {
    LearningCurve curve;
    std::unique_ptr<Td3Agent> agent;
};

// Policy applied during evaluation and baseline rollouts.
struct EvalReport {
    double mean = 0;
    double std_dev = 0;
    std::vector<double> per_env;  // per-seed episode scores, in seed order
};

// Full TD3 training loop with the strategy schedule; strategy=baseline
// skips learning and replays the expert trajectory. Evaluation every
// cfg.eval_every episodes over cfg.eval_envs seeded envs feeds the curve.
TrainResult train(const EnvFactory& factory, const Td3Config& cfg,
                  std::uint64_t seed);

// Deterministic rollout score: per-episode reward averaged over the
// trailing `window` timesteps (0 = whole episode), reported over n seeded
// envs. agent == nullptr replays the expert demonstration instead.
EvalReport evaluate(const Td3Agent* agent, const EnvFactory& factory,
                    int n_envs, int window, std::uint64_t seed);

void write_curve_csv(const std::string& path, const LearningCurve& curve);

}  // namespace gelsim::rl

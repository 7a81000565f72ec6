#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gelsim/rl/mlp.hpp"
#include "gelsim/rl/replay.hpp"

namespace gelsim::rl {

enum class Strategy { td3, pretraining, multitask, baseline };

Strategy strategy_from_string(const std::string& name);
std::string strategy_name(Strategy s);

struct Td3Config {
    double gamma = 0.99;
    double tau = 0.005;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    int policy_delay = 2;
    double exploration_noise_std = 0.1;  // fraction of action_limit
    double target_noise_std = 0.2;       // fraction of action_limit
    double target_noise_clip = 0.5;      // fraction of action_limit
    int batch_size = 64;
    std::size_t buffer_capacity = 100000;
    int episodes = 400;        // imax
    int eval_every = 10;
    int eval_envs = 10;
    int eval_window = 0;       // trailing timesteps scored; 0 = full episode
    int warmup_steps = 256;    // random actions before the actor drives
    std::vector<int> hidden = {64, 64};
    Strategy strategy = Strategy::td3;

    void validate() const;
};

// The actor-loss blends of the demonstration-learning strategies.
//   td3:         L = -mean Q1(s, A(s))
//   expert term: L = mean |v_s - A(s)| (elementwise L1)
//   pretraining: expert term while episode <= imax/2, td3 after
//   multitask:   (i/imax) * td3 + (1 - i/imax) * expert
struct ActorLossParts {
    double td3 = 0;
    double expert = 0;
    double combined = 0;
};

class Td3Agent {
  public:
    Td3Agent(int obs_dim, int action_dim, double action_limit,
             const Td3Config& cfg, std::uint64_t seed);

    Vector act(const Vector& obs) const { return actor_.forward(obs); }

    // One critic regression step toward
    //   y = r + gamma (1-done) min(Q1', Q2')(s', A'(s') + clipped noise),
    // followed by a Polyak mix of the critic targets. Returns the mean
    // squared TD error.
    double critic_update(const std::vector<const Transition*>& batch,
                         std::mt19937_64& rng);

    // One actor step with the strategy-blended loss, followed by a Polyak
    // mix of the actor target. episode counts from 0 to imax.
    ActorLossParts actor_update(const std::vector<const Transition*>& batch,
                                Strategy strategy, int episode, int imax);

    // Loss evaluation only (no parameter update).
    ActorLossParts actor_loss(const std::vector<const Transition*>& batch,
                              Strategy strategy, int episode, int imax) const;

    double compute_target(const Transition& t, const Vector& noise) const;

    const Mlp& actor() const { return actor_; }
    Mlp& actor() { return actor_; }
    const Mlp& critic1() const { return critic1_; }
    const Mlp& critic2() const { return critic2_; }
    const Mlp& actor_target() const { return actor_target_; }
    const Mlp& critic1_target() const { return critic1_target_; }
    const Mlp& critic2_target() const { return critic2_target_; }
    double action_limit() const { return action_limit_; }
    const Td3Config& config() const { return cfg_; }

    std::vector<const Mlp*> networks() const;
    std::vector<Mlp*> networks();

  private:
    Td3Config cfg_;
    double action_limit_;
    Mlp actor_, critic1_, critic2_;
    Mlp actor_target_, critic1_target_, critic2_target_;
    Adam opt_actor_, opt_critic1_, opt_critic2_;
};

// Blend weights of the strategy schedule at training episode i of imax.
// Returned as (weight on the TD3 term, weight on the expert term).
std::pair<double, double> strategy_weights(Strategy strategy, int episode,
                                           int imax);

}  // namespace gelsim::rl

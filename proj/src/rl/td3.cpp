#include "gelsim/rl/td3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gelsim/rng.hpp"

namespace gelsim::rl {

Strategy strategy_from_string(const std::string& name) {
    if (name == "td3") return Strategy::td3;
    if (name == "pretraining") return Strategy::pretraining;
    if (name == "multitask") return Strategy::multitask;
    if (name == "baseline") return Strategy::baseline;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::td3: return "td3";
        case Strategy::pretraining: return "pretraining";
        case Strategy::multitask: return "multitask";
        case Strategy::baseline: return "baseline";
    }
    return "?";
}

void Td3Config::validate() const {
    if (gamma < 0 || gamma >= 1) throw std::invalid_argument("gamma must be in [0,1)");
    if (tau <= 0 || tau > 1) throw std::invalid_argument("tau must be in (0,1]");
    if (actor_lr <= 0 || critic_lr <= 0) {
        throw std::invalid_argument("learning rates must be positive");
    }
    if (policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
}

std::pair<double, double> strategy_weights(Strategy strategy, int episode,
                                           int imax) {
    switch (strategy) {
        case Strategy::td3:
            return {1.0, 0.0};
        case Strategy::pretraining:
            return episode * 2 <= imax ? std::pair{0.0, 1.0}
                                       : std::pair{1.0, 0.0};
        case Strategy::multitask: {
            double f = static_cast<double>(episode) / imax;
            return {f, 1.0 - f};
        }
        case Strategy::baseline:
            return {0.0, 0.0};  // no learning
    }
    return {1.0, 0.0};
}

Td3Agent::Td3Agent(int obs_dim, int action_dim, double action_limit,
                   const Td3Config& cfg, std::uint64_t seed)
    : cfg_(cfg), action_limit_(action_limit) {
    cfg_.validate();
    auto widths = [&](int in, int out) {
        std::vector<int> w{in};
        w.insert(w.end(), cfg.hidden.begin(), cfg.hidden.end());
        w.push_back(out);
        return w;
    };
    actor_ = Mlp(widths(obs_dim, action_dim), action_limit,
                 substream_seed(seed, "actor"));
    critic1_ = Mlp(widths(obs_dim + action_dim, 1), 0,
                   substream_seed(seed, "critic1"));
    critic2_ = Mlp(widths(obs_dim + action_dim, 1), 0,
                   substream_seed(seed, "critic2"));
    actor_target_ = actor_;
    critic1_target_ = critic1_;
    critic2_target_ = critic2_;
    opt_actor_ = Adam(actor_, cfg.actor_lr);
    opt_critic1_ = Adam(critic1_, cfg.critic_lr);
    opt_critic2_ = Adam(critic2_, cfg.critic_lr);
}

std::vector<const Mlp*> Td3Agent::networks() const {
    return {&actor_, &critic1_, &critic2_,
            &actor_target_, &critic1_target_, &critic2_target_};
}

std::vector<Mlp*> Td3Agent::networks() {
    return {&actor_, &critic1_, &critic2_,
            &actor_target_, &critic1_target_, &critic2_target_};
}

double Td3Agent::compute_target(const Transition& t, const Vector& noise) const {
    Vector a2 = actor_target_.forward(t.s2) + noise;
    a2 = a2.cwiseMax(-action_limit_).cwiseMin(action_limit_);
    Vector sa(t.s2.size() + a2.size());
    sa << t.s2, a2;
    double q1 = critic1_target_.forward(sa)[0];
    double q2 = critic2_target_.forward(sa)[0];
    return t.r + cfg_.gamma * (t.done ? 0.0 : 1.0) * std::min(q1, q2);
}

double Td3Agent::critic_update(const std::vector<const Transition*>& batch,
                               std::mt19937_64& rng) {
    const double n = static_cast<double>(batch.size());
    std::normal_distribution<double> noise_dist(
        0.0, cfg_.target_noise_std * action_limit_);
    const double clip = cfg_.target_noise_clip * action_limit_;

    MlpGrads g1 = critic1_.zero_grads();
    MlpGrads g2 = critic2_.zero_grads();
    std::vector<Vector> acts;
    double loss = 0;
    for (const Transition* t : batch) {
        Vector noise(t->a.size());
        for (Eigen::Index i = 0; i < noise.size(); ++i) {
            noise[i] = std::clamp(noise_dist(rng), -clip, clip);
        }
        double y = compute_target(*t, noise);

        Vector sa(t->s.size() + t->a.size());
        sa << t->s, t->a;
        for (auto [critic, grads] : {std::pair{&critic1_, &g1},
                                     std::pair{&critic2_, &g2}}) {
            double q = critic->forward_cached(sa, acts)[0];
            double err = q - y;
            loss += err * err / (2 * n);
            Vector dy(1);
            dy[0] = 2.0 * err / n;
            critic->backward(acts, dy, *grads);
        }
    }
    opt_critic1_.step(critic1_, g1);
    opt_critic2_.step(critic2_, g2);
    Mlp::polyak_mix(critic1_, critic1_target_, cfg_.tau);
    Mlp::polyak_mix(critic2_, critic2_target_, cfg_.tau);
    return loss;
}

ActorLossParts Td3Agent::actor_loss(const std::vector<const Transition*>& batch,
                                    Strategy strategy, int episode,
                                    int imax) const {
    auto [w_td3, w_expert] = strategy_weights(strategy, episode, imax);
    const double n = static_cast<double>(batch.size());
    ActorLossParts parts;
    for (const Transition* t : batch) {
        Vector a = actor_.forward(t->s);
        Vector sa(t->s.size() + a.size());
        sa << t->s, a;
        parts.td3 -= critic1_.forward(sa)[0] / n;
        if (w_expert != 0) {
            if (t->expert_v.size() != a.size()) {
                throw std::runtime_error(
                    "expert velocities missing for demonstration loss");
            }
            parts.expert += (t->expert_v - a).cwiseAbs().sum() / n;
        }
    }
    parts.combined = w_td3 * parts.td3 + w_expert * parts.expert;
    return parts;
}

ActorLossParts Td3Agent::actor_update(
    const std::vector<const Transition*>& batch, Strategy strategy,
    int episode, int imax) {
    auto [w_td3, w_expert] = strategy_weights(strategy, episode, imax);
    const double n = static_cast<double>(batch.size());
    MlpGrads ga = actor_.zero_grads();
    MlpGrads scratch = critic1_.zero_grads();  // discarded, critic is frozen here
    std::vector<Vector> actor_acts, critic_acts;
    ActorLossParts parts;
    for (const Transition* t : batch) {
        Vector a = actor_.forward_cached(t->s, actor_acts);
        Vector da = Vector::Zero(a.size());

        Vector sa(t->s.size() + a.size());
        sa << t->s, a;
        double q = critic1_.forward_cached(sa, critic_acts)[0];
        parts.td3 -= q / n;
        if (w_td3 != 0) {
            Vector dq(1);
            dq[0] = -w_td3 / n;
            Vector dsa = critic1_.backward(critic_acts, dq, scratch);
            da += dsa.tail(a.size());
        }
        if (w_expert != 0) {
            if (t->expert_v.size() != a.size()) {
                throw std::runtime_error(
                    "expert velocities missing for demonstration loss");
            }
            Vector diff = a - t->expert_v;
            parts.expert += diff.cwiseAbs().sum() / n;
            da += (w_expert / n) * diff.array().sign().matrix();
        } else if (t->expert_v.size() == a.size()) {
            parts.expert += (a - t->expert_v).cwiseAbs().sum() / n;
        }
        actor_.backward(actor_acts, da, ga);
    }
    parts.combined = w_td3 * parts.td3 + w_expert * parts.expert;
    opt_actor_.step(actor_, ga);
    Mlp::polyak_mix(actor_, actor_target_, cfg_.tau);
    return parts;
}

}  // namespace gelsim::rl

#include "gelsim/rl/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gelsim/rng.hpp"

namespace gelsim::rl {

namespace {

double episode_score(const std::vector<double>& rewards, int window) {
    if (rewards.empty()) return 0;
    std::size_t n = rewards.size();
    std::size_t w = (window <= 0 || static_cast<std::size_t>(window) > n)
                        ? n
                        : static_cast<std::size_t>(window);
    double sum = 0;
    for (std::size_t i = n - w; i < n; ++i) sum += rewards[i];
    return sum / static_cast<double>(w);
}

}  // namespace

EvalReport evaluate(const Td3Agent* agent, const EnvFactory& factory,
                    int n_envs, int window, std::uint64_t seed) {
    EvalReport report;
    for (int e = 0; e < n_envs; ++e) {
        auto env = factory();
        if (agent && env->observation_dim() != agent->actor().input_dim()) {
            throw std::runtime_error(
                "checkpoint/environment observation dimension mismatch");
        }
        Eigen::VectorXd obs = env->reset(substream_seed(seed, "eval") + e);
        std::vector<double> rewards;
        for (int t = 0; t < env->episode_length(); ++t) {
            Eigen::VectorXd action =
                agent ? agent->act(obs) : env->expert_action();
            StepResult r = env->step(action);
            rewards.push_back(r.reward);
            obs = std::move(r.observation);
            if (r.done) break;
        }
        report.per_env.push_back(episode_score(rewards, window));
    }
    double n = static_cast<double>(report.per_env.size());
    for (double v : report.per_env) report.mean += v / n;
    double var = 0;
    for (double v : report.per_env) {
        var += (v - report.mean) * (v - report.mean) / n;
    }
    report.std_dev = std::sqrt(var);
    return report;
}

TrainResult train(const EnvFactory& factory, const Td3Config& cfg,
                  std::uint64_t seed) {
    cfg.validate();
    auto env = factory();
    const int obs_dim = env->observation_dim();
    const int act_dim = env->action_dim();
    const double limit = env->action_limit();

    TrainResult result;
    result.agent = std::make_unique<Td3Agent>(obs_dim, act_dim, limit, cfg, seed);
    Td3Agent& agent = *result.agent;

    ReplayBuffer buffer(cfg.buffer_capacity);
    auto explore_rng = make_rng(seed, "exploration");
    auto train_rng = make_rng(seed, "training");
    std::normal_distribution<double> explore_noise(
        0.0, cfg.exploration_noise_std * limit);

    const bool learning = cfg.strategy != Strategy::baseline;
    long total_steps = 0;
    int critic_updates = 0;

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        Eigen::VectorXd obs = env->reset(substream_seed(seed, "episode") + episode);
        for (int t = 0; t < env->episode_length(); ++t) {
            Eigen::VectorXd expert = env->expert_action();
            Eigen::VectorXd action;
            if (!learning) {
                action = expert;
            } else if (total_steps < cfg.warmup_steps) {
                action = Eigen::VectorXd(act_dim);
                for (int i = 0; i < act_dim; ++i) {
                    action[i] = std::uniform_real_distribution<double>(
                        -limit, limit)(explore_rng);
                }
            } else {
                action = agent.act(obs);
                for (int i = 0; i < act_dim; ++i) {
                    action[i] += explore_noise(explore_rng);
                }
                action = action.cwiseMax(-limit).cwiseMin(limit);
            }
            StepResult r = env->step(action);
            ++total_steps;

            if (learning) {
                Transition tr;
                tr.s = obs;
                tr.a = action;
                tr.r = r.reward;
                tr.s2 = r.observation;
                tr.done = r.done;
                tr.expert_v = expert;
                buffer.push(std::move(tr));

                if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
                    auto batch = buffer.sample(cfg.batch_size, train_rng);
                    double closs = agent.critic_update(batch, train_rng);
                    ++critic_updates;
                    double aloss = 0;
                    if (critic_updates % cfg.policy_delay == 0) {
                        ActorLossParts parts = agent.actor_update(
                            batch, cfg.strategy, episode, cfg.episodes);
                        aloss = parts.combined;
                    }
                    if (!std::isfinite(closs) || !std::isfinite(aloss)) {
                        throw std::runtime_error(
                            "training diverged (non-finite loss) at episode " +
                            std::to_string(episode));
                    }
                }
            }
            obs = std::move(r.observation);
            if (r.done) break;
        }

        if ((episode + 1) % cfg.eval_every == 0) {
            EvalReport report =
                evaluate(learning ? &agent : nullptr, factory, cfg.eval_envs,
                         cfg.eval_window, seed);
            result.curve.points.push_back(
                {episode + 1, report.mean, report.std_dev});
        }
    }
    return result;
}

void write_curve_csv(const std::string& path, const LearningCurve& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "episode,mean_reward,std_reward\n";
    char line[128];
    for (const CurvePoint& p : curve.points) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", p.episode,
                      p.mean_reward, p.std_reward);
        out << line;
    }
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace gelsim::rl

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "gelsim/rl/checkpoint.hpp"
#include "gelsim/rl/env.hpp"
#include "gelsim/rl/replay.hpp"
#include "gelsim/rl/td3.hpp"
#include "gelsim/rl/train.hpp"
#include "gelsim/rng.hpp"

using namespace gelsim;
using namespace gelsim::rl;

namespace {

// 1-D point mass: x' = x + 0.25 a, reward -|x'|, terminal after 30 steps.
// The expert walks straight toward the origin.
class ToyEnv : public Env {
  public:
    int observation_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    double action_limit() const override { return 1.0; }
    int episode_length() const override { return 30; }

    Eigen::VectorXd reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        x_ = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        steps_ = 0;
        Eigen::VectorXd obs(1);
        obs[0] = x_;
        return obs;
    }

    StepResult step(const Eigen::VectorXd& action) override {
        double a = std::clamp(action[0], -1.0, 1.0);
        x_ += 0.25 * a;
        StepResult r;
        r.observation = Eigen::VectorXd(1);
        r.observation[0] = x_;
        r.reward = -std::abs(x_);
        r.done = ++steps_ >= episode_length();
        return r;
    }

    Eigen::VectorXd expert_action() const override {
        Eigen::VectorXd a(1);
        a[0] = std::clamp(-x_ / 0.25, -1.0, 1.0);
        return a;
    }

  private:
    double x_ = 0;
    int steps_ = 0;
};

double scalar_loss(const Mlp& net, const Vector& x, const Vector& weights) {
    return net.forward(x).dot(weights);
}

}  // namespace

TEST_CASE("mlp forward: hand-built 1-1-1 nets, linear and actor heads") {
    Mlp net({1, 1, 1}, 0.0, 1);
    net.weights()[0](0, 0) = 2.0;
    net.biases()[0][0] = -0.5;
    net.weights()[1](0, 0) = 3.0;
    net.biases()[1][0] = 0.25;
    Vector x(1);
    x[0] = 0.4;
    // tanh(2*0.4 - 0.5) = tanh(0.3); linear head.
    double expect = 3.0 * std::tanh(0.3) + 0.25;
    CHECK(net.forward(x)[0] == doctest::Approx(expect).epsilon(1e-15));

    Mlp actor({1, 1, 1}, 0.7, 1);
    actor.weights()[0] = net.weights()[0];
    actor.biases()[0] = net.biases()[0];
    actor.weights()[1] = net.weights()[1];
    actor.biases()[1] = net.biases()[1];
    CHECK(actor.forward(x)[0] ==
          doctest::Approx(0.7 * std::tanh(expect)).epsilon(1e-15));
}

TEST_CASE("mlp backward matches central finite differences") {
    for (double scale : {0.0, 0.9}) {
        Mlp net({3, 5, 2}, scale, 42);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> dist(0.0, 1.0);
        Vector x(3), wout(2);
        for (int i = 0; i < 3; ++i) x[i] = dist(rng);
        for (int i = 0; i < 2; ++i) wout[i] = dist(rng);

        std::vector<Vector> acts;
        net.forward_cached(x, acts);
        MlpGrads grads = net.zero_grads();
        Vector dx = net.backward(acts, wout, grads);

        const double h = 1e-6;
        for (std::size_t layer = 0; layer < net.weights().size(); ++layer) {
            for (int r = 0; r < net.weights()[layer].rows(); ++r) {
                for (int c = 0; c < net.weights()[layer].cols(); ++c) {
                    double& w = net.weights()[layer](r, c);
                    double w0 = w;
                    w = w0 + h;
                    double up = scalar_loss(net, x, wout);
                    w = w0 - h;
                    double dn = scalar_loss(net, x, wout);
                    w = w0;
                    CHECK(grads.w[layer](r, c) ==
                          doctest::Approx((up - dn) / (2 * h)).epsilon(1e-4));
                }
            }
            for (int r = 0; r < net.biases()[layer].size(); ++r) {
                double& b = net.biases()[layer][r];
                double b0 = b;
                b = b0 + h;
                double up = scalar_loss(net, x, wout);
                b = b0 - h;
                double dn = scalar_loss(net, x, wout);
                b = b0;
                CHECK(grads.b[layer][r] ==
                      doctest::Approx((up - dn) / (2 * h)).epsilon(1e-4));
            }
        }
        for (int i = 0; i < 3; ++i) {
            Vector xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd =
                (scalar_loss(net, xp, wout) - scalar_loss(net, xm, wout)) /
                (2 * h);
            CHECK(dx[i] == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("polyak mix endpoints and linearity") {
    Mlp online({2, 3, 1}, 0.0, 1);
    Mlp target({2, 3, 1}, 0.0, 2);
    double w_online = online.weights()[0](1, 1);
    double w_target = target.weights()[0](1, 1);

    Mlp frozen = target;
    Mlp::polyak_mix(online, frozen, 0.0);
    CHECK(frozen.weights()[0](1, 1) == w_target);

    Mlp copied = target;
    Mlp::polyak_mix(online, copied, 1.0);
    CHECK(copied.weights()[0](1, 1) == w_online);

    Mlp mixed = target;
    Mlp::polyak_mix(online, mixed, 0.25);
    CHECK(mixed.weights()[0](1, 1) ==
          doctest::Approx(0.25 * w_online + 0.75 * w_target).epsilon(1e-15));
}

TEST_CASE("adam first step is lr * g / (|g| + eps) per parameter") {
    Mlp net({1, 1}, 0.0, 3);
    net.weights()[0](0, 0) = 1.0;
    net.biases()[0][0] = 0.0;
    Adam opt(net, 0.01);
    MlpGrads g = net.zero_grads();
    g.w[0](0, 0) = 4.0;
    g.b[0][0] = -2.0;
    opt.step(net, g);
    // Bias-corrected first step: m_hat = g, v_hat = g^2.
    CHECK(net.weights()[0](0, 0) ==
          doctest::Approx(1.0 - 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-12));
    CHECK(net.biases()[0][0] ==
          doctest::Approx(0.01 * 2.0 / (2.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("replay buffer: ring overwrite and uniform sampling") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) {
        Transition t;
        t.r = i;
        buf.push(std::move(t));
    }
    CHECK(buf.size() == 3);
    CHECK(buf.capacity() == 3);
    // Entries 0 and 1 were overwritten by 3 and 4.
    std::vector<double> rewards;
    for (std::size_t i = 0; i < buf.size(); ++i) rewards.push_back(buf[i].r);
    std::sort(rewards.begin(), rewards.end());
    CHECK(rewards == std::vector<double>{2, 3, 4});

    std::mt19937_64 rng(1);
    auto batch = buf.sample(64, rng);
    CHECK(batch.size() == 64);
    int seen[3] = {0, 0, 0};
    for (const Transition* t : batch) {
        int r = static_cast<int>(t->r);
        REQUIRE(r >= 2);
        REQUIRE(r <= 4);
        ++seen[r - 2];
    }
    // All live entries are reachable.
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
    CHECK(seen[2] > 0);
}

TEST_CASE("compute_target: terminal, gamma=0, and the twin-critic min") {
    Td3Config cfg;
    cfg.hidden = {8};
    Td3Agent agent(2, 1, 0.5, cfg, 11);

    Transition t;
    t.s = Vector::Zero(2);
    t.a = Vector::Zero(1);
    t.s2 = Vector(2);
    t.s2 << 0.3, -0.2;
    t.r = 1.25;
    Vector noise = Vector::Zero(1);

    SUBCASE("terminal transitions ignore the bootstrap") {
        t.done = true;
        CHECK(agent.compute_target(t, noise) == 1.25);
    }
    SUBCASE("gamma = 0 reduces to the reward") {
        Td3Config g0 = cfg;
        g0.gamma = 0.0;
        Td3Agent myopic(2, 1, 0.5, g0, 11);
        CHECK(myopic.compute_target(t, noise) == 1.25);
    }
    SUBCASE("bootstrap equals the replicated twin-min formula") {
        Vector a2 = agent.actor_target().forward(t.s2);
        a2[0] = std::clamp(a2[0] + 0.1, -0.5, 0.5);
        Vector sa(3);
        sa << t.s2, a2;
        double q1 = agent.critic1_target().forward(sa)[0];
        double q2 = agent.critic2_target().forward(sa)[0];
        Vector n1(1);
        n1[0] = 0.1;
        CHECK(agent.compute_target(t, n1) ==
              doctest::Approx(1.25 + 0.99 * std::min(q1, q2)).epsilon(1e-15));
    }
    SUBCASE("huge noise saturates at the action limit") {
        Vector big(1);
        big[0] = 100.0;
        Vector a2(1);
        a2[0] = 0.5;  // clipped
        Vector sa(3);
        sa << t.s2, a2;
        double q1 = agent.critic1_target().forward(sa)[0];
        double q2 = agent.critic2_target().forward(sa)[0];
        CHECK(agent.compute_target(t, big) ==
              doctest::Approx(1.25 + 0.99 * std::min(q1, q2)).epsilon(1e-15));
    }
}

TEST_CASE("strategy schedule endpoints") {
    CHECK(strategy_weights(Strategy::td3, 0, 100) == std::pair{1.0, 0.0});
    CHECK(strategy_weights(Strategy::td3, 100, 100) == std::pair{1.0, 0.0});

    CHECK(strategy_weights(Strategy::pretraining, 0, 100) ==
          std::pair{0.0, 1.0});
    CHECK(strategy_weights(Strategy::pretraining, 50, 100) ==
          std::pair{0.0, 1.0});
    CHECK(strategy_weights(Strategy::pretraining, 51, 100) ==
          std::pair{1.0, 0.0});
    CHECK(strategy_weights(Strategy::pretraining, 100, 100) ==
          std::pair{1.0, 0.0});

    CHECK(strategy_weights(Strategy::multitask, 0, 100) == std::pair{0.0, 1.0});
    CHECK(strategy_weights(Strategy::multitask, 100, 100) ==
          std::pair{1.0, 0.0});
    auto [w_td3, w_expert] = strategy_weights(Strategy::multitask, 25, 100);
    CHECK(w_td3 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w_expert == doctest::Approx(0.75).epsilon(1e-15));

    CHECK(strategy_weights(Strategy::baseline, 5, 100) == std::pair{0.0, 0.0});

    CHECK(strategy_from_string("multitask") == Strategy::multitask);
    CHECK(strategy_name(Strategy::pretraining) == "pretraining");
    CHECK_THROWS_AS(strategy_from_string("ddpg"), std::invalid_argument);
}

TEST_CASE("actor outputs respect the action limit") {
    Td3Config cfg;
    Td3Agent agent(4, 2, 0.3, cfg, 99);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        Vector obs(4);
        for (int j = 0; j < 4; ++j) obs[j] = dist(rng);
        Vector a = agent.act(obs);
        CHECK(std::abs(a[0]) <= 0.3);
        CHECK(std::abs(a[1]) <= 0.3);
    }
}

TEST_CASE("expert regression: pure demonstration loss imitates the expert") {
    Td3Config cfg;
    cfg.hidden = {16, 16};
    cfg.actor_lr = 1e-3;
    Td3Agent agent(1, 1, 1.0, cfg, 2024);

    // Expert rule a = clamp(-0.8 s) on s in [-1, 1].
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Transition> data(256);
    std::vector<const Transition*> batch;
    for (Transition& t : data) {
        t.s = Vector(1);
        t.s[0] = dist(rng);
        t.a = Vector::Zero(1);
        t.s2 = t.s;
        t.expert_v = Vector(1);
        t.expert_v[0] = -0.8 * t.s[0];
        batch.push_back(&t);
    }
    // Episode 0 of the pretraining schedule is the pure expert term.
    for (int i = 0; i < 2000; ++i) {
        agent.actor_update(batch, Strategy::pretraining, 0, 100);
    }
    ActorLossParts parts = agent.actor_loss(batch, Strategy::pretraining, 0, 100);
    CHECK(parts.expert < 0.05);  // mean |error| under 5% of the limit
    CHECK(parts.combined == parts.expert);
}

TEST_CASE("critic regression: gamma=0 constant reward is learned") {
    Td3Config cfg;
    cfg.gamma = 0.0;
    cfg.hidden = {16};
    cfg.critic_lr = 1e-3;
    Td3Agent agent(1, 1, 1.0, cfg, 5);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Transition> data(128);
    std::vector<const Transition*> batch;
    for (Transition& t : data) {
        t.s = Vector(1);
        t.s[0] = dist(rng);
        t.a = Vector(1);
        t.a[0] = dist(rng);
        t.s2 = t.s;
        t.r = 0.7;
        t.expert_v = Vector::Zero(1);
        batch.push_back(&t);
    }
    double loss = 1;
    for (int i = 0; i < 1500; ++i) loss = agent.critic_update(batch, rng);
    CHECK(loss < 1e-3);
    Vector sa(2);
    sa << 0.2, -0.4;
    CHECK(agent.critic1().forward(sa)[0] == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("toy environment: training beats the untrained policy") {
    EnvFactory factory = [] { return std::make_unique<ToyEnv>(); };
    Td3Config cfg;
    cfg.episodes = 150;
    cfg.eval_every = 30;
    cfg.eval_envs = 8;
    cfg.gamma = 0.95;
    cfg.hidden = {16, 16};
    cfg.warmup_steps = 500;
    cfg.batch_size = 64;
    cfg.actor_lr = 1e-3;
    cfg.critic_lr = 1e-3;
    cfg.exploration_noise_std = 0.2;
    cfg.strategy = Strategy::td3;

    TrainResult result = train(factory, cfg, 31);
    REQUIRE(result.curve.points.size() == 5);
    EvalReport untrained;
    {
        Td3Agent fresh(1, 1, 1.0, cfg, 31);
        untrained = evaluate(&fresh, factory, 8, 0, 31);
    }
    CHECK(result.curve.points.back().mean_reward > untrained.mean);
    CHECK(result.curve.points.back().mean_reward > -0.3);

    // Same seed, same curve, bit for bit.
    TrainResult again = train(factory, cfg, 31);
    for (std::size_t i = 0; i < result.curve.points.size(); ++i) {
        CHECK(again.curve.points[i].mean_reward ==
              result.curve.points[i].mean_reward);
        CHECK(again.curve.points[i].std_reward ==
              result.curve.points[i].std_reward);
    }
}

TEST_CASE("baseline strategy replays the expert and learns nothing") {
    EnvFactory factory = [] { return std::make_unique<ToyEnv>(); };
    Td3Config cfg;
    cfg.episodes = 10;
    cfg.eval_every = 5;
    cfg.eval_envs = 4;
    cfg.strategy = Strategy::baseline;
    TrainResult result = train(factory, cfg, 1);
    REQUIRE(result.curve.points.size() == 2);
    // The expert is near optimal on the toy task from the first eval.
    CHECK(result.curve.points.front().mean_reward > -0.1);
    CHECK(result.curve.points.front().mean_reward ==
          result.curve.points.back().mean_reward);
}

TEST_CASE("curve csv layout") {
    LearningCurve curve;
    curve.points.push_back({10, -0.5, 0.125});
    const char* path = "test_rl_curve.csv";
    write_curve_csv(path, curve);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "episode,mean_reward,std_reward");
    CHECK(line == "10,-0.5,0.125");
    std::remove(path);
}

TEST_CASE("checkpoint: bit-exact round trip and error paths") {
    std::vector<NamedNet> nets;
    nets.push_back({"actor", Mlp({3, 8, 2}, 0.5, 101)});
    nets.push_back({"critic1", Mlp({5, 8, 1}, 0.0, 102)});
    const char* path = "test_rl_ckpt.bin";
    save_checkpoint(path, nets);

    std::vector<NamedNet> back = load_checkpoint(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "actor");
    CHECK(back[0].net.output_scale() == 0.5);
    CHECK(back[0].net.widths() == std::vector<int>{3, 8, 2});
    for (std::size_t l = 0; l < nets[0].net.weights().size(); ++l) {
        CHECK(back[0].net.weights()[l] == nets[0].net.weights()[l]);
        CHECK(back[0].net.biases()[l] == nets[0].net.biases()[l]);
    }

    Mlp actor = load_checkpoint_net(path, "actor");
    CHECK(actor.widths() == std::vector<int>{3, 8, 2});
    CHECK_THROWS_AS(load_checkpoint_net(path, "critic9"), std::runtime_error);

    // Truncation.
    {
        std::ifstream in(path, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(),
                  static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);

    // Bad magic.
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTACKPT and some trailing bytes to get past the header";
    }
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
    std::remove(path);

    CHECK_THROWS_AS(load_checkpoint("no_such_checkpoint.bin"),
                    std::runtime_error);
}

TEST_CASE("config validation") {
    Td3Config cfg;
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = Td3Config{};
    cfg.tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = Td3Config{};
    cfg.policy_delay = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = Td3Config{};
    CHECK_NOTHROW(cfg.validate());
}

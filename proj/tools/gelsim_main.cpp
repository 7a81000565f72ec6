#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gelsim/config.hpp"
#include "gelsim/env_adapter.hpp"
#include "gelsim/observations.hpp"
#include "gelsim/press_demo.hpp"
#include "gelsim/rl/checkpoint.hpp"
#include "gelsim/rl/train.hpp"
#include "gelsim/rng.hpp"
#include "gelsim/tasks.hpp"

namespace fs = std::filesystem;
using namespace gelsim;

namespace {

std::uint64_t fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg,
                    const std::vector<std::string>& outputs) {
    std::ofstream out(dir / "manifest.txt");
    out << "seed " << cfg.seed << "\n";
    for (const std::string& name : outputs) {
        char line[64];
        std::snprintf(line, sizeof(line), "%016llx",
                      static_cast<unsigned long long>(fnv1a_file(dir / name)));
        out << name << " " << line << "\n";
    }
    out << "config:\n" << run_config_to_json(cfg);
}

rl::EnvFactory make_factory(const RunConfig& cfg) {
    return [cfg] {
        return std::make_unique<ManipulationEnv>(cfg.scene, cfg.task,
                                                 cfg.expert,
                                                 cfg.observation_raster,
                                                 cfg.observation_pooled);
    };
}

int cmd_press_demo(const RunConfig& cfg, double yield_stress,
                   double press_strain) {
    fs::create_directories(cfg.output_dir);
    PressDemoResult res = run_press_demo(cfg.scene, yield_stress,
                                         cfg.output_dir, press_strain);
    std::ofstream report(fs::path(cfg.output_dir) / "recovery.txt");
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "yield_stress %.17g\ninitial_height %.17g\n"
                  "pressed_height %.17g\nfinal_height %.17g\n"
                  "recovery_ratio %.17g\n",
                  yield_stress, res.initial_height, res.pressed_height,
                  res.final_height, res.recovery_ratio);
    report << buf;
    std::cout << buf;
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    rl::TrainResult result = rl::train(make_factory(cfg), cfg.td3, cfg.seed);
    fs::path dir(cfg.output_dir);
    rl::write_curve_csv((dir / "curve.csv").string(), result.curve);
    rl::save_checkpoint(
        (dir / "checkpoint.bin").string(),
        {{"actor", result.agent->actor()},
         {"critic1", result.agent->critic1()},
         {"critic2", result.agent->critic2()},
         {"actor_target", result.agent->actor_target()},
         {"critic1_target", result.agent->critic1_target()},
         {"critic2_target", result.agent->critic2_target()}});
    write_manifest(dir, cfg, {"curve.csv", "checkpoint.bin"});
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
    fs::create_directories(cfg.output_dir);
    std::unique_ptr<rl::Td3Agent> agent;
    const bool baseline = cfg.td3.strategy == rl::Strategy::baseline;
    rl::Mlp actor;
    if (!baseline) {
        actor = rl::load_checkpoint_net(checkpoint_path, "actor");
    }
    auto factory = make_factory(cfg);
    {
        auto probe = factory();
        if (!baseline && actor.input_dim() != probe->observation_dim()) {
            throw std::runtime_error(
                "checkpoint observation dimension does not match the task");
        }
    }
    rl::EvalReport report;
    if (baseline) {
        report = rl::evaluate(nullptr, factory, cfg.td3.eval_envs,
                              cfg.td3.eval_window, cfg.seed);
    } else {
        rl::Td3Agent shell(actor.input_dim(), actor.output_dim(),
                           cfg.scene.action_limit, cfg.td3, cfg.seed);
        shell.actor() = actor;
        report = rl::evaluate(&shell, factory, cfg.td3.eval_envs,
                              cfg.td3.eval_window, cfg.seed);
    }

    std::ofstream out(fs::path(cfg.output_dir) / "eval.txt");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mean %.17g\nstd %.17g\n", report.mean,
                  report.std_dev);
    out << buf;
    std::cout << buf;
    for (std::size_t i = 0; i < report.per_env.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "env %zu reward %.17g\n", i,
                      report.per_env[i]);
        out << buf;
        std::cout << buf;
    }

    if (cfg.task.kind == TaskKind::cylinder || cfg.task.kind == TaskKind::sphere) {
        // Roundness of the final state of one deterministic rollout.
        auto env = std::make_unique<ManipulationEnv>(
            cfg.scene, cfg.task, cfg.expert, cfg.observation_raster,
            cfg.observation_pooled);
        Eigen::VectorXd obs = env->reset(substream_seed(cfg.seed, "eval"));
        for (int t = 0; t < env->episode_length(); ++t) {
            Eigen::VectorXd a = baseline
                ? env->expert_action()
                : static_cast<const rl::Mlp&>(actor).forward(obs);
            obs = env->step(a).observation;
        }
        std::ofstream csv(fs::path(cfg.output_dir) / "roundness.csv");
        csv << "task,face,r_min,r_max,ratio,success\n";
        for (const RoundnessReport& r : object_roundness(env->state())) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g,%.6g,%d\n",
                          cfg.task.kind == TaskKind::cylinder ? "cylinder"
                                                              : "sphere",
                          r.face.c_str(), r.r_min, r.r_max, r.ratio,
                          success_check(r.ratio, std::max(1e-9, r.ratio)) ? 1 : 0);
            csv << buf;
            std::cout << buf;
        }
    }
    return 0;
}

int cmd_segment(const std::string& image_path, double threshold1,
                double threshold2, const std::string& out_dir) {
    fs::create_directories(out_dir);
    RgbImage image = read_image(image_path);
    SegmentationResult res = segment_tactile_image(image, threshold1, threshold2);
    fs::path dir(out_dir);
    write_pgm((dir / "B1.pgm").string(), res.object);
    write_pgm((dir / "B2.pgm").string(), res.squeezed);
    write_pgm((dir / "B3.pgm").string(), res.contour);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.6g %.6g\n", res.centroid_x,
                  res.centroid_y);
    std::cout << buf;
    std::ofstream meta(dir / "segment_meta.txt");
    meta << "image " << image_path << "\nthreshold1 " << threshold1
         << "\nthreshold2 " << threshold2 << "\ncentroid " << buf;
    return 0;
}

int cmd_roundness(const std::string& mask_path, double baseline,
                  const std::string& out_dir) {
    BinaryMask mask = read_binary_pgm(mask_path);
    double ratio = roundness(mask_boundary(mask));
    bool ok = success_check(ratio, baseline);
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "roundness.csv");
    csv << "task,face,r_min,r_max,ratio,success\n";
    // R_min/R_max recomputed for the report row.
    auto boundary = mask_boundary(mask);
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    for (const auto& p : boundary) center += p;
    center /= static_cast<double>(boundary.size());
    double r_min = 1e300, r_max = 0;
    for (const auto& p : boundary) {
        double r = (p - center).norm();
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mask,-,%.6g,%.6g,%.6g,%d\n", r_min, r_max,
                  ratio, ok ? 1 : 0);
    csv << buf;
    std::cout << buf;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft-contact manipulation simulator and RL benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_override, checkpoint_path, image_path,
        mask_path;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    double yield_stress = kYieldElastoplastic;
    double press_strain = 0.05;
    double threshold1 = 0.08, threshold2 = 12.0;
    double baseline = 0.802;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON run config");
        if (need_config) opt->required();
        cmd->add_option("--seed", seed_override, "root RNG seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--out", out_override, "output directory");
    };

    auto* press = app.add_subcommand("press-demo",
                                     "press-hold-release material regime demo");
    add_common(press, false);
    press->add_option("--yield-stress", yield_stress,
                      "object yield stress (1 plastic, 100 elastoplastic, 1e6 "
                      "elastic)");
    press->add_option("--press-strain", press_strain,
                      "press depth as a fraction of object height");

    auto* train = app.add_subcommand("train", "train a TD3 policy");
    add_common(train, true);

    auto* eval = app.add_subcommand("eval", "evaluate a trained policy");
    add_common(eval, true);
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file");

    auto* segment = app.add_subcommand("segment",
                                       "segment a real tactile image");
    segment->add_option("image", image_path, "PNG or PPM tactile image")
        ->required();
    segment->add_option("--threshold1", threshold1, "gradient threshold");
    segment->add_option("--threshold2", threshold2,
                        "brightness threshold (8-bit units)");
    segment->add_option("--out", out_override, "output directory");

    auto* round = app.add_subcommand("roundness", "score a cross-section mask");
    round->add_option("mask", mask_path, "binary PGM mask")->required();
    round->add_option("--baseline", baseline, "success baseline roundness");
    round->add_option("--out", out_override, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        if (seed_set) cfg.seed = seed_override;
        if (!out_override.empty()) cfg.output_dir = out_override;

        if (press->parsed())
            return cmd_press_demo(cfg, yield_stress, press_strain);
        if (train->parsed()) return cmd_train(cfg);
        if (eval->parsed()) {
            if (cfg.td3.strategy != rl::Strategy::baseline &&
                checkpoint_path.empty()) {
                throw std::runtime_error(
                    "eval needs --checkpoint unless strategy is baseline");
            }
            return cmd_eval(cfg, checkpoint_path);
        }
        if (segment->parsed()) {
            return cmd_segment(image_path, threshold1, threshold2,
                               out_override.empty() ? "out" : out_override);
        }
        if (round->parsed()) {
            return cmd_roundness(mask_path, baseline,
                                 out_override.empty() ? "out" : out_override);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

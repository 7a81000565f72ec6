#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gelsim/image.hpp"
#include "gelsim/observations.hpp"
#include "gelsim/rl/checkpoint.hpp"

using namespace gelsim;
namespace fs = std::filesystem;

namespace {

#ifndef GELSIM_CLI_PATH
#error "GELSIM_CLI_PATH must point at the CLI binary"
#endif

struct RunResult {
    int exit_code = 0;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    fs::path log = fs::temp_directory_path() / "gelsim_cli_test.log";
    std::string cmd = std::string(GELSIM_CLI_PATH) + " " + args + " > " +
                      log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
    std::ifstream in(log);
    std::ostringstream text;
    text << in.rdbuf();
    r.output = text.str();
    return r;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

fs::path sandbox(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("gelsim_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kTinyTrainConfig = R"({
  "scene": {
    "grid_resolution": 32,
    "particle_spacing": 0.015625,
    "object_size": [0.1, 0.1, 0.1],
    "gel_size": [0.16, 0.08, 0.16],
    "gel_gap": 0.005,
    "squeeze_threshold_frac": 0.05,
    "episode_length": 6
  },
  "task": {
    "kind": "position_control",
    "target_position": [0.5, 0.5, 0.5],
    "episode_length": 6,
    "observation": "relative_position"
  },
  "td3": {
    "episodes": 2,
    "eval_every": 1,
    "eval_envs": 1,
    "warmup_steps": 8,
    "batch_size": 8,
    "buffer_capacity": 1000,
    "hidden": [8, 8]
  },
  "output_dir": "OUTDIR"
})";

void write_config(const fs::path& path, const fs::path& out_dir,
                  const std::string& extra_td3 = "") {
    std::string text = kTinyTrainConfig;
    text.replace(text.find("OUTDIR"), 6, out_dir.string());
    if (!extra_td3.empty()) {
        std::size_t pos = text.find("\"episodes\": 2,");
        text.insert(pos, extra_td3);
    }
    std::ofstream out(path);
    out << text;
}

RgbImage disk_ppm_image() {
    RgbImage img(48, 48);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) {
            double r = std::hypot(x - 23.5, y - 23.5);
            int value = r <= 6 ? 230 : (r <= 15 ? 120 : 40);
            for (int c = 0; c < 3; ++c) {
                img.at(y, x, c) = static_cast<std::uint8_t>(value);
            }
        }
    }
    return img;
}

}  // namespace

TEST_CASE("train requires a config; bad configs are rejected") {
    RunResult r = run_cli("train");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("--config") != std::string::npos);

    fs::path dir = sandbox("badcfg");
    std::ofstream(dir / "bad.json") << "{\"td3\": {\"learning_rate\": 1}}";
    r = run_cli("train --config " + (dir / "bad.json").string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("learning_rate") != std::string::npos);

    std::ofstream(dir / "syntax.json") << "{not json";
    r = run_cli("train --config " + (dir / "syntax.json").string());
    CHECK(r.exit_code != 0);

    r = run_cli("train --config " + (dir / "missing.json").string());
    CHECK(r.exit_code != 0);
}

TEST_CASE("train: artifacts, then a byte-identical rerun, then eval") {
    fs::path dir = sandbox("train");
    write_config(dir / "run.json", dir / "a");
    RunResult r = run_cli("train --config " + (dir / "run.json").string() +
                          " --seed 7");
    REQUIRE(r.exit_code == 0);

    std::string curve = read_file(dir / "a" / "curve.csv");
    CHECK(curve.rfind("episode,mean_reward,std_reward\n", 0) == 0);
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 3);  // header + 2

    std::vector<rl::NamedNet> nets =
        rl::load_checkpoint((dir / "a" / "checkpoint.bin").string());
    CHECK(nets.size() == 6);
    CHECK(nets[0].name == "actor");
    CHECK(nets[0].net.input_dim() == 6);
    CHECK(nets[0].net.output_dim() == 3);

    std::string manifest = read_file(dir / "a" / "manifest.txt");
    CHECK(manifest.find("seed 7") != std::string::npos);
    CHECK(manifest.find("curve.csv") != std::string::npos);
    CHECK(manifest.find("checkpoint.bin") != std::string::npos);

    // Same seed, fresh output directory: identical bytes.
    write_config(dir / "rerun.json", dir / "b");
    r = run_cli("train --config " + (dir / "rerun.json").string() +
                " --seed 7");
    REQUIRE(r.exit_code == 0);
    CHECK(read_file(dir / "b" / "curve.csv") == curve);
    CHECK(read_file(dir / "b" / "checkpoint.bin") ==
          read_file(dir / "a" / "checkpoint.bin"));

    // A different seed must not reproduce the curve.
    write_config(dir / "other.json", dir / "c");
    r = run_cli("train --config " + (dir / "other.json").string() +
                " --seed 8");
    REQUIRE(r.exit_code == 0);
    CHECK(read_file(dir / "c" / "curve.csv") != curve);

    // Evaluate the trained checkpoint.
    write_config(dir / "eval.json", dir / "evalout");
    r = run_cli("eval --config " + (dir / "eval.json").string() +
                " --checkpoint " + (dir / "a" / "checkpoint.bin").string() +
                " --seed 7");
    REQUIRE(r.exit_code == 0);
    std::string eval_txt = read_file(dir / "evalout" / "eval.txt");
    CHECK(eval_txt.rfind("mean ", 0) == 0);
    CHECK(eval_txt.find("std ") != std::string::npos);

    // eval without a checkpoint only works for the baseline strategy.
    r = run_cli("eval --config " + (dir / "eval.json").string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("checkpoint") != std::string::npos);
}

TEST_CASE("baseline eval replays the expert without a checkpoint") {
    fs::path dir = sandbox("baseline");
    write_config(dir / "run.json", dir / "out",
                 "\"strategy\": \"baseline\", ");
    RunResult r = run_cli("eval --config " + (dir / "run.json").string() +
                          " --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "eval.txt"));
    CHECK(r.output.find("mean ") != std::string::npos);
}

TEST_CASE("segment: masks and centroid for a synthetic image") {
    fs::path dir = sandbox("segment");
    write_ppm((dir / "touch.ppm").string(), disk_ppm_image());

    RunResult r = run_cli("segment " + (dir / "touch.ppm").string() +
                          " --out " + (dir / "out").string());
    REQUIRE(r.exit_code == 0);

    BinaryMask b1 = read_binary_pgm((dir / "out" / "B1.pgm").string());
    BinaryMask b2 = read_binary_pgm((dir / "out" / "B2.pgm").string());
    CHECK(b1.width == 48);
    CHECK(mask_area(b1) > 0);
    CHECK(mask_area(b2) > 0);
    for (std::size_t i = 0; i < b1.data.size(); ++i) {
        if (b2.data[i]) CHECK(b1.data[i] == 1);
    }
    CHECK(fs::exists(dir / "out" / "B3.pgm"));
    // Centroid of the symmetric fixture is the image center.
    double cx = 0, cy = 0;
    std::istringstream(r.output) >> cx >> cy;
    CHECK(cx == doctest::Approx(23.5).epsilon(0.01));
    CHECK(cy == doctest::Approx(23.5).epsilon(0.01));

    // A featureless image fails loudly.
    RgbImage flat(16, 16);
    for (auto& v : flat.data) v = 90;
    write_ppm((dir / "flat.ppm").string(), flat);
    r = run_cli("segment " + (dir / "flat.ppm").string() + " --out " +
                (dir / "out2").string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("no object found") != std::string::npos);
}

TEST_CASE("roundness: disk mask scores near 1, square misses a 0.99 baseline") {
    fs::path dir = sandbox("roundness");
    BinaryMask disk(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (std::hypot(x - 31.5, y - 31.5) <= 20) disk.at(y, x) = 1;
        }
    }
    write_pgm((dir / "disk.pgm").string(), disk);
    RunResult r = run_cli("roundness " + (dir / "disk.pgm").string() +
                          " --baseline 0.9 --out " + (dir / "out").string());
    REQUIRE(r.exit_code == 0);
    std::string csv = read_file(dir / "out" / "roundness.csv");
    CHECK(csv.rfind("task,face,r_min,r_max,ratio,success\n", 0) == 0);
    CHECK(csv.find(",1\n") != std::string::npos);  // success

    BinaryMask square(64, 64);
    for (int y = 12; y < 52; ++y) {
        for (int x = 12; x < 52; ++x) square.at(y, x) = 1;
    }
    write_pgm((dir / "square.pgm").string(), square);
    r = run_cli("roundness " + (dir / "square.pgm").string() +
                " --baseline 0.99 --out " + (dir / "out2").string());
    REQUIRE(r.exit_code == 0);
    csv = read_file(dir / "out2" / "roundness.csv");
    CHECK(csv.find(",0\n") != std::string::npos);  // square is not round

    r = run_cli("roundness " + (dir / "nope.pgm").string());
    CHECK(r.exit_code != 0);
}

TEST_CASE("press-demo: smoke run writes the recovery report") {
    fs::path dir = sandbox("press");
    write_config(dir / "run.json", dir / "out");
    RunResult r = run_cli("press-demo --config " + (dir / "run.json").string() +
                          " --yield-stress 1e6");
    REQUIRE(r.exit_code == 0);
    std::string report = read_file(dir / "out" / "recovery.txt");
    CHECK(report.find("yield_stress 1000000") != std::string::npos);
    CHECK(report.find("recovery_ratio") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "cross_section.csv"));
    // An elastic object recovers nearly all of the indentation.
    std::istringstream lines(report);
    std::string key;
    double value = -1, ratio = -1;
    while (lines >> key >> value) {
        if (key == "recovery_ratio") ratio = value;
    }
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);
}

#include "gelsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gelsim {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw std::runtime_error("config: unknown key \"" + key + "\" in " +
                                     where);
        }
    }
}

Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) {
        throw std::runtime_error("config: " + where + " must be a 3-array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Material parse_material(const json& j, const std::string& where,
                        const Material& fallback) {
    check_keys(j, where,
               {"youngs_modulus", "poisson_ratio", "yield_stress", "density"});
    return Material::make(
        j.value("youngs_modulus", fallback.youngs_modulus),
        j.value("poisson_ratio", fallback.poisson_ratio),
        j.value("yield_stress", fallback.yield_stress),
        j.value("density", fallback.density));
}

json material_to_json(const Material& m) {
    return {{"youngs_modulus", m.youngs_modulus},
            {"poisson_ratio", m.poisson_ratio},
            {"yield_stress", m.yield_stress},
            {"density", m.density}};
}

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "position_control") return TaskKind::position_control;
    if (name == "squeeze") return TaskKind::squeeze;
    if (name == "cylinder") return TaskKind::cylinder;
    if (name == "sphere") return TaskKind::sphere;
    throw std::runtime_error("config: unknown task kind \"" + name + "\"");
}

std::string task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::position_control: return "position_control";
        case TaskKind::squeeze: return "squeeze";
        case TaskKind::cylinder: return "cylinder";
        case TaskKind::sphere: return "sphere";
    }
    return "?";
}

ObservationKind observation_kind_from_string(const std::string& name) {
    if (name == "relative_position") return ObservationKind::relative_position;
    if (name == "squeezed_area") return ObservationKind::squeezed_area;
    if (name == "object_contour") return ObservationKind::object_contour;
    throw std::runtime_error("config: unknown observation kind \"" + name +
                             "\"");
}

std::string observation_kind_name(ObservationKind k) {
    switch (k) {
        case ObservationKind::relative_position: return "relative_position";
        case ObservationKind::squeezed_area: return "squeezed_area";
        case ObservationKind::object_contour: return "object_contour";
    }
    return "?";
}

void parse_scene(const json& j, SceneConfig& s) {
    check_keys(j, "scene",
               {"object_size", "object_center", "object_material", "gel_size",
                "gel_material", "gel_axis", "gel_gap", "particle_spacing",
                "action_limit", "substeps_per_env_step", "episode_length",
                "grid_resolution", "dt", "boundary_margin", "gravity",
                "bottom_gel_static", "center_jitter_frac", "reset_touch_speed",
                "reset_max_substeps", "squeeze_threshold_frac"});
    if (j.contains("object_size")) s.object_size = parse_vec3(j["object_size"], "scene.object_size");
    if (j.contains("object_center")) s.object_center = parse_vec3(j["object_center"], "scene.object_center");
    if (j.contains("object_material")) {
        s.object_material = parse_material(j["object_material"],
                                           "scene.object_material",
                                           s.object_material);
    }
    if (j.contains("gel_size")) s.gel_size = parse_vec3(j["gel_size"], "scene.gel_size");
    if (j.contains("gel_material")) {
        s.gel_material =
            parse_material(j["gel_material"], "scene.gel_material",
                           s.gel_material);
    }
    s.gel_axis = j.value("gel_axis", s.gel_axis);
    s.gel_gap = j.value("gel_gap", s.gel_gap);
    s.particle_spacing = j.value("particle_spacing", s.particle_spacing);
    s.action_limit = j.value("action_limit", s.action_limit);
    s.substeps_per_env_step = j.value("substeps_per_env_step", s.substeps_per_env_step);
    s.episode_length = j.value("episode_length", s.episode_length);
    s.grid_resolution = j.value("grid_resolution", s.grid_resolution);
    s.dt = j.value("dt", s.dt);
    s.boundary_margin = j.value("boundary_margin", s.boundary_margin);
    if (j.contains("gravity")) s.gravity = parse_vec3(j["gravity"], "scene.gravity");
    s.bottom_gel_static = j.value("bottom_gel_static", s.bottom_gel_static);
    s.center_jitter_frac = j.value("center_jitter_frac", s.center_jitter_frac);
    s.reset_touch_speed = j.value("reset_touch_speed", s.reset_touch_speed);
    s.reset_max_substeps = j.value("reset_max_substeps", s.reset_max_substeps);
    s.squeeze_threshold_frac = j.value("squeeze_threshold_frac", s.squeeze_threshold_frac);
}

void parse_task(const json& j, TaskSpec& t) {
    check_keys(j, "task",
               {"kind", "target_position", "target_thickness", "episode_length",
                "observation"});
    if (j.contains("kind")) t.kind = task_kind_from_string(j["kind"]);
    if (j.contains("target_position")) {
        t.target_position = parse_vec3(j["target_position"], "task.target_position");
    }
    t.target_thickness = j.value("target_thickness", t.target_thickness);
    t.episode_length = j.value("episode_length", t.episode_length);
    if (j.contains("observation")) {
        t.observation_kind = observation_kind_from_string(j["observation"]);
    }
}

void parse_td3(const json& j, rl::Td3Config& c) {
    check_keys(j, "td3",
               {"gamma", "tau", "actor_lr", "critic_lr", "policy_delay",
                "exploration_noise_std", "target_noise_std",
                "target_noise_clip", "batch_size", "buffer_capacity",
                "episodes", "eval_every", "eval_envs", "eval_window",
                "warmup_steps", "hidden", "strategy"});
    c.gamma = j.value("gamma", c.gamma);
    c.tau = j.value("tau", c.tau);
    c.actor_lr = j.value("actor_lr", c.actor_lr);
    c.critic_lr = j.value("critic_lr", c.critic_lr);
    c.policy_delay = j.value("policy_delay", c.policy_delay);
    c.exploration_noise_std = j.value("exploration_noise_std", c.exploration_noise_std);
    c.target_noise_std = j.value("target_noise_std", c.target_noise_std);
    c.target_noise_clip = j.value("target_noise_clip", c.target_noise_clip);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.episodes = j.value("episodes", c.episodes);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.eval_envs = j.value("eval_envs", c.eval_envs);
    c.eval_window = j.value("eval_window", c.eval_window);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<int>>();
    if (j.contains("strategy")) {
        c.strategy = rl::strategy_from_string(j["strategy"]);
    }
}

void parse_expert(const json& j, ExpertTrajectory& e) {
    check_keys(j, "expert", {"period", "amplitude", "radius", "press_depth"});
    e.period = j.value("period", e.period);
    e.amplitude = j.value("amplitude", e.amplitude);
    e.radius = j.value("radius", e.radius);
    e.press_depth = j.value("press_depth", e.press_depth);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    check_keys(j, "top level",
               {"scene", "task", "td3", "expert", "observation_raster",
                "observation_pooled", "output_dir", "seed"});
    RunConfig cfg;
    if (j.contains("scene")) parse_scene(j["scene"], cfg.scene);
    if (j.contains("task")) parse_task(j["task"], cfg.task);
    if (j.contains("td3")) parse_td3(j["td3"], cfg.td3);
    if (j.contains("expert")) parse_expert(j["expert"], cfg.expert);
    cfg.observation_raster = j.value("observation_raster", cfg.observation_raster);
    cfg.observation_pooled = j.value("observation_pooled", cfg.observation_pooled);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string run_config_to_json(const RunConfig& c) {
    json j;
    j["scene"] = {
        {"object_size", vec3_to_json(c.scene.object_size)},
        {"object_center", vec3_to_json(c.scene.object_center)},
        {"object_material", material_to_json(c.scene.object_material)},
        {"gel_size", vec3_to_json(c.scene.gel_size)},
        {"gel_material", material_to_json(c.scene.gel_material)},
        {"gel_axis", c.scene.gel_axis},
        {"gel_gap", c.scene.gel_gap},
        {"particle_spacing", c.scene.particle_spacing},
        {"action_limit", c.scene.action_limit},
        {"substeps_per_env_step", c.scene.substeps_per_env_step},
        {"episode_length", c.scene.episode_length},
        {"grid_resolution", c.scene.grid_resolution},
        {"dt", c.scene.dt},
        {"boundary_margin", c.scene.boundary_margin},
        {"gravity", vec3_to_json(c.scene.gravity)},
        {"bottom_gel_static", c.scene.bottom_gel_static},
        {"center_jitter_frac", c.scene.center_jitter_frac},
        {"reset_touch_speed", c.scene.reset_touch_speed},
        {"reset_max_substeps", c.scene.reset_max_substeps},
        {"squeeze_threshold_frac", c.scene.squeeze_threshold_frac},
    };
    j["task"] = {
        {"kind", task_kind_name(c.task.kind)},
        {"target_position", vec3_to_json(c.task.target_position)},
        {"target_thickness", c.task.target_thickness},
        {"episode_length", c.task.episode_length},
        {"observation", observation_kind_name(c.task.observation_kind)},
    };
    j["td3"] = {
        {"gamma", c.td3.gamma},
        {"tau", c.td3.tau},
        {"actor_lr", c.td3.actor_lr},
        {"critic_lr", c.td3.critic_lr},
        {"policy_delay", c.td3.policy_delay},
        {"exploration_noise_std", c.td3.exploration_noise_std},
        {"target_noise_std", c.td3.target_noise_std},
        {"target_noise_clip", c.td3.target_noise_clip},
        {"batch_size", c.td3.batch_size},
        {"buffer_capacity", c.td3.buffer_capacity},
        {"episodes", c.td3.episodes},
        {"eval_every", c.td3.eval_every},
        {"eval_envs", c.td3.eval_envs},
        {"eval_window", c.td3.eval_window},
        {"warmup_steps", c.td3.warmup_steps},
        {"hidden", c.td3.hidden},
        {"strategy", rl::strategy_name(c.td3.strategy)},
    };
    j["expert"] = {
        {"period", c.expert.period},
        {"amplitude", c.expert.amplitude},
        {"radius", c.expert.radius},
        {"press_depth", c.expert.press_depth},
    };
    j["observation_raster"] = c.observation_raster;
    j["observation_pooled"] = c.observation_pooled;
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

}  // namespace gelsim

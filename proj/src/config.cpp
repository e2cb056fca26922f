#include "ada/config.hpp"

#include "ada/error.hpp"
#include "ada/rng.hpp"
#include "ada/util.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ada {

namespace {

struct KeyDef {
    const char* name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;            // empty string = omit
};

void bad_value(const char* key, std::string_view value) {
    throw config_error(std::string("config key ") + key + ": cannot parse value '" +
                       std::string(value) + "'");
}

KeyDef double_key(const char* name, double RunConfig::*field) {
    return KeyDef{
        name,
        [name, field](RunConfig& c, std::string_view v) {
            double d;
            if (!parse_double(v, d)) bad_value(name, v);
            c.*field = d;
        },
        [field](const RunConfig& c) { return fmt_double(c.*field); }};
}

KeyDef int_key(const char* name, int RunConfig::*field) {
    return KeyDef{
        name,
        [name, field](RunConfig& c, std::string_view v) {
            std::int64_t i;
            if (!parse_int64(v, i)) bad_value(name, v);
            c.*field = static_cast<int>(i);
        },
        [field](const RunConfig& c) { return fmt_int(c.*field); }};
}

KeyDef bool_key(const char* name, bool RunConfig::*field) {
    return KeyDef{
        name,
        [name, field](RunConfig& c, std::string_view v) {
            bool b;
            if (!parse_bool(v, b)) bad_value(name, v);
            c.*field = b;
        },
        [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

KeyDef opt_double_key(const char* name, std::optional<double> RunConfig::*field) {
    return KeyDef{
        name,
        [name, field](RunConfig& c, std::string_view v) {
            double d;
            if (!parse_double(v, d)) bad_value(name, v);
            c.*field = d;
        },
        [field](const RunConfig& c) {
            return (c.*field) ? fmt_double(*(c.*field)) : std::string();
        }};
}

const std::vector<KeyDef>& key_defs() {
    static const std::vector<KeyDef> defs = [] {
        std::vector<KeyDef> d;
        d.push_back(int_key("MaxStepPerEpisode", &RunConfig::max_step_per_episode));
        d.push_back(double_key("ExtCoef", &RunConfig::ext_coef));
        d.push_back(double_key("LearningRate", &RunConfig::learning_rate));
        d.push_back(int_key("NumEnv", &RunConfig::num_env));
        d.push_back(int_key("NumStep", &RunConfig::num_step));
        d.push_back(double_key("Gamma", &RunConfig::gamma));
        d.push_back(double_key("IntGamma", &RunConfig::int_gamma));
        d.push_back(double_key("Lambda", &RunConfig::gae_lambda));
        d.push_back(double_key("StableEps", &RunConfig::stable_eps));
        d.push_back(double_key("ClipGradNorm", &RunConfig::clip_grad_norm));
        d.push_back(double_key("Entropy", &RunConfig::entropy));
        d.push_back(int_key("Epoch", &RunConfig::epoch));
        d.push_back(int_key("MiniBatch", &RunConfig::mini_batch));
        d.push_back(double_key("PPOEps", &RunConfig::ppo_eps));
        d.push_back(double_key("IntCoef", &RunConfig::int_coef));
        d.push_back(double_key("UpdateProportion", &RunConfig::update_proportion));
        d.push_back(int_key("ObsNormStep", &RunConfig::obs_norm_step));
        d.push_back(double_key("Confidence", &RunConfig::confidence));
        d.push_back(int_key("GoodBufferSize", &RunConfig::good_buffer_size));
        d.push_back(int_key("BadBufferSize", &RunConfig::bad_buffer_size));
        d.push_back(int_key("GoodBufferBatchSize", &RunConfig::good_buffer_batch_size));
        d.push_back(int_key("BadBufferBatchSize", &RunConfig::bad_buffer_batch_size));
        d.push_back(int_key("OriPolicyEnvNum", &RunConfig::ori_policy_env_num));
        d.push_back(int_key("ExploitUpdate", &RunConfig::exploit_update));
        d.push_back(int_key("TotalUpdates", &RunConfig::total_updates));
        d.push_back(double_key("SparsityLambda", &RunConfig::sparsity_lambda));
        d.push_back(int_key("HiddenSize", &RunConfig::hidden_size));
        d.push_back(int_key("LatentSize", &RunConfig::latent_size));
        d.push_back(int_key("ExploitSteps", &RunConfig::exploit_steps));
        d.push_back(double_key("ExploitLr", &RunConfig::exploit_lr));
        d.push_back(int_key("FailureWindow", &RunConfig::failure_window));
        d.push_back(double_key("IntClip", &RunConfig::int_clip));
        d.push_back(KeyDef{"seed",
                           [](RunConfig& c, std::string_view v) {
                               std::uint64_t u;
                               if (!parse_uint64(v, u)) bad_value("seed", v);
                               c.seed = u;
                           },
                           [](const RunConfig& c) {
                               return fmt_int(static_cast<std::int64_t>(c.seed));
                           }});
        d.push_back(KeyDef{"env.name",
                           [](RunConfig& c, std::string_view v) { c.env_name = std::string(v); },
                           [](const RunConfig& c) { return c.env_name; }});
        d.push_back(int_key("env.width", &RunConfig::env_width));
        d.push_back(int_key("env.height", &RunConfig::env_height));
        d.push_back(int_key("env.max_steps", &RunConfig::env_max_steps));
        d.push_back(opt_double_key("env.step_reward", &RunConfig::env_step_reward));
        d.push_back(opt_double_key("env.goal_reward", &RunConfig::env_goal_reward));
        d.push_back(opt_double_key("env.cliff_reward", &RunConfig::env_cliff_reward));
        d.push_back(KeyDef{"disable_memory",
                           [](RunConfig& c, std::string_view v) {
                               bool b;
                               if (!parse_bool(v, b)) bad_value("disable_memory", v);
                               c.disable_memory_opt = b;
                           },
                           [](const RunConfig& c) {
                               if (!c.disable_memory_opt) return std::string();
                               return std::string(*c.disable_memory_opt ? "true" : "false");
                           }});
        d.push_back(bool_key("disable_curiosity", &RunConfig::disable_curiosity));
        d.push_back(bool_key("disable_f_discriminator", &RunConfig::disable_f_discriminator));
        return d;
    }();
    return defs;
}

void apply_key(RunConfig& cfg, std::string_view key, std::string_view value) {
    for (const KeyDef& def : key_defs()) {
        if (key == def.name) {
            def.set(cfg, value);
            return;
        }
    }
    throw config_error("unknown config key: " + std::string(key));
}

void check_range(bool ok, const char* key, const char* what) {
    if (!ok) throw config_error(std::string("config key ") + key + ": " + what);
}

} // namespace

GridSpec RunConfig::grid_spec() const {
    GridOverrides ov;
    if (env_width > 0) ov.width = env_width;
    if (env_height > 0) ov.height = env_height;
    if (env_step_reward) ov.step_reward = *env_step_reward;
    if (env_goal_reward) ov.goal_reward = *env_goal_reward;
    if (env_cliff_reward) ov.cliff_reward = *env_cliff_reward;
    GridSpec spec = make_env(env_name, ov);
    if (env_max_steps > 0) {
        spec.max_steps = env_max_steps;
    } else {
        spec.max_steps = std::min(spec.max_steps, max_step_per_episode);
    }
    validate_spec(spec);
    return spec;
}

RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
        std::string_view key = trim(sv.substr(0, eq));
        std::string_view value = trim(sv.substr(eq + 1));
        apply_key(cfg, key, value);
    }
    for (const auto& [key, value] : overrides) apply_key(cfg, key, value);
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    return parse_config_text(path.empty() ? std::string() : read_text_file(path), overrides);
}

void validate_config(const RunConfig& c) {
    check_range(c.max_step_per_episode > 0, "MaxStepPerEpisode", "must be positive");
    check_range(c.ext_coef >= 0.0, "ExtCoef", "must be non-negative");
    check_range(c.learning_rate > 0.0, "LearningRate", "must be positive");
    check_range(c.num_env > 0, "NumEnv", "must be positive");
    check_range(c.num_step > 0, "NumStep", "must be positive");
    check_range(c.gamma >= 0.0 && c.gamma < 1.0, "Gamma", "must be in [0, 1)");
    check_range(c.int_gamma >= 0.0 && c.int_gamma < 1.0, "IntGamma", "must be in [0, 1)");
    check_range(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0, "Lambda", "must be in [0, 1]");
    check_range(c.stable_eps > 0.0, "StableEps", "must be positive");
    check_range(c.clip_grad_norm > 0.0, "ClipGradNorm", "must be positive");
    check_range(c.entropy >= 0.0, "Entropy", "must be non-negative");
    check_range(c.epoch > 0, "Epoch", "must be positive");
    check_range(c.mini_batch > 0, "MiniBatch", "must be positive");
    check_range(c.ppo_eps > 0.0 && c.ppo_eps < 1.0, "PPOEps", "must be in (0, 1)");
    check_range(c.int_coef >= 0.0, "IntCoef", "must be non-negative");
    check_range(c.update_proportion > 0.0 && c.update_proportion <= 1.0, "UpdateProportion",
                "must be in (0, 1]");
    check_range(c.obs_norm_step >= 0, "ObsNormStep", "must be non-negative");
    check_range(c.confidence >= 0.0 && c.confidence <= 1.0, "Confidence", "must be in [0, 1]");
    check_range(c.good_buffer_size > 0, "GoodBufferSize", "must be positive");
    check_range(c.bad_buffer_size > 0, "BadBufferSize", "must be positive");
    check_range(c.good_buffer_batch_size > 0, "GoodBufferBatchSize", "must be positive");
    check_range(c.bad_buffer_batch_size > 0, "BadBufferBatchSize", "must be positive");
    check_range(c.ori_policy_env_num >= 0, "OriPolicyEnvNum", "must be non-negative");
    check_range(c.ori_policy_env_num <= c.num_env, "OriPolicyEnvNum", "must not exceed NumEnv");
    check_range(c.exploit_update > 0, "ExploitUpdate", "must be positive");
    check_range(c.total_updates > 0, "TotalUpdates", "must be positive");
    check_range(c.sparsity_lambda >= 0.0, "SparsityLambda", "must be non-negative");
    check_range(c.hidden_size > 0, "HiddenSize", "must be positive");
    check_range(c.latent_size > 0, "LatentSize", "must be positive");
    check_range(c.exploit_steps >= 0, "ExploitSteps", "must be non-negative");
    check_range(c.exploit_lr > 0.0, "ExploitLr", "must be positive");
    check_range(c.failure_window > 0, "FailureWindow", "must be positive");
    check_range(c.int_clip >= 0.0, "IntClip", "must be non-negative");
    check_range(c.env_width >= 0, "env.width", "must be non-negative");
    check_range(c.env_height >= 0, "env.height", "must be non-negative");
    check_range(c.env_max_steps >= 0, "env.max_steps", "must be non-negative");
    if (c.env_name != "cliff_walking" && c.env_name != "four_rooms" &&
        c.env_name != "dark_chamber")
        throw config_error("env.name: unknown environment '" + c.env_name + "'");
    // materialize the grid to catch override combinations that break it
    c.grid_spec();
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const KeyDef& def : key_defs()) {
        std::string value = def.get(cfg);
        if (value.empty() && std::string_view(def.name) != "env.name") continue;
        out += def.name;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = fnv1a64(serialize_config(cfg));
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[15 - i] = hex[(h >> (4 * i)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace ada

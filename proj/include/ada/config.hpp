#pragma once

#include "ada/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ada {

/// Full experiment configuration. Field defaults mirror the hyperparameter
/// table the training loop was tuned with; the flat `Key = value` config file
/// and `--set Key=value` CLI overrides use the names in CamelCase below.
struct RunConfig {
    // learner
    int max_step_per_episode = 4500;   // MaxStepPerEpisode
    double ext_coef = 2.0;             // ExtCoef
    double learning_rate = 1e-4;       // LearningRate
    int num_env = 32;                  // NumEnv
    int num_step = 128;                // NumStep
    double gamma = 0.999;              // Gamma
    double int_gamma = 0.99;           // IntGamma
    double gae_lambda = 0.95;          // Lambda
    double stable_eps = 1e-8;          // StableEps
    double clip_grad_norm = 0.5;       // ClipGradNorm
    double entropy = 0.001;            // Entropy
    int epoch = 4;                     // Epoch
    int mini_batch = 4;                // MiniBatch
    double ppo_eps = 0.1;              // PPOEps
    double int_coef = 1.0;             // IntCoef
    double update_proportion = 0.25;   // UpdateProportion
    int obs_norm_step = 50;            // ObsNormStep
    double confidence = 0.85;          // Confidence
    int good_buffer_size = 10;         // GoodBufferSize
    int bad_buffer_size = 5000;        // BadBufferSize
    int good_buffer_batch_size = 1;    // GoodBufferBatchSize
    int bad_buffer_batch_size = 128;   // BadBufferBatchSize
    int ori_policy_env_num = 16;       // OriPolicyEnvNum
    int exploit_update = 50;           // ExploitUpdate

    // artifact-level knobs
    int total_updates = 50;            // TotalUpdates
    double sparsity_lambda = 0.01;     // SparsityLambda
    int hidden_size = 64;              // HiddenSize
    int latent_size = 32;              // LatentSize
    int exploit_steps = 64;            // ExploitSteps
    double exploit_lr = 1e-3;          // ExploitLr
    int failure_window = 10;           // FailureWindow
    double int_clip = 0.0;             // IntClip (0 disables clipping)
    std::uint64_t seed = 0;            // seed

    // environment selection
    std::string env_name = "cliff_walking";     // env.name
    int env_width = 0;                          // env.width (0 = canonical)
    int env_height = 0;                         // env.height
    int env_max_steps = 0;                      // env.max_steps (0 = canonical)
    std::optional<double> env_step_reward;      // env.step_reward
    std::optional<double> env_goal_reward;      // env.goal_reward
    std::optional<double> env_cliff_reward;     // env.cliff_reward

    // ablations; disable_memory defaults to true in the reward-free chamber
    std::optional<bool> disable_memory_opt;    // disable_memory
    bool disable_curiosity = false;            // disable_curiosity
    bool disable_f_discriminator = false;      // disable_f_discriminator

    bool memory_disabled() const {
        if (disable_memory_opt) return *disable_memory_opt;
        return env_name == "dark_chamber";
    }
    // IntCoef = 0 switches the intrinsic pathway off entirely
    bool curiosity_disabled() const { return disable_curiosity || int_coef == 0.0; }
    double effective_lambda() const { return disable_f_discriminator ? 0.0 : sparsity_lambda; }

    /// GridSpec for the configured environment with overrides applied; the
    /// episode cap is min(canonical, MaxStepPerEpisode) unless env.max_steps
    /// is set explicitly.
    GridSpec grid_spec() const;
};

/// Parses a flat `Key = value` file ('#' comments, blank lines allowed) and
/// applies CLI overrides on top; defaults < file < overrides. Every key is
/// validated; unknown keys are rejected.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

/// Same, from in-memory text (empty path semantics for tests and defaults).
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

void validate_config(const RunConfig& cfg);

/// Canonical flat serialization; parse_config_text(serialize_config(c))
/// reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization, in fixed-width hex.
std::string config_hash(const RunConfig& cfg);

} // namespace ada

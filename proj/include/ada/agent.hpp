#pragma once

#include "ada/config.hpp"
#include "ada/curiosity.hpp"
#include "ada/grid.hpp"
#include "ada/memory.hpp"
#include "ada/memrefl.hpp"
#include "ada/net.hpp"
#include "ada/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ada {

/// Reward composition and discounting for the two advantage streams.
struct RewardConfig {
    double ext_coef = 2.0;
    double int_coef = 1.0;
    double gamma_ext = 0.999;
    double gamma_int = 0.99;
    double gae_lambda = 0.95;
    double int_clip = 0.0; // 0 = no clipping
};

struct EnsembleConfig {
    double kappa = 0.85;
    int ensemble_env_count = 16;
    int failure_window = 10;
};

/// Shared trunk with a softmax policy head and two scalar value heads
/// (extrinsic and intrinsic returns). All four pieces update jointly under a
/// single global gradient-norm clip.
struct PolicyNet {
    Net trunk;
    Net pi_head;
    Net v_ext_head;
    Net v_int_head;
    AdamState adam_trunk, adam_pi, adam_v_ext, adam_v_int;

    std::size_t obs_dim() const { return trunk.in_dim(); }
    std::size_t n_actions() const { return pi_head.out_dim(); }
};

PolicyNet make_policy_net(std::size_t obs_dim, std::size_t n_actions, std::size_t hidden,
                          std::uint64_t seed, double adam_eps = 1e-8);

struct PolicyEval {
    std::vector<double> dist;
    double v_ext = 0.0;
    double v_int = 0.0;
};

PolicyEval policy_eval(const PolicyNet& policy, const InputView& input);

/// Draws from a categorical distribution (entries sum to 1).
int categorical_sample(const std::vector<double>& probs, Rng& rng);

enum class ActionSource : std::uint8_t { base = 0, memory = 1 };

struct ActionChoice {
    int action = 0;
    ActionSource source = ActionSource::base;
};

/// Per-step arbitration: on an ensemble-enabled env with a trained predictor,
/// take the predicted action when its confidence clears kappa; otherwise
/// sample the base policy. `base_dist` is the base policy at `obs`.
ActionChoice arbitrate_action(const std::vector<double>& base_dist, const PredictionNet* pred,
                              const ReflectionNet* refl, const Observation& obs, double kappa,
                              bool env_is_ensemble, Rng& rng);

/// Spec-shaped wrapper that evaluates the base policy itself.
ActionChoice ensemble_action(const PolicyNet& policy, const PredictionNet* pred,
                             const ReflectionNet* refl, const Observation& obs,
                             const EnsembleConfig& cfg, bool env_is_ensemble, Rng& rng);

/// Arrays are [step][env] flattened as t * n_envs + e.
struct Rollout {
    int n_envs = 0;
    int n_steps = 0;
    std::vector<Observation> obs;
    std::vector<int> action;
    std::vector<std::uint8_t> source; // ActionSource
    std::vector<double> logp;         // base-policy log prob of the taken action
    std::vector<double> ext_reward;
    std::vector<double> int_reward;   // normalized, clipped
    std::vector<std::uint8_t> done;   // episode ended on this step
    std::vector<double> v_ext;
    std::vector<double> v_int;
    std::vector<double> boot_v_ext;   // per env, value at the post-rollout obs
    std::vector<double> boot_v_int;
    std::vector<Observation> next_obs; // autoencoder training batch

    std::size_t idx(int t, int e) const {
        return static_cast<std::size_t>(t) * n_envs + e;
    }
    std::size_t size() const { return static_cast<std::size_t>(n_envs) * n_steps; }
};

struct EpisodeRecord {
    std::int64_t episode_index = 0;
    int update = 0;
    int env = 0;
    int length = 0;
    double ext_return = 0.0;
    TerminalKind kind = TerminalKind::truncated;
    bool reached_goal = false;
};

/// One environment lane: live state plus the episode accumulated so far
/// (episodes span rollout boundaries).
struct EnvSlot {
    EnvState state;
    Observation obs;
    std::vector<TrajStep> traj;
    std::vector<std::uint8_t> traj_source;
    double episode_return = 0.0;
};

struct CollectInputs {
    const GridSpec* spec = nullptr;
    const PolicyNet* policy = nullptr;
    const PredictionNet* pred = nullptr;    // null when memory disabled
    const ReflectionNet* refl = nullptr;
    const CoarseFineModel* curiosity = nullptr; // null when curiosity disabled
    RunningNormalizer* normalizer = nullptr;
    MemoryBuffer* mbuf = nullptr;
    FailureBuffer* rbuf = nullptr;
    int n_steps = 0;
    EnsembleConfig ensemble;
    double int_clip = 0.0;
    int update_index = 0;
    std::int64_t* episode_counter = nullptr;
    std::int64_t* fall_counter = nullptr;
    std::vector<std::uint32_t>* aggregate_heatmap = nullptr;
    std::vector<EpisodeRecord>* episode_log = nullptr;
};

/// Advances every env slot n_steps, recording the rollout, offering finished
/// episodes to the memory buffer and pushing memory-sourced failure pairs
/// from the trailing window of fatal episodes.
Rollout collect_rollout(const CollectInputs& in, std::vector<EnvSlot>& envs, Rng& action_rng);

struct GaeResult {
    std::vector<double> advantages;  // ext_coef * A_ext + int_coef * A_int
    std::vector<double> adv_ext;
    std::vector<double> adv_int;
    std::vector<double> ext_returns;
    std::vector<double> int_returns;
};

/// Dual-stream generalized advantage estimation: the extrinsic stream is
/// episodic (masked at done flags), the intrinsic stream ignores dones.
GaeResult compute_gae(const Rollout& rollout, const RewardConfig& cfg);

struct PpoHyper {
    double clip_eps = 0.1;
    int epochs = 4;
    int minibatches = 4;
    double entropy_coef = 0.001;
    double value_coef = 0.5;
    double lr = 1e-4;
    double max_grad_norm = 0.5;
    double stable_eps = 1e-8;
};

struct PpoStats {
    double policy_loss = 0.0;
    double v_ext_loss = 0.0;
    double v_int_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
};

/// Shifts to mean 0 and rescales by max(std, stable_eps) in place.
void normalize_advantages(std::vector<double>& adv, double stable_eps);

/// Clipped-surrogate update over the rollout; advantages are normalized to
/// mean 0 / std 1 over the whole batch before the epochs run.
PpoStats ppo_update(PolicyNet& policy, const Rollout& rollout, const GaeResult& gae,
                    const PpoHyper& hp, std::uint64_t rng_seed);

// ---- tabular Q-learning variant ----

struct QTransition {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
    bool terminal = false;
};

/// One-step Q-learning update; returns the updated table.
void q_learning_step(std::vector<double>& q_table, int n_actions, const QTransition& t,
                     double alpha, double gamma);

int epsilon_greedy(const std::vector<double>& q_table, int n_actions, int state, double epsilon,
                   Rng& rng);

// ---- full training loop ----

struct MetricsRow {
    int update = 0;
    std::int64_t env_steps = 0;
    double mean_ext_return = 0.0;
    double mean_int_reward = 0.0;
    double memory_action_frac = 0.0;
    std::int64_t cliff_falls_cum = 0;
    int coverage = 0;
    double pred_loss = 0.0;
    double refl_loss = 0.0;
    double ae_loss = 0.0;
    double policy_loss = 0.0;
    double v_ext_loss = 0.0;
    double v_int_loss = 0.0;
    double entropy = 0.0;
};

using MetricsSink = std::function<void(const MetricsRow&)>;
using EpisodeSink = std::function<void(const EpisodeRecord&)>;

/// Everything a run accumulates; the checkpoint serializes this whole struct.
struct TrainerState {
    GridSpec spec;
    PolicyNet policy;
    PredictionNet pred;
    ReflectionNet refl;
    CoarseFineModel curiosity;
    MemoryBuffer mbuf{1};
    FailureBuffer rbuf{1};
    RunningNormalizer normalizer;
    std::vector<std::uint32_t> aggregate_heatmap;
    std::int64_t episode_counter = 0;
    std::int64_t fall_counter = 0;
    int updates_done = 0;
    std::uint64_t action_rng_state = 0;
};

/// Runs the full training loop: collect, autoencoder step, dual-stream GAE,
/// PPO epochs, and periodic retraining of the prediction/reflection nets.
/// Deterministic given cfg (including its seed).
TrainerState train(const RunConfig& cfg, const MetricsSink& metrics_sink = nullptr,
                   const EpisodeSink& episode_sink = nullptr);

/// Base learner alone: same architecture and seeding, no memory, no
/// curiosity. The ablation-flag path of train() must reproduce this trace
/// bitwise.
TrainerState train_plain(const RunConfig& cfg, const MetricsSink& metrics_sink = nullptr,
                         const EpisodeSink& episode_sink = nullptr);

} // namespace ada

#pragma once

#include "ada/checkpoint.hpp"
#include "ada/config.hpp"
#include "ada/mdp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ada {

struct RunPaths {
    std::string metrics_csv;
    std::string episodes_csv;
    std::string checkpoint;
    std::string manifest;
    std::string heatmap_pgm;
};

/// Executes a full training run into out_dir: incrementally written metrics
/// and episode CSVs, a final checkpoint, the aggregate visit heatmap, and a
/// manifest. With plain_learner the baseline loop runs instead.
RunPaths run_experiment(const RunConfig& cfg, const std::string& out_dir,
                        bool plain_learner = false);

struct VerifyOptions {
    std::uint64_t seed_begin = 0;
    std::uint64_t seed_end = 1000;
    int min_states = 2, max_states = 10;
    int min_actions = 2, max_actions = 4;
    double gamma_lo = 0.5, gamma_hi = 0.99;
    double kappa = 0.85;
    double theorem1_tol = 1e-8;
    double theorem2_tol = 1e-9;
};

struct VerifySummary {
    std::int64_t instances = 0;
    std::int64_t failures = 0;
    std::int64_t resampled = 0;
};

struct VerifyRow {
    std::uint64_t seed = 0;
    int theorem = 0;
    bool holds = false;
    double min_gap = 0.0;
    double c_bound = 0.0; // theorem 1 only
};

/// One theorem-1 instance for `seed`: a random MDP (sizes and gamma drawn
/// from the seed) plus a random bonus scaled into [0, C]. Degenerate-gap
/// draws are resampled deterministically; `resamples` counts them.
VerifyRow verify_theorem1_instance(std::uint64_t seed, const VerifyOptions& opt,
                                   std::int64_t* resamples = nullptr);

/// One theorem-2 instance: random MDP, random policy, and a confidence table
/// built to satisfy the dominance precondition.
VerifyRow verify_theorem2_instance(std::uint64_t seed, const VerifyOptions& opt);

/// Runs both verifiers over the seed range, writing per-instance CSV rows and
/// a trailing summary line when csv_path is non-empty.
VerifySummary verify_theorems(const VerifyOptions& opt, const std::string& csv_path);

struct ReplayStep {
    int step = 0;
    int state_index = 0;
    int action = 0;
    double reward = 0.0;
    bool from_memory = false;
};

struct ReplayEpisode {
    std::vector<ReplayStep> steps;
    double ext_return = 0.0;
    bool reached_goal = false;
    bool fell = false;
};

/// Greedy rollouts from a checkpoint (base action = policy argmax, memory
/// arbitration active). Deterministic.
std::vector<ReplayEpisode> replay_checkpoint(const LoadedCheckpoint& ckpt, int episodes);

std::string render_grid_ascii(const GridSpec& spec, Cell agent);

} // namespace ada

#include "ada/agent.hpp"

#include <algorithm>
#include <cmath>

namespace ada {

namespace {

TrainerState init_state(const RunConfig& cfg) {
    TrainerState st;
    st.spec = cfg.grid_spec();
    const std::size_t obs_dim = static_cast<std::size_t>(st.spec.n_cells());
    const std::size_t hidden = static_cast<std::size_t>(cfg.hidden_size);
    st.policy = make_policy_net(obs_dim, kNumActions, hidden, split_seed(cfg.seed, "policy"),
                                cfg.stable_eps);
    st.pred = make_prediction_net(obs_dim, kNumActions, hidden, split_seed(cfg.seed, "pred"),
                                  cfg.stable_eps);
    st.refl = make_reflection_net(obs_dim, kNumActions, hidden, split_seed(cfg.seed, "refl"),
                                  cfg.stable_eps);
    st.curiosity = make_coarse_fine_model(obs_dim, hidden,
                                          static_cast<std::size_t>(cfg.latent_size),
                                          cfg.effective_lambda(),
                                          split_seed(cfg.seed, "curiosity"), cfg.stable_eps);
    st.mbuf = MemoryBuffer(static_cast<std::size_t>(cfg.good_buffer_size));
    st.rbuf = FailureBuffer(static_cast<std::size_t>(cfg.bad_buffer_size));
    st.normalizer.warmup_count =
        static_cast<double>(cfg.obs_norm_step) * static_cast<double>(cfg.num_env);
    st.aggregate_heatmap.assign(static_cast<std::size_t>(st.spec.n_cells()), 0);
    return st;
}

std::vector<EnvSlot> init_envs(const TrainerState& st, const RunConfig& cfg) {
    std::vector<EnvSlot> envs(static_cast<std::size_t>(cfg.num_env));
    for (int e = 0; e < cfg.num_env; ++e) {
        auto [state, obs] = reset(st.spec, split_seed(cfg.seed, "env", static_cast<std::uint64_t>(e)));
        envs[static_cast<std::size_t>(e)].state = std::move(state);
        envs[static_cast<std::size_t>(e)].obs = obs;
    }
    return envs;
}

void count_starts(TrainerState& st, const std::vector<EnvSlot>& envs) {
    for (const EnvSlot& slot : envs)
        st.aggregate_heatmap[static_cast<std::size_t>(slot.obs.hot)] += 1;
}

RewardConfig reward_config(const RunConfig& cfg) {
    RewardConfig r;
    r.ext_coef = cfg.ext_coef;
    r.int_coef = cfg.curiosity_disabled() ? 0.0 : cfg.int_coef;
    r.gamma_ext = cfg.gamma;
    r.gamma_int = cfg.int_gamma;
    r.gae_lambda = cfg.gae_lambda;
    r.int_clip = cfg.int_clip;
    return r;
}

PpoHyper ppo_hyper(const RunConfig& cfg) {
    PpoHyper hp;
    hp.clip_eps = cfg.ppo_eps;
    hp.epochs = cfg.epoch;
    hp.minibatches = cfg.mini_batch;
    hp.entropy_coef = cfg.entropy;
    hp.lr = cfg.learning_rate;
    hp.max_grad_norm = cfg.clip_grad_norm;
    hp.stable_eps = cfg.stable_eps;
    return hp;
}

int coverage_of(const std::vector<std::uint32_t>& heatmap) {
    return static_cast<int>(std::count_if(heatmap.begin(), heatmap.end(),
                                          [](std::uint32_t v) { return v > 0; }));
}

MetricsRow make_row(int update, const RunConfig& cfg, const TrainerState& st,
                    const Rollout& rollout, const std::vector<EpisodeRecord>& episodes,
                    double& last_mean_return, const PpoStats& stats, double pred_loss,
                    double refl_loss, double ae_loss) {
    MetricsRow row;
    row.update = update;
    row.env_steps = static_cast<std::int64_t>(update + 1) * cfg.num_env * cfg.num_step;
    if (!episodes.empty()) {
        double total = 0.0;
        for (const EpisodeRecord& rec : episodes) total += rec.ext_return;
        last_mean_return = total / static_cast<double>(episodes.size());
    }
    row.mean_ext_return = last_mean_return;
    double int_sum = 0.0;
    std::int64_t mem_steps = 0;
    for (std::size_t i = 0; i < rollout.size(); ++i) {
        int_sum += rollout.int_reward[i];
        if (rollout.source[i] == static_cast<std::uint8_t>(ActionSource::memory)) ++mem_steps;
    }
    row.mean_int_reward = int_sum / static_cast<double>(rollout.size());
    row.memory_action_frac =
        static_cast<double>(mem_steps) / static_cast<double>(rollout.size());
    row.cliff_falls_cum = st.fall_counter;
    row.coverage = coverage_of(st.aggregate_heatmap);
    row.pred_loss = pred_loss;
    row.refl_loss = refl_loss;
    row.ae_loss = ae_loss;
    row.policy_loss = stats.policy_loss;
    row.v_ext_loss = stats.v_ext_loss;
    row.v_int_loss = stats.v_int_loss;
    row.entropy = stats.entropy;
    return row;
}

} // namespace

TrainerState train(const RunConfig& cfg, const MetricsSink& metrics_sink,
                   const EpisodeSink& episode_sink) {
    TrainerState st = init_state(cfg);
    std::vector<EnvSlot> envs = init_envs(st, cfg);
    count_starts(st, envs);

    const bool memory_on = !cfg.memory_disabled();
    const bool curiosity_on = !cfg.curiosity_disabled();
    const RewardConfig rcfg = reward_config(cfg);
    const PpoHyper hp = ppo_hyper(cfg);

    Rng action_rng(split_seed(cfg.seed, "rollout"));
    double last_mean_return = 0.0;
    double pred_loss = 0.0;
    double refl_loss = 0.0;

    for (int update = 0; update < cfg.total_updates; ++update) {
        std::vector<EpisodeRecord> episodes;
        CollectInputs in;
        in.spec = &st.spec;
        in.policy = &st.policy;
        in.pred = memory_on ? &st.pred : nullptr;
        in.refl = memory_on ? &st.refl : nullptr;
        in.curiosity = curiosity_on ? &st.curiosity : nullptr;
        in.normalizer = &st.normalizer;
        in.mbuf = memory_on ? &st.mbuf : nullptr;
        in.rbuf = memory_on ? &st.rbuf : nullptr;
        in.n_steps = cfg.num_step;
        in.ensemble.kappa = cfg.confidence;
        in.ensemble.ensemble_env_count = cfg.num_env - cfg.ori_policy_env_num;
        in.ensemble.failure_window = cfg.failure_window;
        in.int_clip = cfg.int_clip;
        in.update_index = update;
        in.episode_counter = &st.episode_counter;
        in.fall_counter = &st.fall_counter;
        in.aggregate_heatmap = &st.aggregate_heatmap;
        in.episode_log = &episodes;

        Rollout rollout = collect_rollout(in, envs, action_rng);
        if (episode_sink)
            for (const EpisodeRecord& rec : episodes) episode_sink(rec);

        double ae_loss = 0.0;
        if (curiosity_on) {
            ae_loss = train_autoencoder(st.curiosity, rollout.next_obs, cfg.learning_rate,
                                        cfg.update_proportion, cfg.clip_grad_norm,
                                        split_seed(cfg.seed, "ae", static_cast<std::uint64_t>(update)))
                          .value_or(0.0);
        }

        GaeResult gae = compute_gae(rollout, rcfg);
        PpoStats stats = ppo_update(st.policy, rollout, gae, hp,
                                    split_seed(cfg.seed, "ppo", static_cast<std::uint64_t>(update)));

        if (memory_on && (update + 1) % cfg.exploit_update == 0) {
            pred_loss = train_prediction(
                            st.pred, st.mbuf, cfg.exploit_steps, cfg.good_buffer_batch_size,
                            cfg.exploit_lr, cfg.clip_grad_norm,
                            split_seed(cfg.seed, "pred_train", static_cast<std::uint64_t>(update)))
                            .value_or(pred_loss);
            refl_loss = train_reflection(
                            st.refl, st.mbuf, st.rbuf, cfg.exploit_steps,
                            cfg.good_buffer_batch_size, cfg.exploit_lr, cfg.clip_grad_norm,
                            static_cast<std::size_t>(cfg.bad_buffer_batch_size),
                            split_seed(cfg.seed, "refl_train", static_cast<std::uint64_t>(update)))
                            .value_or(refl_loss);
        }

        if (metrics_sink)
            metrics_sink(make_row(update, cfg, st, rollout, episodes, last_mean_return, stats,
                                  pred_loss, refl_loss, ae_loss));
        st.updates_done = update + 1;
    }
    st.action_rng_state = action_rng.state();
    return st;
}

TrainerState train_plain(const RunConfig& cfg, const MetricsSink& metrics_sink,
                         const EpisodeSink& episode_sink) {
    TrainerState st = init_state(cfg);
    std::vector<EnvSlot> envs = init_envs(st, cfg);
    count_starts(st, envs);

    const RewardConfig rcfg = reward_config(cfg);
    const PpoHyper hp = ppo_hyper(cfg);

    Rng action_rng(split_seed(cfg.seed, "rollout"));
    double last_mean_return = 0.0;

    for (int update = 0; update < cfg.total_updates; ++update) {
        std::vector<EpisodeRecord> episodes;
        CollectInputs in;
        in.spec = &st.spec;
        in.policy = &st.policy;
        in.n_steps = cfg.num_step;
        in.ensemble.kappa = cfg.confidence;
        in.ensemble.ensemble_env_count = cfg.num_env - cfg.ori_policy_env_num;
        in.ensemble.failure_window = cfg.failure_window;
        in.update_index = update;
        in.episode_counter = &st.episode_counter;
        in.fall_counter = &st.fall_counter;
        in.aggregate_heatmap = &st.aggregate_heatmap;
        in.episode_log = &episodes;

        Rollout rollout = collect_rollout(in, envs, action_rng);
        if (episode_sink)
            for (const EpisodeRecord& rec : episodes) episode_sink(rec);

        GaeResult gae = compute_gae(rollout, rcfg);
        PpoStats stats = ppo_update(st.policy, rollout, gae, hp,
                                    split_seed(cfg.seed, "ppo", static_cast<std::uint64_t>(update)));

        if (metrics_sink)
            metrics_sink(make_row(update, cfg, st, rollout, episodes, last_mean_return, stats,
                                  0.0, 0.0, 0.0));
        st.updates_done = update + 1;
    }
    st.action_rng_state = action_rng.state();
    return st;
}

} // namespace ada

#include "ada/agent.hpp"

#include "ada/error.hpp"
#include "ada/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ada {

namespace {

InputView obs_view(const Observation& obs) {
    return InputView::onehot(static_cast<std::size_t>(obs.dim),
                             static_cast<std::size_t>(obs.hot));
}

constexpr double kLogClamp = 1e-12;

} // namespace

PolicyNet make_policy_net(std::size_t obs_dim, std::size_t n_actions, std::size_t hidden,
                          std::uint64_t seed, double adam_eps) {
    PolicyNet p;
    p.trunk = init_net({obs_dim, hidden, hidden}, {Activation::relu, Activation::relu},
                       split_seed(seed, "trunk"));
    p.pi_head = init_net({hidden, n_actions}, {Activation::softmax}, split_seed(seed, "pi"));
    p.v_ext_head = init_net({hidden, 1}, {Activation::identity}, split_seed(seed, "v_ext"));
    p.v_int_head = init_net({hidden, 1}, {Activation::identity}, split_seed(seed, "v_int"));
    p.adam_trunk = init_adam(p.trunk, 0.9, 0.999, adam_eps);
    p.adam_pi = init_adam(p.pi_head, 0.9, 0.999, adam_eps);
    p.adam_v_ext = init_adam(p.v_ext_head, 0.9, 0.999, adam_eps);
    p.adam_v_int = init_adam(p.v_int_head, 0.9, 0.999, adam_eps);
    return p;
}

PolicyEval policy_eval(const PolicyNet& policy, const InputView& input) {
    ForwardCache trunk_cache;
    const std::vector<double>& h = forward(policy.trunk, input, trunk_cache);
    InputView hv = InputView::of(std::span<const double>(h));
    PolicyEval out;
    out.dist = forward(policy.pi_head, hv);
    out.v_ext = forward(policy.v_ext_head, hv)[0];
    out.v_int = forward(policy.v_int_head, hv)[0];
    return out;
}

int categorical_sample(const std::vector<double>& probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

ActionChoice arbitrate_action(const std::vector<double>& base_dist, const PredictionNet* pred,
                              const ReflectionNet* refl, const Observation& obs, double kappa,
                              bool env_is_ensemble, Rng& rng) {
    if (env_is_ensemble && pred && refl && pred->train_steps > 0) {
        auto [predicted, dist] = predict_action(*pred, obs);
        (void)dist;
        if (confidence(*refl, obs, predicted) >= kappa)
            return ActionChoice{predicted, ActionSource::memory};
    }
    return ActionChoice{categorical_sample(base_dist, rng), ActionSource::base};
}

ActionChoice ensemble_action(const PolicyNet& policy, const PredictionNet* pred,
                             const ReflectionNet* refl, const Observation& obs,
                             const EnsembleConfig& cfg, bool env_is_ensemble, Rng& rng) {
    PolicyEval eval = policy_eval(policy, obs_view(obs));
    return arbitrate_action(eval.dist, pred, refl, obs, cfg.kappa, env_is_ensemble, rng);
}

Rollout collect_rollout(const CollectInputs& in, std::vector<EnvSlot>& envs, Rng& action_rng) {
    const int n_envs = static_cast<int>(envs.size());
    const int n_steps = in.n_steps;
    Rollout r;
    r.n_envs = n_envs;
    r.n_steps = n_steps;
    const std::size_t total = static_cast<std::size_t>(n_envs) * n_steps;
    r.obs.resize(total);
    r.action.resize(total);
    r.source.resize(total);
    r.logp.resize(total);
    r.ext_reward.resize(total);
    r.int_reward.assign(total, 0.0);
    r.done.assign(total, 0);
    r.v_ext.resize(total);
    r.v_int.resize(total);
    r.next_obs.resize(total);
    r.boot_v_ext.resize(n_envs);
    r.boot_v_int.resize(n_envs);

    const int first_ensemble_env = n_envs - in.ensemble.ensemble_env_count;

    for (int t = 0; t < n_steps; ++t) {
        for (int e = 0; e < n_envs; ++e) {
            EnvSlot& slot = envs[static_cast<std::size_t>(e)];
            const std::size_t idx = r.idx(t, e);
            PolicyEval eval = policy_eval(*in.policy, obs_view(slot.obs));
            bool is_ensemble = e >= first_ensemble_env;
            ActionChoice choice = arbitrate_action(eval.dist, in.pred, in.refl, slot.obs,
                                                   in.ensemble.kappa, is_ensemble, action_rng);

            StepResult res = step(slot.state, *in.spec, static_cast<GridAction>(choice.action));

            r.obs[idx] = slot.obs;
            r.action[idx] = choice.action;
            r.source[idx] = static_cast<std::uint8_t>(choice.source);
            r.logp[idx] =
                std::log(std::max(eval.dist[static_cast<std::size_t>(choice.action)], kLogClamp));
            r.ext_reward[idx] = res.reward;
            r.v_ext[idx] = eval.v_ext;
            r.v_int[idx] = eval.v_int;
            r.next_obs[idx] = res.obs;

            if (in.curiosity) {
                double raw = intrinsic_reward(*in.curiosity, res.obs).r_i;
                double r_hat = normalize_intrinsic(*in.normalizer, raw);
                if (in.int_clip > 0.0) r_hat = std::min(r_hat, in.int_clip);
                r.int_reward[idx] = r_hat;
            }
            if (in.aggregate_heatmap)
                (*in.aggregate_heatmap)[static_cast<std::size_t>(res.obs.hot)] += 1;

            slot.traj.push_back(TrajStep{slot.obs, choice.action, res.reward});
            slot.traj_source.push_back(static_cast<std::uint8_t>(choice.source));
            slot.episode_return += res.reward;

            if (res.state.done) {
                r.done[idx] = 1;
                TerminalKind kind = res.fell ? TerminalKind::death
                                  : res.terminated ? TerminalKind::goal
                                                   : TerminalKind::truncated;
                if (res.fell && in.fall_counter) (*in.fall_counter) += 1;
                if (in.episode_log) {
                    EpisodeRecord rec;
                    rec.episode_index = in.episode_counter ? (*in.episode_counter) : 0;
                    rec.update = in.update_index;
                    rec.env = e;
                    rec.length = res.state.steps_taken;
                    rec.ext_return = slot.episode_return;
                    rec.kind = kind;
                    rec.reached_goal = (kind == TerminalKind::goal);
                    in.episode_log->push_back(rec);
                }
                if (in.episode_counter) (*in.episode_counter) += 1;

                if (in.mbuf && kind != TerminalKind::death) {
                    Trajectory done_traj = finalize_trajectory(slot.traj, kind);
                    if (done_traj.effective_length > 0) in.mbuf->offer(done_traj);
                }
                if (in.rbuf && kind == TerminalKind::death) {
                    std::size_t n = slot.traj.size();
                    std::size_t window = std::min<std::size_t>(
                        n, static_cast<std::size_t>(in.ensemble.failure_window));
                    for (std::size_t i = n - window; i < n; ++i) {
                        if (slot.traj_source[i] ==
                            static_cast<std::uint8_t>(ActionSource::memory)) {
                            in.rbuf->push(FailurePair{slot.traj[i].obs, slot.traj[i].action});
                        }
                    }
                }

                auto [fresh_state, fresh_obs] = reset(*in.spec, 0);
                slot.state = std::move(fresh_state);
                slot.obs = fresh_obs;
                slot.traj.clear();
                slot.traj_source.clear();
                slot.episode_return = 0.0;
                if (in.aggregate_heatmap)
                    (*in.aggregate_heatmap)[static_cast<std::size_t>(fresh_obs.hot)] += 1;
            } else {
                slot.state = std::move(res.state);
                slot.obs = res.obs;
            }
        }
    }

    for (int e = 0; e < n_envs; ++e) {
        PolicyEval eval = policy_eval(*in.policy, obs_view(envs[static_cast<std::size_t>(e)].obs));
        r.boot_v_ext[static_cast<std::size_t>(e)] = eval.v_ext;
        r.boot_v_int[static_cast<std::size_t>(e)] = eval.v_int;
    }
    return r;
}

GaeResult compute_gae(const Rollout& rollout, const RewardConfig& cfg) {
    const int T = rollout.n_steps;
    const int E = rollout.n_envs;
    GaeResult g;
    const std::size_t total = rollout.size();
    g.advantages.resize(total);
    g.adv_ext.resize(total);
    g.adv_int.resize(total);
    g.ext_returns.resize(total);
    g.int_returns.resize(total);

    for (int e = 0; e < E; ++e) {
        double a_ext = 0.0;
        double a_int = 0.0;
        for (int t = T - 1; t >= 0; --t) {
            const std::size_t idx = rollout.idx(t, e);
            const double nonterm = rollout.done[idx] ? 0.0 : 1.0;
            const double v_ext_next = (t == T - 1) ? rollout.boot_v_ext[static_cast<std::size_t>(e)]
                                                   : rollout.v_ext[rollout.idx(t + 1, e)];
            const double v_int_next = (t == T - 1) ? rollout.boot_v_int[static_cast<std::size_t>(e)]
                                                   : rollout.v_int[rollout.idx(t + 1, e)];

            // extrinsic stream is episodic
            double delta_ext = rollout.ext_reward[idx] +
                               cfg.gamma_ext * nonterm * v_ext_next - rollout.v_ext[idx];
            a_ext = delta_ext + cfg.gamma_ext * cfg.gae_lambda * nonterm * a_ext;
            g.adv_ext[idx] = a_ext;

            // intrinsic stream runs through episode boundaries
            double delta_int = rollout.int_reward[idx] +
                               cfg.gamma_int * v_int_next - rollout.v_int[idx];
            a_int = delta_int + cfg.gamma_int * cfg.gae_lambda * a_int;
            g.adv_int[idx] = a_int;

            g.ext_returns[idx] = a_ext + rollout.v_ext[idx];
            g.int_returns[idx] = a_int + rollout.v_int[idx];
            g.advantages[idx] = cfg.ext_coef * a_ext + cfg.int_coef * a_int;
        }
    }
    return g;
}

void normalize_advantages(std::vector<double>& adv, double stable_eps) {
    if (adv.empty()) return;
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= static_cast<double>(adv.size());
    double denom = std::max(std::sqrt(var), stable_eps);
    for (double& a : adv) a = (a - mean) / denom;
}

PpoStats ppo_update(PolicyNet& policy, const Rollout& rollout, const GaeResult& gae,
                    const PpoHyper& hp, std::uint64_t rng_seed) {
    const std::size_t total = rollout.size();
    if (total == 0) throw validation_error("ppo_update: empty rollout");

    // normalize combined advantages over the whole batch
    std::vector<double> adv(gae.advantages);
    normalize_advantages(adv, hp.stable_eps);

    Grads g_trunk = Grads::zeros_like(policy.trunk);
    Grads g_pi = Grads::zeros_like(policy.pi_head);
    Grads g_ve = Grads::zeros_like(policy.v_ext_head);
    Grads g_vi = Grads::zeros_like(policy.v_int_head);

    PpoStats stats;
    std::int64_t stat_batches = 0;
    std::int64_t clip_hits = 0;
    std::int64_t clip_total = 0;

    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        Rng shuffle_rng(split_seed(rng_seed, "ppo_epoch", static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = total; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(shuffle_rng.below(i));
            std::swap(order[i - 1], order[j]);
        }
        for (int mb = 0; mb < hp.minibatches; ++mb) {
            std::size_t begin = total * static_cast<std::size_t>(mb) /
                                static_cast<std::size_t>(hp.minibatches);
            std::size_t end = total * static_cast<std::size_t>(mb + 1) /
                              static_cast<std::size_t>(hp.minibatches);
            if (begin == end) continue;
            const double inv_mb = 1.0 / static_cast<double>(end - begin);

            g_trunk.zero();
            g_pi.zero();
            g_ve.zero();
            g_vi.zero();
            double mb_policy_loss = 0.0, mb_ventl = 0.0, mb_vintl = 0.0, mb_entropy = 0.0;

            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t idx = order[k];
                ForwardCache trunk_cache, pi_cache, ve_cache, vi_cache;
                const std::vector<double>& h =
                    forward(policy.trunk, obs_view(rollout.obs[idx]), trunk_cache);
                InputView hv = InputView::of(std::span<const double>(h));
                const std::vector<double>& dist = forward(policy.pi_head, hv, pi_cache);
                double v_e = forward(policy.v_ext_head, hv, ve_cache)[0];
                double v_i = forward(policy.v_int_head, hv, vi_cache)[0];

                const int a = rollout.action[idx];
                // Memory-sourced actions were not drawn from the base policy;
                // their importance ratios are meaningless, so they feed the
                // value heads only.
                const bool on_policy =
                    rollout.source[idx] == static_cast<std::uint8_t>(ActionSource::base);
                std::vector<double> d_dist(dist.size(), 0.0);
                if (on_policy) {
                    const double p_new = std::max(dist[static_cast<std::size_t>(a)], kLogClamp);
                    const double p_old = std::exp(rollout.logp[idx]);
                    const double ratio = p_new / p_old;
                    const double advantage = adv[idx];

                    const double unclipped = ratio * advantage;
                    const double clipped =
                        std::clamp(ratio, 1.0 - hp.clip_eps, 1.0 + hp.clip_eps) * advantage;
                    mb_policy_loss += -std::min(unclipped, clipped);
                    if (std::abs(ratio - 1.0) > hp.clip_eps) ++clip_hits;
                    ++clip_total;

                    double entropy_term = 0.0;
                    for (std::size_t ai = 0; ai < dist.size(); ++ai) {
                        double logp = std::log(std::max(dist[ai], kLogClamp));
                        entropy_term -= dist[ai] * logp;
                        // d(-entropy_coef * H)/d p_i
                        d_dist[ai] += hp.entropy_coef * (logp + 1.0) * inv_mb;
                    }
                    mb_entropy += entropy_term;
                    if (unclipped <= clipped) {
                        // gradient flows through the unclipped surrogate
                        d_dist[static_cast<std::size_t>(a)] += -advantage / p_old * inv_mb;
                    }
                }

                auto g_h_pi = backward(policy.pi_head, pi_cache, d_dist, GradAt::output,
                                       g_pi, true);

                double d_ve = hp.value_coef * (v_e - gae.ext_returns[idx]) * inv_mb;
                double d_vi = hp.value_coef * (v_i - gae.int_returns[idx]) * inv_mb;
                mb_ventl += 0.5 * (v_e - gae.ext_returns[idx]) * (v_e - gae.ext_returns[idx]);
                mb_vintl += 0.5 * (v_i - gae.int_returns[idx]) * (v_i - gae.int_returns[idx]);
                std::vector<double> dv{d_ve};
                auto g_h_ve = backward(policy.v_ext_head, ve_cache, dv, GradAt::output,
                                       g_ve, true);
                dv[0] = d_vi;
                auto g_h_vi = backward(policy.v_int_head, vi_cache, dv, GradAt::output,
                                       g_vi, true);

                std::vector<double> g_h = std::move(*g_h_pi);
                kern::axpy(1.0, g_h_ve->data(), g_h.data(), g_h.size());
                kern::axpy(1.0, g_h_vi->data(), g_h.data(), g_h.size());
                backward(policy.trunk, trunk_cache, g_h, GradAt::output, g_trunk, false);
            }

            const double count = static_cast<double>(end - begin);
            if (!std::isfinite(mb_policy_loss) || !std::isfinite(mb_ventl) ||
                !std::isfinite(mb_vintl))
                throw numerical_error("ppo_update: non-finite loss in epoch " +
                                      std::to_string(epoch) + ", minibatch " + std::to_string(mb));
            stats.policy_loss += mb_policy_loss / count;
            stats.v_ext_loss += mb_ventl / count;
            stats.v_int_loss += mb_vintl / count;
            stats.entropy += mb_entropy / count;
            ++stat_batches;

            // joint clip across all four parameter groups
            double sq = 0.0;
            for (const Grads* g : {&g_trunk, &g_pi, &g_ve, &g_vi}) {
                double n = grad_norm(*g);
                sq += n * n;
            }
            double norm = std::sqrt(sq);
            if (norm > hp.max_grad_norm) {
                double scale = hp.max_grad_norm / norm;
                g_trunk.scale(scale);
                g_pi.scale(scale);
                g_ve.scale(scale);
                g_vi.scale(scale);
            }
            adam_step(policy.trunk, g_trunk, policy.adam_trunk, hp.lr);
            adam_step(policy.pi_head, g_pi, policy.adam_pi, hp.lr);
            adam_step(policy.v_ext_head, g_ve, policy.adam_v_ext, hp.lr);
            adam_step(policy.v_int_head, g_vi, policy.adam_v_int, hp.lr);
        }
    }
    if (stat_batches > 0) {
        stats.policy_loss /= static_cast<double>(stat_batches);
        stats.v_ext_loss /= static_cast<double>(stat_batches);
        stats.v_int_loss /= static_cast<double>(stat_batches);
        stats.entropy /= static_cast<double>(stat_batches);
    }
    stats.clip_fraction =
        clip_total > 0 ? static_cast<double>(clip_hits) / static_cast<double>(clip_total) : 0.0;
    return stats;
}

void q_learning_step(std::vector<double>& q_table, int n_actions, const QTransition& t,
                     double alpha, double gamma) {
    double bootstrap = 0.0;
    if (!t.terminal) {
        const double* row = q_table.data() + static_cast<std::size_t>(t.next_state) * n_actions;
        bootstrap = *std::max_element(row, row + n_actions);
    }
    double& q = q_table[static_cast<std::size_t>(t.state) * n_actions + t.action];
    q += alpha * (t.reward + gamma * bootstrap - q);
}

int epsilon_greedy(const std::vector<double>& q_table, int n_actions, int state, double epsilon,
                   Rng& rng) {
    if (rng.uniform() < epsilon) return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_actions)));
    const double* row = q_table.data() + static_cast<std::size_t>(state) * n_actions;
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

} // namespace ada

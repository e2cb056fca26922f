#include "ada/harness.hpp"

#include "ada/error.hpp"
#include "ada/heatmap.hpp"
#include "ada/metrics.hpp"
#include "ada/rng.hpp"
#include "ada/util.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

namespace ada {

namespace {

std::string metadata_comment(const RunConfig& cfg) {
    std::string meta;
    meta += "# config_hash=" + config_hash(cfg) + "\n";
    meta += "# seed=" + fmt_int(static_cast<std::int64_t>(cfg.seed)) + "\n";
    meta += "# version=" + std::string(kCodeVersion) + "\n";
    return meta;
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& status,
                    double wall_time_s) {
    std::string m;
    m += "status = " + status + "\n";
    m += "seed = " + fmt_int(static_cast<std::int64_t>(cfg.seed)) + "\n";
    m += "config_hash = " + config_hash(cfg) + "\n";
    m += "version = " + std::string(kCodeVersion) + "\n";
    m += "wall_time_s = " + fmt_double(wall_time_s) + "\n";
    m += "[config]\n";
    m += serialize_config(cfg);
    write_text_file(path, m);
}

} // namespace

RunPaths run_experiment(const RunConfig& cfg, const std::string& out_dir, bool plain_learner) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    RunPaths paths;
    paths.metrics_csv = (fs::path(out_dir) / "metrics.csv").string();
    paths.episodes_csv = (fs::path(out_dir) / "episodes.csv").string();
    paths.checkpoint = (fs::path(out_dir) / "checkpoint.bin").string();
    paths.manifest = (fs::path(out_dir) / "run.manifest").string();
    paths.heatmap_pgm = (fs::path(out_dir) / "heatmap.pgm").string();

    const std::string meta = metadata_comment(cfg);
    CsvWriter metrics(paths.metrics_csv, meta, kMetricsHeader);
    CsvWriter episodes(paths.episodes_csv, meta, kEpisodesHeader);

    auto t0 = std::chrono::steady_clock::now();
    try {
        MetricsSink msink = [&](const MetricsRow& row) { metrics.write_row(metrics_row_csv(row)); };
        EpisodeSink esink = [&](const EpisodeRecord& rec) {
            episodes.write_row(episode_record_csv(rec));
        };
        TrainerState state = plain_learner ? train_plain(cfg, msink, esink)
                                           : train(cfg, msink, esink);
        save_checkpoint(paths.checkpoint, cfg, state);
        export_heatmap(state.aggregate_heatmap, state.spec.width, state.spec.height,
                       paths.heatmap_pgm, HeatmapFormat::pgm);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(paths.manifest, cfg, "ok", secs);
    } catch (...) {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(paths.manifest, cfg, "failed", secs);
        throw;
    }
    return paths;
}

VerifyRow verify_theorem1_instance(std::uint64_t seed, const VerifyOptions& opt,
                                   std::int64_t* resamples) {
    std::uint64_t attempt_seed = seed;
    for (int attempt = 0;; ++attempt) {
        Rng draw(split_seed(attempt_seed, "verify_t1"));
        int n_states = opt.min_states +
                       static_cast<int>(draw.below(static_cast<std::uint64_t>(
                           opt.max_states - opt.min_states + 1)));
        int n_actions = opt.min_actions +
                        static_cast<int>(draw.below(static_cast<std::uint64_t>(
                            opt.max_actions - opt.min_actions + 1)));
        double gamma = draw.uniform(opt.gamma_lo, opt.gamma_hi);
        TabularMDP mdp = random_mdp(split_seed(attempt_seed, "verify_t1_mdp"), n_states,
                                    n_actions, gamma);
        try {
            double vi_tol = 0.1 * opt.theorem1_tol * (1.0 - gamma) / std::max(gamma, 0.5);
            SolveResult base = value_iteration(mdp, vi_tol);
            double c_bound = assumption1_bound(mdp, base);
            std::vector<double> bonus(mdp.reward.size());
            for (double& b : bonus) b = draw.uniform() * c_bound;
            Theorem1Result res = check_theorem1(mdp, bonus, opt.theorem1_tol);
            VerifyRow row;
            row.seed = seed;
            row.theorem = 1;
            row.holds = res.holds;
            row.min_gap = res.min_margin;
            row.c_bound = c_bound;
            return row;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_gap || attempt >= 64) throw;
            if (resamples) (*resamples) += 1;
            attempt_seed = split_seed(attempt_seed, "verify_t1_resample");
        }
    }
}

VerifyRow verify_theorem2_instance(std::uint64_t seed, const VerifyOptions& opt) {
    Rng draw(split_seed(seed, "verify_t2"));
    int n_states = opt.min_states +
                   static_cast<int>(draw.below(static_cast<std::uint64_t>(
                       opt.max_states - opt.min_states + 1)));
    int n_actions = opt.min_actions +
                    static_cast<int>(draw.below(static_cast<std::uint64_t>(
                        opt.max_actions - opt.min_actions + 1)));
    double gamma = draw.uniform(opt.gamma_lo, opt.gamma_hi);
    TabularMDP mdp = random_mdp(split_seed(seed, "verify_t2_mdp"), n_states, n_actions, gamma);

    StochasticPolicy pi;
    pi.probs.resize(static_cast<std::size_t>(n_states) * n_actions);
    for (int s = 0; s < n_states; ++s) {
        double total = 0.0;
        for (int a = 0; a < n_actions; ++a) {
            double p = draw.uniform_pos();
            pi.probs[static_cast<std::size_t>(s) * n_actions + a] = p;
            total += p;
        }
        for (int a = 0; a < n_actions; ++a)
            pi.probs[static_cast<std::size_t>(s) * n_actions + a] /= total;
    }

    // confidence table satisfying the dominance precondition at a* under Q^pi
    double pe_tol = 0.1 * opt.theorem2_tol * (1.0 - gamma) / std::max(gamma, 0.5);
    std::vector<double> v_pi = policy_evaluation(mdp, pi, pe_tol);
    std::vector<double> q_pi = policy_q(mdp, v_pi);
    ConfidenceTable conf;
    conf.values.resize(static_cast<std::size_t>(n_states) * n_actions);
    for (int s = 0; s < n_states; ++s) {
        int best = greedy_action(q_pi, s, n_actions);
        for (int a = 0; a < n_actions; ++a) {
            double c = (a == best) ? draw.uniform(0.6, 1.0) : draw.uniform(0.0, 0.59);
            conf.values[static_cast<std::size_t>(s) * n_actions + a] = c;
        }
    }

    Theorem2Result res = check_theorem2(mdp, pi, conf, opt.kappa, opt.theorem2_tol);
    VerifyRow row;
    row.seed = seed;
    row.theorem = 2;
    row.holds = res.holds;
    row.min_gap = res.min_gap;
    return row;
}

VerifySummary verify_theorems(const VerifyOptions& opt, const std::string& csv_path) {
    VerifySummary summary;
    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path, std::ios::binary | std::ios::trunc);
        if (!csv) throw io_error("cannot open for writing: " + csv_path);
        csv << "seed,theorem,holds,min_gap,C\n";
    }
    auto emit = [&](const VerifyRow& row) {
        summary.instances += 1;
        if (!row.holds) summary.failures += 1;
        if (csv.is_open()) {
            csv << fmt_int(static_cast<std::int64_t>(row.seed)) << ',' << row.theorem << ','
                << (row.holds ? 1 : 0) << ',' << fmt_double(row.min_gap) << ','
                << (row.theorem == 1 ? fmt_double(row.c_bound) : std::string()) << '\n';
        }
    };
    for (std::uint64_t seed = opt.seed_begin; seed < opt.seed_end; ++seed)
        emit(verify_theorem1_instance(seed, opt, &summary.resampled));
    for (std::uint64_t seed = opt.seed_begin; seed < opt.seed_end; ++seed)
        emit(verify_theorem2_instance(seed, opt));
    if (csv.is_open()) {
        csv << "# summary instances=" << summary.instances << " failures=" << summary.failures
            << " resampled=" << summary.resampled << '\n';
    }
    return summary;
}

std::vector<ReplayEpisode> replay_checkpoint(const LoadedCheckpoint& ckpt, int episodes) {
    const GridSpec& spec = ckpt.state.spec;
    if (static_cast<int>(ckpt.state.policy.obs_dim()) != spec.n_cells())
        throw compatibility_error("checkpoint policy does not match environment dimensions");

    std::vector<ReplayEpisode> out;
    const bool memory_on = !ckpt.cfg.memory_disabled() && ckpt.state.pred.train_steps > 0;
    for (int ep = 0; ep < episodes; ++ep) {
        ReplayEpisode record;
        auto [state, obs] = reset(spec, 0);
        while (!state.done) {
            PolicyEval eval = policy_eval(ckpt.state.policy,
                                          InputView::onehot(static_cast<std::size_t>(obs.dim),
                                                            static_cast<std::size_t>(obs.hot)));
            int action = 0;
            bool from_memory = false;
            if (memory_on) {
                auto [pred_action, dist] = predict_action(ckpt.state.pred, obs);
                (void)dist;
                if (confidence(ckpt.state.refl, obs, pred_action) >= ckpt.cfg.confidence) {
                    action = pred_action;
                    from_memory = true;
                }
            }
            if (!from_memory) {
                for (std::size_t a = 1; a < eval.dist.size(); ++a)
                    if (eval.dist[a] > eval.dist[static_cast<std::size_t>(action)])
                        action = static_cast<int>(a);
            }
            StepResult res = step(state, spec, static_cast<GridAction>(action));
            record.steps.push_back(ReplayStep{state.steps_taken, obs.hot, action, res.reward,
                                              from_memory});
            record.ext_return += res.reward;
            if (res.fell) record.fell = true;
            if (res.terminated && !res.fell) record.reached_goal = true;
            state = res.state;
            obs = res.obs;
        }
        out.push_back(std::move(record));
    }
    return out;
}

std::string render_grid_ascii(const GridSpec& spec, Cell agent) {
    std::string out;
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            Cell cell{r, c};
            char ch = '.';
            if (spec.is_wall(cell)) ch = '#';
            if (spec.is_cliff(cell)) ch = '^';
            if (spec.is_goal(cell)) ch = 'G';
            if (cell == spec.start) ch = 'S';
            if (cell == agent) ch = '@';
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace ada

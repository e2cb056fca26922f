// adamemento: memory-reflection RL experiments on gridworlds, with a tabular
// verifier for the shaping and ensemble guarantees the agent relies on.

#include "ada/agent.hpp"
#include "ada/checkpoint.hpp"
#include "ada/config.hpp"
#include "ada/error.hpp"
#include "ada/harness.hpp"
#include "ada/heatmap.hpp"
#include "ada/kernels.hpp"
#include "ada/memrefl.hpp"
#include "ada/metrics.hpp"
#include "ada/util.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace ada;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::optional<std::string> env_name;
    bool no_memory = false;
    bool no_curiosity = false;
    bool no_f_discriminator = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "flat key=value config file");
    cmd->add_option("--set", opts.sets, "override, e.g. --set Confidence=0.9 (repeatable)");
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--env", opts.env_name, "environment name");
    cmd->add_flag("--no-memory", opts.no_memory, "disable the memory-reflection pathway");
    cmd->add_flag("--no-curiosity", opts.no_curiosity, "disable intrinsic rewards");
    cmd->add_flag("--no-f-discriminator", opts.no_f_discriminator,
                  "drop the latent sparsity term (lambda = 0)");
}

RunConfig build_config(const CommonOpts& opts) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const std::string& kv : opts.sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("--set expects key=value, got '" + kv + "'");
        overrides.emplace_back(std::string(trim(kv.substr(0, eq))),
                               std::string(trim(kv.substr(eq + 1))));
    }
    if (opts.env_name) overrides.emplace_back("env.name", *opts.env_name);
    if (opts.seed) overrides.emplace_back("seed", fmt_int(static_cast<std::int64_t>(*opts.seed)));
    if (opts.no_memory) overrides.emplace_back("disable_memory", "true");
    if (opts.no_curiosity) overrides.emplace_back("disable_curiosity", "true");
    if (opts.no_f_discriminator) overrides.emplace_back("disable_f_discriminator", "true");
    return parse_config(opts.config_path, overrides);
}

int cmd_train(const CommonOpts& opts, bool plain) {
    RunConfig cfg = build_config(opts);
    RunPaths paths = run_experiment(cfg, opts.out_dir, plain);
    std::cout << "metrics: " << paths.metrics_csv << "\n"
              << "episodes: " << paths.episodes_csv << "\n"
              << "checkpoint: " << paths.checkpoint << "\n"
              << "heatmap: " << paths.heatmap_pgm << "\n";
    return 0;
}

int cmd_verify(const VerifyOptions& opt, const std::string& out_csv) {
    VerifySummary summary = verify_theorems(opt, out_csv);
    std::cout << "instances=" << summary.instances << " failures=" << summary.failures
              << " resampled=" << summary.resampled << "\n";
    if (!out_csv.empty()) std::cout << "report: " << out_csv << "\n";
    return summary.failures == 0 ? 0 : 3;
}

int cmd_replay(const std::string& ckpt_path, int episodes, const std::string& out_csv,
               bool quiet) {
    LoadedCheckpoint ckpt = load_checkpoint(ckpt_path);
    std::vector<ReplayEpisode> eps = replay_checkpoint(ckpt, episodes);

    std::ostringstream csv;
    csv << "step,state,action,reward,source\n";
    for (const ReplayEpisode& ep : eps) {
        for (const ReplayStep& s : ep.steps) {
            csv << s.step << ',' << s.state_index << ',' << action_name(static_cast<GridAction>(s.action))
                << ',' << fmt_double(s.reward) << ',' << (s.from_memory ? "memory" : "base")
                << '\n';
        }
    }
    if (!out_csv.empty()) write_text_file(out_csv, csv.str());

    if (!quiet) {
        const GridSpec& spec = ckpt.state.spec;
        for (std::size_t i = 0; i < eps.size(); ++i) {
            std::cout << "episode " << i << " return=" << fmt_double(eps[i].ext_return)
                      << (eps[i].reached_goal ? " goal" : "") << (eps[i].fell ? " fell" : "")
                      << "\n";
            for (const ReplayStep& s : eps[i].steps) {
                std::cout << render_grid_ascii(spec, spec.cell_at(s.state_index)) << "\n";
            }
        }
    }
    return 0;
}

int cmd_novelty_map(const std::string& ckpt_path, const std::string& out_dir) {
    LoadedCheckpoint ckpt = load_checkpoint(ckpt_path);
    const GridSpec& spec = ckpt.state.spec;
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::ostringstream csv;
    csv << "row,col,r_i,recon_err,sparsity\n";
    std::vector<std::uint32_t> scaled(static_cast<std::size_t>(spec.n_cells()), 0);
    std::vector<double> raw(static_cast<std::size_t>(spec.n_cells()), 0.0);
    double max_ri = 0.0;
    for (int idx = 0; idx < spec.n_cells(); ++idx) {
        Cell cell = spec.cell_at(idx);
        IntrinsicReward ir = intrinsic_reward(ckpt.state.curiosity,
                                              encode_observation(spec, cell));
        raw[static_cast<std::size_t>(idx)] = ir.r_i;
        max_ri = std::max(max_ri, ir.r_i);
        csv << cell.row << ',' << cell.col << ',' << fmt_double(ir.r_i) << ','
            << fmt_double(ir.recon_err) << ',' << fmt_double(ir.sparsity) << '\n';
    }
    for (int idx = 0; idx < spec.n_cells(); ++idx)
        scaled[static_cast<std::size_t>(idx)] = static_cast<std::uint32_t>(
            max_ri > 0.0 ? raw[static_cast<std::size_t>(idx)] / max_ri * 1000000.0 : 0.0);

    std::string csv_path = (fs::path(out_dir) / "novelty.csv").string();
    std::string pgm_path = (fs::path(out_dir) / "novelty.pgm").string();
    write_text_file(csv_path, csv.str());
    export_heatmap(scaled, spec.width, spec.height, pgm_path, HeatmapFormat::pgm);
    std::cout << "novelty map: " << csv_path << ", " << pgm_path << "\n";
    return 0;
}

int cmd_inspect_confidence(const std::string& ckpt_path, const std::string& out_csv) {
    LoadedCheckpoint ckpt = load_checkpoint(ckpt_path);
    const GridSpec& spec = ckpt.state.spec;
    std::ostringstream csv;
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            if (c) csv << ',';
            Cell cell{r, c};
            if (spec.is_wall(cell)) {
                csv << "";
                continue;
            }
            Observation obs = encode_observation(spec, cell);
            double best = 0.0;
            for (int a = 0; a < kNumActions; ++a)
                best = std::max(best, confidence(ckpt.state.refl, obs, a));
            csv << fmt_double(best);
        }
        csv << '\n';
    }
    write_text_file(out_csv, csv.str());
    std::cout << "confidence grid: " << out_csv << "\n";
    return 0;
}

int cmd_dump_memory(const std::string& ckpt_path, const std::string& out_csv) {
    LoadedCheckpoint ckpt = load_checkpoint(ckpt_path);
    std::ostringstream csv;
    csv << "episode_id,step,state_index,action,reward\n";
    const auto& entries = ckpt.state.mbuf.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t s = 0; s < entries[i].steps.size(); ++s) {
            const TrajStep& st = entries[i].steps[s];
            csv << i << ',' << s << ',' << st.obs.hot << ','
                << action_name(static_cast<GridAction>(st.action)) << ','
                << fmt_double(st.reward) << '\n';
        }
    }
    write_text_file(out_csv, csv.str());
    std::cout << "memory dump: " << out_csv << " (" << entries.size() << " trajectories)\n";
    return 0;
}

int cmd_plot(const std::string& metrics_csv, const std::string& out_svg,
             std::vector<std::string> columns) {
    std::string text = read_text_file(metrics_csv);
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (pos <= sv.size()) {
            std::size_t comma = sv.find(',', pos);
            if (comma == std::string_view::npos) comma = sv.size();
            fields.emplace_back(sv.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (header.empty()) {
            header = fields;
            continue;
        }
        std::vector<double> vals(fields.size(), 0.0);
        for (std::size_t i = 0; i < fields.size(); ++i) parse_double(fields[i], vals[i]);
        rows.push_back(std::move(vals));
    }
    if (header.empty() || rows.empty()) throw validation_error("metrics CSV has no data rows");
    if (columns.empty()) columns = {"mean_ext_return", "coverage"};

    const int W = 800, H = 400, margin = 40;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    int color = 0;
    for (const std::string& col : columns) {
        std::size_t ci = SIZE_MAX;
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == col) ci = i;
        if (ci == SIZE_MAX) throw config_error("plot: unknown column '" + col + "'");
        double lo = rows[0][ci], hi = rows[0][ci];
        for (const auto& row : rows) {
            lo = std::min(lo, row[ci]);
            hi = std::max(hi, row[ci]);
        }
        if (hi == lo) hi = lo + 1.0;
        svg << "<polyline fill=\"none\" stroke=\"" << palette[color % 5]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double x = margin + (W - 2.0 * margin) * (rows.size() == 1 ? 0.0 : static_cast<double>(i) / (rows.size() - 1));
            double y = H - margin - (H - 2.0 * margin) * (rows[i][ci] - lo) / (hi - lo);
            svg << fmt_double(x) << ',' << fmt_double(y) << ' ';
        }
        svg << "\"/>\n<text x=\"" << margin << "\" y=\"" << (20 + 16 * color) << "\" fill=\""
            << palette[color % 5] << "\" font-size=\"12\">" << col << "</text>\n";
        ++color;
    }
    svg << "</svg>\n";
    write_text_file(out_svg, svg.str());
    std::cout << "plot: " << out_svg << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adamemento: memory-reflection RL on gridworlds"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    bool plain = false;
    CLI::App* train_cmd = app.add_subcommand("train", "run a training experiment");
    add_common(train_cmd, train_opts);
    train_cmd->add_flag("--plain-baseline", plain, "run the base learner without any modules");

    VerifyOptions vopt;
    std::string verify_csv = "verify.csv";
    std::uint64_t verify_seeds = 1000;
    CLI::App* verify_cmd = app.add_subcommand("verify", "verify the shaping/ensemble guarantees on random MDPs");
    verify_cmd->add_option("--seeds", verify_seeds, "number of seeds per theorem");
    verify_cmd->add_option("--seed-begin", vopt.seed_begin, "first seed");
    verify_cmd->add_option("--max-states", vopt.max_states, "largest state count");
    verify_cmd->add_option("--max-actions", vopt.max_actions, "largest action count");
    verify_cmd->add_option("--kappa", vopt.kappa, "confidence gate");
    verify_cmd->add_option("--report", verify_csv, "per-instance CSV path");

    std::string replay_ckpt;
    int replay_episodes = 1;
    std::string replay_csv;
    bool replay_quiet = false;
    CLI::App* replay_cmd = app.add_subcommand("replay", "greedy rollouts from a checkpoint");
    replay_cmd->add_option("--checkpoint", replay_ckpt, "checkpoint path")->required();
    replay_cmd->add_option("--episodes", replay_episodes, "episodes to roll out");
    replay_cmd->add_option("--csv", replay_csv, "trajectory CSV path");
    replay_cmd->add_flag("--quiet", replay_quiet, "skip the ASCII rendering");

    std::string novelty_ckpt, novelty_out = "out";
    CLI::App* novelty_cmd = app.add_subcommand("novelty-map", "per-cell intrinsic reward dump");
    novelty_cmd->add_option("--checkpoint", novelty_ckpt, "checkpoint path")->required();
    novelty_cmd->add_option("--out", novelty_out, "output directory");

    std::string conf_ckpt, conf_csv = "confidence.csv";
    CLI::App* conf_cmd = app.add_subcommand("inspect-confidence", "per-cell max-action confidence grid");
    conf_cmd->add_option("--checkpoint", conf_ckpt, "checkpoint path")->required();
    conf_cmd->add_option("--csv", conf_csv, "output CSV path");

    std::string dump_ckpt, dump_csv = "memory.csv";
    CLI::App* dump_cmd = app.add_subcommand("dump-memory", "stored trajectory dump");
    dump_cmd->add_option("--checkpoint", dump_ckpt, "checkpoint path")->required();
    dump_cmd->add_option("--csv", dump_csv, "output CSV path");

    std::string plot_in, plot_out = "metrics.svg";
    std::vector<std::string> plot_columns;
    CLI::App* plot_cmd = app.add_subcommand("plot", "render metrics CSV to an SVG line chart");
    plot_cmd->add_option("--in", plot_in, "metrics CSV")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG");
    plot_cmd->add_option("--columns", plot_columns, "columns to plot");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_opts, plain);
        if (verify_cmd->parsed()) {
            vopt.seed_end = vopt.seed_begin + verify_seeds;
            return cmd_verify(vopt, verify_csv);
        }
        if (replay_cmd->parsed())
            return cmd_replay(replay_ckpt, replay_episodes, replay_csv, replay_quiet);
        if (novelty_cmd->parsed()) return cmd_novelty_map(novelty_ckpt, novelty_out);
        if (conf_cmd->parsed()) return cmd_inspect_confidence(conf_ckpt, conf_csv);
        if (dump_cmd->parsed()) return cmd_dump_memory(dump_ckpt, dump_csv);
        if (plot_cmd->parsed()) return cmd_plot(plot_in, plot_out, plot_columns);
    } catch (const ada::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ada::ErrorKind::config ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include <CLI11.hpp>

#include <gfnlab/checkpoint.hpp>
#include <gfnlab/config.hpp>
#include <gfnlab/exact_dp.hpp>
#include <gfnlab/heatmap.hpp>
#include <gfnlab/reproduce.hpp>
#include <gfnlab/train.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace gfnlab;

namespace {

void run_heatmap(const std::string& run_dir) {
    const std::string dist_path = run_dir + "/dist.csv";
    Vector dist;
    int height = 0;
    if (fs::exists(dist_path)) {
        dist = read_dist_csv(dist_path, height);
    } else {
        RunConfig cfg = load_config_file(run_dir + "/config.json");
        if (cfg.env.kind != EnvKind::HyperGrid || cfg.env.ndim != 2)
            throw ConfigError("heatmap requires a 2D hypergrid run");
        HyperGridEnv env = make_hypergrid(cfg.env);
        Policy policy(cfg.algo, cfg.loss, env.encoding_size(), env.action_count(), cfg.policy,
                      cfg.seed);
        load_checkpoint(run_dir + "/checkpoint.bin", policy.store().all());
        dist = grid_exact_terminal_dist(env, policy);
        height = env.height();
        write_dist_csv(dist_path, dist, height);
    }
    write_heatmap_pgm(run_dir + "/heatmap.pgm", dist, height);
    std::cout << "wrote " << run_dir << "/heatmap.pgm\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gfnlab: GFlowNet exploration lab (hypergrid + bit sequences)"};
    app.require_subcommand(1);

    auto* train_cmd = app.add_subcommand("train", "train one run from a config file");
    std::string config_path;
    int64_t seed_override = -1;
    std::string out_override;
    bool resume = false, quiet = false;
    train_cmd->add_option("--config", config_path, "run config (JSON)")->required();
    train_cmd->add_option("--seed", seed_override, "override the config seed");
    train_cmd->add_option("--out", out_override, "override the output directory");
    train_cmd->add_flag("--resume", resume, "continue from checkpoint/trainstate in the out dir");
    train_cmd->add_flag("--quiet", quiet, "suppress progress lines");

    auto* rep_cmd = app.add_subcommand("reproduce", "run a paper experiment matrix");
    std::string matrix;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string rep_out;
    rep_cmd->add_option("matrix", matrix, "one of: fig1-8x8, fig56-budget, fig3-4d, table2-sparse, table1-bitseq")
        ->required();
    rep_cmd->add_option("--jobs", jobs, "parallel runs");
    rep_cmd->add_option("--out", rep_out, "output root (default runs/<matrix>)");
    rep_cmd->add_flag("--quiet", quiet, "suppress progress lines");

    auto* heat_cmd = app.add_subcommand("heatmap", "emit dist.csv + heatmap.pgm for a 2D run");
    std::string heat_dir;
    heat_cmd->add_option("run_dir", heat_dir, "run directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a finished run with fresh rollouts");
    std::string eval_dir;
    int64_t n_eval = 10000;
    eval_cmd->add_option("run_dir", eval_dir, "run directory")->required();
    eval_cmd->add_option("--n-eval", n_eval, "number of evaluation trajectories");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            RunConfig cfg = load_config_file(config_path);
            if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
            if (!out_override.empty()) cfg.out_dir = out_override;
            TrainOptions opts;
            opts.resume = resume;
            opts.quiet = quiet;
            train_run(cfg, opts);
        } else if (*rep_cmd) {
            ReproduceOptions opts;
            opts.jobs = jobs;
            opts.out_root = rep_out;
            opts.quiet = quiet;
            reproduce(matrix, opts);
        } else if (*heat_cmd) {
            run_heatmap(heat_dir);
        } else if (*eval_cmd) {
            eval_run(eval_dir, n_eval);
        }
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

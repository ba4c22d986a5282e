#include <doctest.h>

#include <gfnlab/config.hpp>
#include <gfnlab/heatmap.hpp>
#include <gfnlab/train.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gfnlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("gfnlab_harness_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig tiny_run(const std::string& out) {
    RunConfig cfg;
    cfg.env.kind = EnvKind::HyperGrid;
    cfg.env.ndim = 2;
    cfg.env.height = 2;
    cfg.env.r0 = 0.1;
    cfg.algo = Algo::EnnEnhanced;
    cfg.policy.hidden = {8};
    cfg.policy.index_dim = 2;
    cfg.policy.epi_hidden = 4;
    cfg.policy.prior_hidden = 4;
    cfg.policy.m_eval = 8;
    cfg.budget = 320;
    cfg.batch = 16;
    cfg.eval.interval = 5;
    cfg.eval.n_eval = 200;
    cfg.seed = 0;
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("config: parse, validate, and canonical round-trip") {
    const std::string text = R"({
        "env": {"type": "hypergrid", "ndim": 2, "height": 8, "r0": 1e-4},
        "algo": "enn", "loss": "tb", "budget": 1600, "batch": 16,
        "policy": {"d_z": 4, "alpha": 0.5},
        "seed": 7, "out": "x"
    })";
    RunConfig cfg = parse_config_text(text);
    CHECK(cfg.env.height == 8);
    CHECK(cfg.env.r1 == 1.0);  // default
    CHECK(cfg.algo == Algo::Enn);
    CHECK(cfg.policy.index_dim == 4);
    CHECK(cfg.policy.prior_scale == 0.5);
    CHECK(cfg.seed == 7);

    RunConfig again = parse_config_text(config_to_json(cfg));
    CHECK(config_to_json(again) == config_to_json(cfg));
}

TEST_CASE("config: errors carry exit-code-1 semantics") {
    CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"budget": 100, "batch": 16})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"mystery": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"algo": "sarsa"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"env": {"type": "bitseq", "seq_halflen": 0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"policy": {"hidden": []}})"), ConfigError);
}

TEST_CASE("train: identical config and seed give byte-identical outputs") {
    fs::path a = temp_dir("det_a");
    fs::path b = temp_dir("det_b");
    RunConfig ca = tiny_run(a.string());
    RunConfig cb = tiny_run(b.string());
    TrainOptions opts;
    opts.quiet = true;
    train_run(ca, opts);
    train_run(cb, opts);
    CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "checkpoint.bin") == slurp(b / "checkpoint.bin"));
    CHECK(slurp(a / "config.json") != "");
    CHECK(slurp(a / "dist.csv") == slurp(b / "dist.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("train: evaluation cadence never perturbs training") {
    fs::path a = temp_dir("cad_a");
    fs::path b = temp_dir("cad_b");
    RunConfig ca = tiny_run(a.string());
    RunConfig cb = tiny_run(b.string());
    cb.eval.interval = 2;  // more checkpoints, same training stream
    TrainOptions opts;
    opts.quiet = true;
    train_run(ca, opts);
    train_run(cb, opts);
    CHECK(slurp(a / "checkpoint.bin") == slurp(b / "checkpoint.bin"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("train: resume reproduces the uninterrupted run exactly") {
    fs::path full_dir = temp_dir("resume_full");
    fs::path part_dir = temp_dir("resume_part");

    RunConfig full = tiny_run(full_dir.string());
    full.budget = 640;
    TrainOptions opts;
    opts.quiet = true;
    train_run(full, opts);

    RunConfig part = tiny_run(part_dir.string());
    part.budget = 320;
    train_run(part, opts);
    RunConfig cont = tiny_run(part_dir.string());
    cont.budget = 640;
    TrainOptions resume_opts;
    resume_opts.quiet = true;
    resume_opts.resume = true;
    train_run(cont, resume_opts);

    CHECK(slurp(full_dir / "metrics.csv") == slurp(part_dir / "metrics.csv"));
    CHECK(slurp(full_dir / "checkpoint.bin") == slurp(part_dir / "checkpoint.bin"));
    fs::remove_all(full_dir);
    fs::remove_all(part_dir);
}

TEST_CASE("metrics.csv carries the fixed schema") {
    fs::path dir = temp_dir("schema");
    RunConfig cfg = tiny_run(dir.string());
    TrainOptions opts;
    opts.quiet = true;
    TrainResult r = train_run(cfg, opts);
    std::ifstream f(dir / "metrics.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "trajectories_seen,batch_loss,logz_estimate,l1_sampled,l1_exact,modes_found");
    std::string row;
    int rows = 0;
    while (std::getline(f, row)) {
        if (row.empty()) continue;
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 5);
    }
    CHECK(rows == static_cast<int>(r.records.size()));
    CHECK(rows == 4);  // 320/16 = 20 batches, every 5
    fs::remove_all(dir);
}

TEST_CASE("dist.csv normalizes and the heatmap peaks white") {
    fs::path dir = temp_dir("heat");
    RunConfig cfg = tiny_run(dir.string());
    TrainOptions opts;
    opts.quiet = true;
    train_run(cfg, opts);
    int h = 0;
    Vector dist = read_dist_csv((dir / "dist.csv").string(), h);
    CHECK(h == 2);
    CHECK(std::abs(dist.sum() - 1.0) < 1e-9);
    std::string pgm = slurp(dir / "heatmap.pgm");
    CHECK(pgm.rfind("P2\n2 2\n255\n", 0) == 0);
    CHECK(pgm.find("255") != std::string::npos);

    // uniform distribution renders as a uniform image
    Vector uniform = Vector::Constant(4, 0.25);
    write_heatmap_pgm((dir / "uniform.pgm").string(), uniform, 2);
    std::string upgm = slurp(dir / "uniform.pgm");
    CHECK(upgm == "P2\n2 2\n255\n255 255\n255 255\n");
    fs::remove_all(dir);
}

TEST_CASE("bitseq run records distinct valid strings as modes") {
    fs::path dir = temp_dir("bits");
    RunConfig cfg;
    cfg.env.kind = EnvKind::BitSeq;
    cfg.env.seq_halflen = 3;
    cfg.algo = Algo::Enn;
    cfg.policy.hidden = {16};
    cfg.policy.index_dim = 2;
    cfg.policy.epi_hidden = 4;
    cfg.policy.prior_hidden = 4;
    cfg.policy.m_eval = 16;
    cfg.budget = 640;
    cfg.batch = 16;
    cfg.eval.interval = 40;
    cfg.eval.n_eval = 500;
    cfg.out_dir = dir.string();
    TrainOptions opts;
    opts.quiet = true;
    TrainResult r = train_run(cfg, opts);
    CHECK(r.total_modes == static_cast<int64_t>(catalan(3)));
    CHECK(r.modes_found >= 1);
    CHECK(r.modes_found <= r.total_modes);
    CHECK(r.final_diversity.distinct_valid <= static_cast<int64_t>(catalan(3)));
    CHECK(r.final_diversity.distinct_valid >= 1);
    CHECK(std::isfinite(r.final_l1_sampled));

    TrainResult ev = eval_run(dir.string(), 400, true);
    CHECK(ev.final_diversity.distinct_valid >= 1);
    CHECK(fs::exists(dir / "eval.csv"));
    fs::remove_all(dir);
}

#ifdef GFNLAB_CLI_PATH
TEST_CASE("cli exit codes: 0 success, 1 config error, 2 numerical failure") {
    fs::path dir = temp_dir("cli");
    fs::path cfg_path = dir / "run.json";
    {
        RunConfig cfg = tiny_run((dir / "out").string());
        std::ofstream f(cfg_path);
        f << config_to_json(cfg);
    }
    std::string base = std::string(GFNLAB_CLI_PATH);
    int ok = std::system((base + " train --config " + cfg_path.string() + " --quiet").c_str());
    CHECK(WEXITSTATUS(ok) == 0);

    int bad = std::system((base + " train --config /nonexistent.json 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(bad) == 1);

    {
        std::ofstream f(dir / "bad.json");
        f << "{\"budget\": 100, \"batch\": 16}";
    }
    int invalid = std::system(
        (base + " train --config " + (dir / "bad.json").string() + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(invalid) == 1);

    {
        RunConfig cfg = tiny_run((dir / "out2").string());
        cfg.lr_logz = 1e200;  // drives the squared residual to overflow within a few steps
        std::ofstream f(dir / "nan.json");
        f << config_to_json(cfg);
    }
    int numeric = std::system(
        (base + " train --config " + (dir / "nan.json").string() + " --quiet 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(numeric) == 2);

    int heat = std::system((base + " heatmap " + (dir / "out").string()).c_str());
    CHECK(WEXITSTATUS(heat) == 0);
    CHECK(fs::exists(dir / "out" / "heatmap.pgm"));

    int ev = std::system((base + " eval " + (dir / "out").string() + " --n-eval 100").c_str());
    CHECK(WEXITSTATUS(ev) == 0);
    fs::remove_all(dir);
}
#endif

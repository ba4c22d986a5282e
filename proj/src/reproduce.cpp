#include "gfnlab/reproduce.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace gfnlab {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kSeeds[3] = {0, 1, 2};

RunConfig grid_run(int ndim, int height, double r0, Algo algo, LossKind loss, int64_t budget) {
    RunConfig cfg;
    cfg.env.kind = EnvKind::HyperGrid;
    cfg.env.ndim = ndim;
    cfg.env.height = height;
    cfg.env.r0 = r0;
    cfg.algo = algo;
    cfg.loss = loss;
    cfg.budget = budget;
    return cfg;
}

RunConfig bitseq_run(int half_n, Algo algo, int64_t budget) {
    RunConfig cfg;
    cfg.env.kind = EnvKind::BitSeq;
    cfg.env.seq_halflen = half_n;
    cfg.algo = algo;
    cfg.loss = LossKind::TB;
    cfg.budget = budget;
    cfg.eval.n_eval = 16000;  // Table 1 samples 16,000 sequences
    return cfg;
}

std::string run_dir_name(const std::string& tag, Algo algo, uint64_t seed) {
    return tag + "__" + algo_to_string(algo) + "__s" + std::to_string(seed);
}

void push_runs(std::vector<MatrixRun>& out, const std::string& out_root, const std::string& tag,
               const RunConfig& base, const std::vector<Algo>& algos) {
    for (Algo a : algos) {
        for (uint64_t s : kSeeds) {
            RunConfig cfg = base;
            cfg.algo = a;
            cfg.seed = s;
            cfg.out_dir = out_root + "/" + run_dir_name(tag, a, s);
            out.push_back(MatrixRun{tag, std::move(cfg)});
        }
    }
}

const std::vector<Algo> kAllFour = {Algo::Default, Algo::TS, Algo::Enn, Algo::EnnEnhanced};
const std::vector<Algo> kDbThree = {Algo::Default, Algo::Enn, Algo::EnnEnhanced};
const std::vector<Algo> kEpinetPair = {Algo::Default, Algo::Enn};

}  // namespace

std::vector<std::string> reproduce_matrix_names() {
    return {"fig1-8x8", "fig56-budget", "fig3-4d", "table2-sparse", "table1-bitseq"};
}

std::vector<MatrixRun> reproduce_runs(const std::string& matrix_name,
                                      const std::string& out_root) {
    std::vector<MatrixRun> runs;
    if (matrix_name == "fig1-8x8") {
        push_runs(runs, out_root, "8x8", grid_run(2, 8, 1e-4, Algo::Default, LossKind::TB, 100000),
                  kAllFour);
    } else if (matrix_name == "fig56-budget") {
        push_runs(runs, out_root, "8x8-16k",
                  grid_run(2, 8, 1e-3, Algo::Default, LossKind::TB, 16000), kAllFour);
        push_runs(runs, out_root, "16x16-32k",
                  grid_run(2, 16, 1e-3, Algo::Default, LossKind::TB, 32000), kAllFour);
    } else if (matrix_name == "fig3-4d") {
        push_runs(runs, out_root, "4d-h16",
                  grid_run(4, 16, 1e-3, Algo::Default, LossKind::TB, 100000), kAllFour);
        push_runs(runs, out_root, "4d-h8",
                  grid_run(4, 8, 1e-4, Algo::Default, LossKind::TB, 100000), kAllFour);
    } else if (matrix_name == "table2-sparse") {
        RunConfig base64 = grid_run(2, 64, 1e-5, Algo::Default, LossKind::DB, 200000);
        base64.eval.interval = 2500;
        push_runs(runs, out_root, "64x64", base64, kDbThree);
        RunConfig base128 = grid_run(2, 128, 1e-5, Algo::Default, LossKind::DB, 200000);
        base128.eval.interval = 2500;
        push_runs(runs, out_root, "128x128", base128, kDbThree);
    } else if (matrix_name == "table1-bitseq") {
        for (int n : {8, 12, 16})
            push_runs(runs, out_root, "n" + std::to_string(n),
                      bitseq_run(n, Algo::Default, 100000), kEpinetPair);
    } else {
        throw ConfigError("unknown reproduce matrix: " + matrix_name +
                          " (expected one of fig1-8x8, fig56-budget, fig3-4d, table2-sparse, "
                          "table1-bitseq)");
    }
    return runs;
}

std::vector<TrainResult> run_matrix(const std::vector<MatrixRun>& runs, int jobs, bool quiet) {
    std::vector<TrainResult> results(runs.size());
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= runs.size() || failed.load()) return;
            try {
                TrainOptions opts;
                opts.quiet = quiet;
                results[i] = train_run(runs[i].cfg, opts);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
                return;
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
    workers.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    if (failed.load()) throw std::runtime_error("matrix run failed: " + first_error);
    return results;
}

double median3(double a, double b, double c) {
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

void reproduce(const std::string& matrix_name, const ReproduceOptions& opts) {
    const std::string out_root =
        opts.out_root.empty() ? "runs/" + matrix_name : opts.out_root;
    fs::create_directories(out_root);
    auto runs = reproduce_runs(matrix_name, out_root);
    auto results = run_matrix(runs, opts.jobs, opts.quiet);

    std::ofstream sum(out_root + "/summary.csv", std::ios::trunc);
    sum << "matrix,variant,algo,loss,seed,trajectories,l1_exact,l1_sampled,modes_found,"
           "total_modes,distinct_valid,diversity_fraction,logz\n";
    for (size_t i = 0; i < runs.size(); ++i) {
        const RunConfig& cfg = runs[i].cfg;
        const TrainResult& r = results[i];
        sum << matrix_name << ',' << runs[i].tag << ',' << algo_to_string(cfg.algo) << ','
            << loss_to_string(cfg.loss) << ',' << cfg.seed << ',' << cfg.budget << ','
            << format_csv_double(r.final_l1_exact) << ','
            << format_csv_double(r.final_l1_sampled) << ',' << r.modes_found << ','
            << r.total_modes << ',' << r.final_diversity.distinct_valid << ','
            << format_csv_double(r.final_diversity.fraction) << ','
            << format_csv_double(r.final_logz) << '\n';
    }
    // per-(variant, algo) medians over the three seeds
    std::map<std::pair<std::string, std::string>, std::vector<const TrainResult*>> groups;
    for (size_t i = 0; i < runs.size(); ++i)
        groups[{runs[i].tag, algo_to_string(runs[i].cfg.algo)}].push_back(&results[i]);
    for (const auto& [key, rs] : groups) {
        if (rs.size() != 3) continue;
        sum << matrix_name << ',' << key.first << ',' << key.second << ','
            << loss_to_string(runs[0].cfg.loss) << ",median,,"
            << format_csv_double(
                   median3(rs[0]->final_l1_exact, rs[1]->final_l1_exact, rs[2]->final_l1_exact))
            << ','
            << format_csv_double(median3(rs[0]->final_l1_sampled, rs[1]->final_l1_sampled,
                                         rs[2]->final_l1_sampled))
            << ','
            << format_csv_double(median3(static_cast<double>(rs[0]->modes_found),
                                         static_cast<double>(rs[1]->modes_found),
                                         static_cast<double>(rs[2]->modes_found)))
            << ',' << rs[0]->total_modes << ','
            << format_csv_double(median3(static_cast<double>(rs[0]->final_diversity.distinct_valid),
                                         static_cast<double>(rs[1]->final_diversity.distinct_valid),
                                         static_cast<double>(rs[2]->final_diversity.distinct_valid)))
            << ",,\n";
    }
    sum.close();

    if (matrix_name == "table2-sparse") {
        std::ofstream tab(out_root + "/table.csv", std::ios::trunc);
        tab << "size,DB-GFN,ENN-GFN,ENN-GFN-Enhanced\n";
        for (const std::string& tag : {std::string("64x64"), std::string("128x128")}) {
            tab << (tag == "64x64" ? "64" : "128");
            for (Algo a : kDbThree) {
                std::vector<double> v;
                for (size_t i = 0; i < runs.size(); ++i)
                    if (runs[i].tag == tag && runs[i].cfg.algo == a)
                        v.push_back(results[i].final_l1_exact);
                tab << ',' << format_csv_double(median3(v.at(0), v.at(1), v.at(2)));
            }
            tab << '\n';
        }
    } else if (matrix_name == "table1-bitseq") {
        std::ofstream tab(out_root + "/table.csv", std::ios::trunc);
        tab << "model,len16,len24,len32\n";
        for (Algo a : kEpinetPair) {
            tab << (a == Algo::Enn ? "with-epinet" : "without-epinet");
            for (int n : {8, 12, 16}) {
                std::string tag = "n" + std::to_string(n);
                std::vector<double> v;
                for (size_t i = 0; i < runs.size(); ++i)
                    if (runs[i].tag == tag && runs[i].cfg.algo == a)
                        v.push_back(static_cast<double>(results[i].final_diversity.distinct_valid));
                tab << ',' << format_csv_double(median3(v.at(0), v.at(1), v.at(2)));
            }
            tab << '\n';
        }
    }

    if (!opts.quiet)
        std::cout << "reproduce " << matrix_name << ": " << runs.size() << " runs complete, summary at "
                  << out_root << "/summary.csv\n";
}

}  // namespace gfnlab

#pragma once

#include "gfnlab/config.hpp"
#include "gfnlab/metrics.hpp"

#include <limits>
#include <string>
#include <vector>

namespace gfnlab {

// One metrics row per evaluation checkpoint. Wall time is reported on
// stdout only; persisted columns are fully determined by (config, seed).
struct RunRecord {
    int64_t trajectories_seen = 0;
    double batch_loss = 0.0;
    double logz_estimate = 0.0;
    double l1_sampled = std::numeric_limits<double>::quiet_NaN();
    double l1_exact = std::numeric_limits<double>::quiet_NaN();
    int64_t modes_found = 0;
    double wall_ms = 0.0;
};

struct TrainResult {
    std::vector<RunRecord> records;
    double final_l1_exact = std::numeric_limits<double>::quiet_NaN();
    double final_l1_sampled = std::numeric_limits<double>::quiet_NaN();
    double final_loss = 0.0;
    double final_logz = 0.0;
    int64_t modes_found = 0;
    int64_t total_modes = 0;
    // grids: 2^n corner regions covered ("the 4 modes" of the 2D tasks);
    // bit sequences: same as modes_found
    int64_t mode_regions_found = 0;
    int64_t total_mode_regions = 0;
    DiversityResult final_diversity;  // bit sequences only
    std::string out_dir;
};

struct TrainOptions {
    bool resume = false;
    bool quiet = false;
};

// Runs the full training loop and writes config.json, metrics.csv,
// checkpoint.bin, trainstate.{json,bin} and, for 2D grids, dist.csv and
// heatmap.pgm into cfg.out_dir.
TrainResult train_run(const RunConfig& cfg, const TrainOptions& opts = {});

// Loads a finished run directory and evaluates the checkpointed policy with
// n_eval fresh rollouts; writes eval.csv.
TrainResult eval_run(const std::string& run_dir, int64_t n_eval, bool quiet = false);

std::string format_csv_double(double v);

}  // namespace gfnlab

#pragma once

#include "gfnlab/bitseq.hpp"
#include "gfnlab/hypergrid.hpp"
#include "gfnlab/metrics.hpp"
#include "gfnlab/policy.hpp"

#include <cstdint>
#include <string>

namespace gfnlab {

enum class EnvKind { HyperGrid, BitSeq };

struct EnvConfig {
    EnvKind kind = EnvKind::HyperGrid;
    // hypergrid
    int ndim = 2;
    int height = 8;
    double r0 = 1e-4;
    double r1 = 1.0;
    double r2 = 3.0;
    CoordNorm coord_norm = CoordNorm::ByH;
    // bitseq
    int seq_halflen = 8;
    double r_valid = 1.0;
    double r_invalid = 1e-3;
};

struct EvalConfig {
    int64_t interval = 500;   // batches between metric rows
    int64_t n_eval = 10000;   // fresh-eval rollouts per checkpoint
    WindowPolicy window = WindowPolicy::FreshEval;
    int64_t window_size = 100000;  // last-W ring size
};

struct RunConfig {
    EnvConfig env;
    Algo algo = Algo::Default;
    LossKind loss = LossKind::TB;
    int64_t budget = 100000;  // total trajectories
    int batch = 16;
    double lr_net = 1e-3;
    double lr_logz = 1e-1;
    PolicyConfig policy;
    uint64_t seed = 0;
    EvalConfig eval;
    std::string out_dir = "run";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string config_to_json(const RunConfig& cfg);
void validate_config(const RunConfig& cfg);

HyperGridEnv make_hypergrid(const EnvConfig& e);
BitSeqEnv make_bitseq(const EnvConfig& e);

}  // namespace gfnlab

#pragma once

#include "gfnlab/rng.hpp"
#include "gfnlab/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gfnlab {

enum class Algo { Default, TS, Enn, EnnEnhanced };
enum class LossKind { TB, DB };

Algo algo_from_string(const std::string& s);
std::string algo_to_string(Algo a);
LossKind loss_from_string(const std::string& s);
std::string loss_to_string(LossKind l);

struct PolicyConfig {
    std::vector<int> hidden{256, 256};  // trunk widths; last is the feature width
    int ensemble_size = 4;              // K (TS)
    int index_dim = 8;                  // d_z (ENN variants)
    double prior_scale = 5.0;           // alpha
    int epi_hidden = 64;                // learnable epinet hidden width
    int prior_hidden = 32;              // each frozen prior MLP hidden width
    int m_eval = 1000;                  // epistemic samples for the evaluation mixture
    bool resample_prior_per_step = false;  // enhanced: redraw J at every step
};

// Drawn once per trajectory and recorded with it: ensemble member k for TS,
// epistemic index z (and prior member J for the enhanced variant) for ENN.
struct SampleContext {
    int member = 0;
    Vector z;
    int prior_member = -1;
};

// Forward-policy parameterizations sharing a ReLU MLP trunk. The epinet
// variants read stop-gradiented trunk features; the prior networks are
// frozen at initialization. An optional scalar flow head (DB training)
// reads the trunk features directly.
class Policy {
  public:
    Policy(Algo algo, LossKind loss, int input_dim, int action_count,
           const PolicyConfig& cfg, uint64_t seed);

    Algo algo() const { return algo_; }
    LossKind loss_kind() const { return loss_; }
    int action_count() const { return actions_; }
    int input_dim() const { return input_dim_; }
    const PolicyConfig& config() const { return cfg_; }

    ParamStore& store() { return store_; }
    const ParamStore& store() const { return store_; }
    std::vector<std::pair<Parameter*, double>> trainable_with_lr(double lr_net, double lr_logz);

    SampleContext draw_context(Rng& rng) const;
    int draw_prior_member(Rng& rng) const;

    // --- raw forward (no tape): sampling and evaluation ---
    Matrix features_raw(const Matrix& x) const;
    Matrix logits_raw(const Matrix& x, const SampleContext& ctx) const;
    // lockstep batches where each row carries its own context
    Matrix logits_raw_rows(const Matrix& x, const std::vector<const SampleContext*>& ctx) const;
    // Deterministic masked policy used for exact DP and fresh evaluation:
    // Default -> softmax; TS -> uniform mixture over the K members;
    // ENN variants -> mean softmax over the fixed evaluation index set.
    Matrix eval_probs(const Matrix& x, const Matrix& mask_add) const;
    Vector flow_raw(const Matrix& x) const;

    // --- graph forward (training) ---
    struct Graph {
        Val features{-1};
        Val base{-1};       // Default / ENN base head
        Val ens{-1};        // TS K*A final layer
        Val epi_train{-1};  // N x (A*d_z), j-major blocks
        Val prior{-1};      // N x (A*d_z), j-major blocks
        Val flow{-1};       // N x 1
        Val logz{-1};       // leaf
    };
    Graph build_graph(Tape& t, const Matrix& x);
    // logits for rows [begin, begin+count) under one trajectory context;
    // per_step_prior overrides ctx.prior_member per row when non-empty.
    Val logits_for(Tape& t, const Graph& g, int begin, int count, const SampleContext& ctx,
                   const std::vector<int>& per_step_prior = {}) const;
    Val flow_for(Tape& t, const Graph& g, int begin, int count) const;
    Val logz_for(Tape& t, const Graph& g, const SampleContext& ctx) const;

    bool has_logz() const { return loss_ == LossKind::TB; }
    bool has_flow_head() const { return loss_ == LossKind::DB; }
    double logz_value(const SampleContext& ctx) const;
    double logz_mean() const;

    // Eq.-3 style joint prediction: Monte Carlo over M sampling contexts of
    // the product of per-state masked softmax probabilities at the labels.
    double joint_prediction(const Matrix& states, const Matrix& mask_add,
                            const std::vector<int>& labels, int m_samples, Rng& rng) const;

    const std::vector<SampleContext>& eval_contexts() const { return eval_ctxs_; }

  private:
    Matrix mlp_raw(const Matrix& x, const std::vector<std::string>& layers) const;
    Matrix epi_train_raw(const Matrix& feats) const;
    Matrix prior_raw(const Matrix& feats) const;
    // y += sum_j block_j(m) * z_j, blocks of width action_count
    void contract_index(const Matrix& m, const Vector& z, Matrix& y) const;
    Matrix contraction_matrix(const Vector& z) const;

    Algo algo_;
    LossKind loss_;
    int input_dim_;
    int actions_;
    PolicyConfig cfg_;
    ParamStore store_;
    std::vector<std::string> trunk_layers_;
    std::vector<std::string> epi_layers_;
    std::vector<std::vector<std::string>> prior_layers_;
    std::vector<SampleContext> eval_ctxs_;
};

// Masked row-wise softmax helper shared by the raw paths.
Matrix masked_softmax_rows(const Matrix& logits, const Matrix& mask_add);

}  // namespace gfnlab

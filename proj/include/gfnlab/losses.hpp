#pragma once

#include "gfnlab/sampler.hpp"
#include "gfnlab/tensor.hpp"
#include "gfnlab/trajectory.hpp"

#include <vector>

namespace gfnlab {

// Uniform backward policy: each transition landing on state s' contributes
// -log |parents(s')|; the stop edge has backward probability 1.
template <class Env>
Vector backward_logprob_steps(const Env& env, const Trajectory<typename Env::State>& tr) {
    const int m = tr.decision_count();
    Vector steps = Vector::Zero(m);
    for (int t = 0; t < m; ++t) {
        if (env.has_stop_action() && tr.actions[static_cast<size_t>(t)] == env.stop_action())
            continue;  // backward probability 1
        const auto& landed = tr.states[static_cast<size_t>(t) + 1];
        steps(t) = -std::log(static_cast<double>(env.parent_count(landed)));
    }
    return steps;
}

template <class Env>
double uniform_backward_logprob(const Env& env, const Trajectory<typename Env::State>& tr) {
    return backward_logprob_steps(env, tr).sum();
}

// Squared log-ratio of the trajectory balance identity:
// (log Z + sum log P_F - log R - sum log P_B)^2.
Val tb_loss_term(Tape& t, Val sum_logpf, Val logz, double log_reward, double log_pb_sum);

// Mean over transitions of the detailed-balance residual
// (log F(s_t) + log P_F - log F(s_{t+1}) - log P_B)^2, with log R(s_n)
// standing in for log F at the terminal transition.
Val db_loss_term(Tape& t, Val flow_col, Val logpf_col, double log_reward,
                 const Vector& log_pb_steps);

// Mean of per-trajectory losses over the batch.
Val batch_mean_loss(Tape& t, const std::vector<Val>& per_trajectory);

// Assembles the full differentiable batch loss for either objective:
// one shared trunk forward over every visited decision state, per-trajectory
// head slices under the recorded sampling contexts.
template <class Env>
Val build_batch_loss(Tape& t, const Env& env, Policy& policy,
                     const std::vector<Trajectory<typename Env::State>>& batch) {
    if (batch.empty()) throw std::invalid_argument("build_batch_loss: empty batch");
    const int actions = env.action_count();

    int total = 0;
    for (const auto& tr : batch) total += tr.decision_count();
    Matrix x(total, env.encoding_size());
    Matrix mask(total, actions);
    int row = 0;
    for (const auto& tr : batch) {
        for (int s = 0; s < tr.decision_count(); ++s) {
            env.encode(tr.states[static_cast<size_t>(s)], x.row(row));
            mask_add_row(env, tr.states[static_cast<size_t>(s)], mask.row(row));
            ++row;
        }
    }

    Policy::Graph g = policy.build_graph(t, x);
    Val mask_node = t.constant(mask);

    std::vector<Val> losses;
    losses.reserve(batch.size());
    int begin = 0;
    for (const auto& tr : batch) {
        const int m = tr.decision_count();
        Val logits = policy.logits_for(t, g, begin, m, tr.ctx, tr.step_priors);
        Val logp = t.log_softmax_rows(t.add(logits, t.rows(mask_node, begin, m)));
        std::vector<std::pair<int, int>> picks;
        picks.reserve(static_cast<size_t>(m));
        for (int s = 0; s < m; ++s) picks.emplace_back(s, tr.actions[static_cast<size_t>(s)]);
        Val logpf_col = t.pick(logp, std::move(picks));

        if (policy.loss_kind() == LossKind::TB) {
            Val sum_logpf = t.sum(logpf_col);
            Val logz = policy.logz_for(t, g, tr.ctx);
            losses.push_back(tb_loss_term(t, sum_logpf, logz, tr.log_reward,
                                          uniform_backward_logprob(env, tr)));
        } else {
            Val flow_col = policy.flow_for(t, g, begin, m);
            losses.push_back(db_loss_term(t, flow_col, logpf_col, tr.log_reward,
                                          backward_logprob_steps(env, tr)));
        }
        begin += m;
    }
    return batch_mean_loss(t, losses);
}

}  // namespace gfnlab

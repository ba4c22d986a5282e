#pragma once

#include "gfnlab/rng.hpp"
#include "gfnlab/trajectory.hpp"

#include <vector>

namespace gfnlab {

// Additive action mask row: 0 where legal, kMaskedLogit where not.
template <class Env>
void mask_add_row(const Env& env, const typename Env::State& s,
                  RowRef row) {
    std::vector<bool> mask;
    env.action_mask(s, mask);
    for (int a = 0; a < env.action_count(); ++a)
        row(a) = mask[static_cast<size_t>(a)] ? 0.0 : kMaskedLogit;
}

// Samples `count` trajectories in lockstep. Each trajectory consumes its own
// deterministically derived streams: "ctx" for the per-trajectory sampling
// context (ensemble member / epistemic index / prior member) and "traj" for
// action draws, both indexed by the global trajectory counter, so results do
// not depend on batching or interleaving.
template <class Env>
std::vector<Trajectory<typename Env::State>> sample_batch(const Env& env, Policy& policy,
                                                          uint64_t root_seed,
                                                          int64_t first_traj_index, int count) {
    using Traj = Trajectory<typename Env::State>;
    const int action_count = env.action_count();

    std::vector<Traj> out(static_cast<size_t>(count));
    std::vector<Rng> act_rng;
    std::vector<Rng> ctx_rng;
    act_rng.reserve(static_cast<size_t>(count));
    ctx_rng.reserve(static_cast<size_t>(count));
    std::vector<int> active;
    for (int i = 0; i < count; ++i) {
        uint64_t idx = static_cast<uint64_t>(first_traj_index + i);
        act_rng.push_back(derive_stream(root_seed, "traj", idx));
        ctx_rng.push_back(derive_stream(root_seed, "ctx", idx));
        out[static_cast<size_t>(i)].ctx = policy.draw_context(ctx_rng.back());
        out[static_cast<size_t>(i)].states.push_back(env.initial_state());
        active.push_back(i);
    }

    const bool per_step_prior =
        policy.algo() == Algo::EnnEnhanced && policy.config().resample_prior_per_step;

    Matrix x(count, env.encoding_size());
    Matrix mask(count, action_count);
    std::vector<const SampleContext*> ctxs(static_cast<size_t>(count));

    while (!active.empty()) {
        const int n = static_cast<int>(active.size());
        for (int r = 0; r < n; ++r) {
            Traj& tr = out[static_cast<size_t>(active[static_cast<size_t>(r)])];
            if (per_step_prior) {
                tr.ctx.prior_member =
                    policy.draw_prior_member(ctx_rng[static_cast<size_t>(active[static_cast<size_t>(r)])]);
                tr.step_priors.push_back(tr.ctx.prior_member);
            }
            env.encode(tr.states.back(), x.row(r));
            mask_add_row(env, tr.states.back(), mask.row(r));
            ctxs[static_cast<size_t>(r)] = &tr.ctx;
        }
        Matrix logits = policy.logits_raw_rows(
            x.topRows(n), {ctxs.begin(), ctxs.begin() + n});
        Matrix probs = masked_softmax_rows(logits, mask.topRows(n));

        std::vector<int> still;
        still.reserve(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
            int ti = active[static_cast<size_t>(r)];
            Traj& tr = out[static_cast<size_t>(ti)];
            Eigen::RowVectorXd row = probs.row(r);
            int a = act_rng[static_cast<size_t>(ti)].categorical(row.data(), action_count);
            tr.actions.push_back(a);
            auto [next, done] = env.step(tr.states.back(), a);
            if (done) {
                if (!env.has_stop_action()) tr.states.push_back(next);
                tr.log_reward = env.log_reward(tr.states.back());
            } else {
                tr.states.push_back(next);
                still.push_back(ti);
            }
        }
        active = std::move(still);
    }
    return out;
}

}  // namespace gfnlab

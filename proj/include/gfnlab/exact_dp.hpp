#pragma once

#include "gfnlab/bitseq.hpp"
#include "gfnlab/hypergrid.hpp"
#include "gfnlab/policy.hpp"
#include "gfnlab/rng.hpp"

#include <cstdint>
#include <vector>

namespace gfnlab {

// Masked evaluation-policy probabilities for every grid state, one row per
// state index. Feeds both the exact DP and fresh-evaluation rollouts.
Matrix grid_eval_prob_table(const HyperGridEnv& env, const Policy& policy);

// Exact terminal distribution by forward dynamic programming in topological
// order: unit flow at s0, split by the per-state policy, terminal mass
// collected through the stop action.
Vector grid_terminal_dist_from_table(const HyperGridEnv& env, const Matrix& probs);
Vector grid_exact_terminal_dist(const HyperGridEnv& env, const Policy& policy);

// Same DP over bit-sequence prefixes, level by level; terminal mass lands on
// the 2^(2N) complete strings.
Vector bitseq_exact_terminal_dist(const BitSeqEnv& env, const Policy& policy);

// Terminal samples from the deterministic evaluation policy.
std::vector<int64_t> grid_eval_rollouts(const HyperGridEnv& env, const Matrix& probs, Rng& rng,
                                        int64_t n);
std::vector<uint64_t> bitseq_eval_rollouts(const BitSeqEnv& env, const Policy& policy, Rng& rng,
                                           int64_t n);

}  // namespace gfnlab

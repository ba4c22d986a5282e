#pragma once

#include "gfnlab/common.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gfnlab {

// Balanced-parentheses check: 0 opens (+1), 1 closes (-1); the running sum
// must never go negative and must end at zero. The empty sequence is valid.
bool bitseq_is_valid(uint64_t bits, int len);

// Exact Nth Catalan number via the multiplicative recurrence; throws on
// 64-bit overflow.
uint64_t catalan(int n);

struct BitSeqState {
    uint64_t bits = 0;  // bit t = t-th appended bit
    int len = 0;

    bool operator==(const BitSeqState& o) const { return bits == o.bits && len == o.len; }
};

// Append-only binary sequence environment: actions {0, 1} extend the prefix,
// a sequence is complete at fixed length 2N. Every state has exactly one
// parent, so the backward policy is trivial.
class BitSeqEnv {
  public:
    using State = BitSeqState;

    BitSeqEnv(int half_n, double r_valid, double r_invalid);

    int half_n() const { return half_n_; }
    int full_len() const { return 2 * half_n_; }
    double r_valid() const { return r_valid_; }
    double r_invalid() const { return r_invalid_; }

    int action_count() const { return 2; }
    int encoding_size() const { return 3 * full_len(); }
    bool has_stop_action() const { return false; }
    int stop_action() const { return -1; }  // no stop action; never matches

    BitSeqState initial_state() const { return {}; }
    bool is_initial(const BitSeqState& s) const { return s.len == 0; }
    bool is_complete(const BitSeqState& s) const { return s.len == full_len(); }

    // Per position: one-hot over {empty, 0, 1}.
    void encode(const BitSeqState& s, RowRef out) const;

    void action_mask(const BitSeqState& s, std::vector<bool>& mask) const;

    std::pair<BitSeqState, bool> step(const BitSeqState& s, int action) const;

    int parent_count(const BitSeqState& s) const;
    std::vector<std::pair<BitSeqState, int>> parents(const BitSeqState& s) const;

    // Reward is defined on complete sequences only.
    double reward(const BitSeqState& s) const;
    double log_reward(const BitSeqState& s) const;

    int64_t terminal_count() const { return int64_t{1} << full_len(); }

    // R_valid on balanced strings, R_invalid elsewhere, normalized.
    // Guarded at 1e7 terminal states.
    std::pair<Vector, double> target_distribution() const;

  private:
    int half_n_;
    double r_valid_;
    double r_invalid_;
};

std::string bitseq_to_string(uint64_t bits, int len);

}  // namespace gfnlab

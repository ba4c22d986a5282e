#include "gfnlab/bitseq.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnlab {

bool bitseq_is_valid(uint64_t bits, int len) {
    int depth = 0;
    for (int t = 0; t < len; ++t) {
        depth += ((bits >> t) & 1u) ? -1 : 1;
        if (depth < 0) return false;
    }
    return depth == 0;
}

uint64_t catalan(int n) {
    if (n < 0) throw std::invalid_argument("catalan: n must be nonnegative");
    // C_0 = 1, C_k = C_{k-1} * 2(2k-1) / (k+1); the division is exact.
    unsigned __int128 c = 1;
    for (int k = 1; k <= n; ++k) {
        c = c * static_cast<unsigned>(2 * (2 * k - 1));
        c /= static_cast<unsigned>(k + 1);
        if (c > UINT64_MAX) throw std::overflow_error("catalan: result exceeds 64 bits");
    }
    return static_cast<uint64_t>(c);
}

BitSeqEnv::BitSeqEnv(int half_n, double r_valid, double r_invalid)
    : half_n_(half_n), r_valid_(r_valid), r_invalid_(r_invalid) {
    if (half_n < 1 || half_n > 32) throw ConfigError("bitseq: half length must be in [1, 32]");
    if (!(r_valid > r_invalid && r_invalid > 0.0))
        throw ConfigError("bitseq: rewards must satisfy R_valid > R_invalid > 0");
}

void BitSeqEnv::encode(const BitSeqState& s, RowRef out) const {
    out.setZero();
    for (int t = 0; t < full_len(); ++t) {
        int slot = t < s.len ? (((s.bits >> t) & 1u) ? 2 : 1) : 0;
        out(3 * t + slot) = 1.0;
    }
}

void BitSeqEnv::action_mask(const BitSeqState& s, std::vector<bool>& mask) const {
    bool open = s.len < full_len();
    mask.assign(2, open);
}

std::pair<BitSeqState, bool> BitSeqEnv::step(const BitSeqState& s, int action) const {
    if (action != 0 && action != 1) throw std::invalid_argument("bitseq: bad action");
    if (is_complete(s)) throw std::invalid_argument("bitseq: sequence already complete");
    BitSeqState next = s;
    next.bits |= static_cast<uint64_t>(action) << next.len;
    ++next.len;
    return {next, next.len == full_len()};
}

int BitSeqEnv::parent_count(const BitSeqState& s) const {
    return s.len > 0 ? 1 : 0;
}

std::vector<std::pair<BitSeqState, int>> BitSeqEnv::parents(const BitSeqState& s) const {
    if (s.len == 0) throw std::invalid_argument("bitseq: empty sequence has no parents");
    BitSeqState p = s;
    --p.len;
    int last = static_cast<int>((s.bits >> p.len) & 1u);
    p.bits &= ~(uint64_t{1} << p.len);
    return {{p, last}};
}

double BitSeqEnv::reward(const BitSeqState& s) const {
    if (!is_complete(s)) throw std::invalid_argument("bitseq: reward queried on incomplete state");
    return bitseq_is_valid(s.bits, s.len) ? r_valid_ : r_invalid_;
}

double BitSeqEnv::log_reward(const BitSeqState& s) const {
    return std::log(reward(s));
}

std::pair<Vector, double> BitSeqEnv::target_distribution() const {
    const int64_t n = terminal_count();
    if (n > 10'000'000) throw ConfigError("bitseq: terminal space too large to enumerate");
    Vector p(n);
    double z = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double r = bitseq_is_valid(static_cast<uint64_t>(i), full_len()) ? r_valid_ : r_invalid_;
        p(i) = r;
        z += r;
    }
    p /= z;
    return {std::move(p), z};
}

std::string bitseq_to_string(uint64_t bits, int len) {
    std::string s(static_cast<size_t>(len), '0');
    for (int t = 0; t < len; ++t)
        if ((bits >> t) & 1u) s[static_cast<size_t>(t)] = '1';
    return s;
}

}  // namespace gfnlab

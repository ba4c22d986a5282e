#include "gfnlab/exact_dp.hpp"

#include "gfnlab/sampler.hpp"

#include <unordered_map>

namespace gfnlab {

namespace {

constexpr int64_t kEnumerationGuard = 10'000'000;

}  // namespace

Matrix grid_eval_prob_table(const HyperGridEnv& env, const Policy& policy) {
    const int64_t n = env.state_count();
    if (n > kEnumerationGuard) throw ConfigError("grid too large to enumerate");
    Matrix x(n, env.encoding_size());
    Matrix mask(n, env.action_count());
    for (int64_t i = 0; i < n; ++i) {
        GridState s = env.state_from_index(i);
        env.encode(s, x.row(i));
        mask_add_row(env, s, mask.row(i));
    }
    return policy.eval_probs(x, mask);
}

Vector grid_terminal_dist_from_table(const HyperGridEnv& env, const Matrix& probs) {
    const int64_t n = env.state_count();
    if (probs.rows() != n || probs.cols() != env.action_count())
        throw std::invalid_argument("probability table shape mismatch");

    // Bucket states by coordinate sum: every increment raises the sum by one,
    // so ascending sums give a topological order.
    const int max_level = env.ndim() * (env.height() - 1);
    std::vector<std::vector<int64_t>> levels(static_cast<size_t>(max_level) + 1);
    for (int64_t i = 0; i < n; ++i) {
        GridState s = env.state_from_index(i);
        int sum = 0;
        for (int d = 0; d < env.ndim(); ++d) sum += s.c[d];
        levels[static_cast<size_t>(sum)].push_back(i);
    }

    Vector flow = Vector::Zero(n);
    Vector terminal = Vector::Zero(n);
    flow(env.state_index(env.initial_state())) = 1.0;
    for (const auto& level : levels) {
        for (int64_t i : level) {
            const double f = flow(i);
            if (f == 0.0) continue;
            GridState s = env.state_from_index(i);
            terminal(i) += f * probs(i, env.stop_action());
            for (int a = 0; a < env.ndim(); ++a) {
                if (s.c[a] >= env.height() - 1) continue;
                auto [child, done] = env.step(s, a);
                (void)done;
                flow(env.state_index(child)) += f * probs(i, a);
            }
        }
    }
    return terminal;
}

Vector grid_exact_terminal_dist(const HyperGridEnv& env, const Policy& policy) {
    return grid_terminal_dist_from_table(env, grid_eval_prob_table(env, policy));
}

Vector bitseq_exact_terminal_dist(const BitSeqEnv& env, const Policy& policy) {
    if (env.terminal_count() > kEnumerationGuard)
        throw ConfigError("bit-sequence terminal space too large to enumerate");
    const int len = env.full_len();
    Vector flow = Vector::Ones(1);  // level 0: the empty prefix
    for (int l = 0; l < len; ++l) {
        const int64_t width = int64_t{1} << l;
        Matrix x(width, env.encoding_size());
        Matrix mask(width, env.action_count());
        for (int64_t b = 0; b < width; ++b) {
            BitSeqState s{static_cast<uint64_t>(b), l};
            env.encode(s, x.row(b));
            mask_add_row(env, s, mask.row(b));
        }
        Matrix probs = policy.eval_probs(x, mask);
        Vector next = Vector::Zero(width * 2);
        for (int64_t b = 0; b < width; ++b) {
            if (flow(b) == 0.0) continue;
            next(b) += flow(b) * probs(b, 0);                  // append 0
            next(b | (int64_t{1} << l)) += flow(b) * probs(b, 1);  // append 1
        }
        flow = std::move(next);
    }
    return flow;
}

std::vector<int64_t> grid_eval_rollouts(const HyperGridEnv& env, const Matrix& probs, Rng& rng,
                                        int64_t n) {
    std::vector<int64_t> out;
    out.reserve(static_cast<size_t>(n));
    Eigen::RowVectorXd row(env.action_count());
    for (int64_t i = 0; i < n; ++i) {
        GridState s = env.initial_state();
        while (true) {
            int64_t idx = env.state_index(s);
            row = probs.row(idx);
            int a = rng.categorical(row.data(), env.action_count());
            if (a == env.stop_action()) {
                out.push_back(idx);
                break;
            }
            s = env.step(s, a).first;
        }
    }
    return out;
}

namespace {

struct BitSeqStateHash {
    size_t operator()(const BitSeqState& s) const {
        return static_cast<size_t>(
            splitmix64(s.bits ^ (static_cast<uint64_t>(s.len) * 0x9e3779b97f4a7c15ULL)));
    }
};

}  // namespace

std::vector<uint64_t> bitseq_eval_rollouts(const BitSeqEnv& env, const Policy& policy, Rng& rng,
                                           int64_t n) {
    std::unordered_map<BitSeqState, Eigen::RowVector2d, BitSeqStateHash> memo;
    Matrix x(1, env.encoding_size());
    Matrix mask(1, env.action_count());
    std::vector<uint64_t> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        BitSeqState s;
        while (!env.is_complete(s)) {
            auto it = memo.find(s);
            if (it == memo.end()) {
                env.encode(s, x.row(0));
                mask_add_row(env, s, mask.row(0));
                Matrix p = policy.eval_probs(x, mask);
                it = memo.emplace(s, Eigen::RowVector2d(p(0, 0), p(0, 1))).first;
            }
            int a = rng.categorical(it->second.data(), 2);
            s = env.step(s, a).first;
        }
        out.push_back(s.bits);
    }
    return out;
}

}  // namespace gfnlab

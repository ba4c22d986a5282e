#include "gfnlab/losses.hpp"

namespace gfnlab {

Val tb_loss_term(Tape& t, Val sum_logpf, Val logz, double log_reward, double log_pb_sum) {
    Val residual = t.add_scalar(t.add(logz, sum_logpf), -log_reward - log_pb_sum);
    return t.square(residual);
}

Val db_loss_term(Tape& t, Val flow_col, Val logpf_col, double log_reward,
                 const Vector& log_pb_steps) {
    const int m = static_cast<int>(t.value(flow_col).rows());
    if (m != t.value(logpf_col).rows() || m != log_pb_steps.size())
        throw std::invalid_argument("db_loss_term: transition count mismatch");
    // log F at the landing state of each transition; the final transition
    // terminates, so log R replaces the flow there.
    Val next;
    Val log_r = t.scalar(log_reward);
    if (m == 1) {
        next = log_r;
    } else {
        next = t.concat_rows({t.rows(flow_col, 1, m - 1), log_r});
    }
    Val residual = t.add(t.sub(t.add(flow_col, logpf_col), next),
                         t.constant(-Matrix(log_pb_steps)));
    return t.mean(t.square(residual));
}

Val batch_mean_loss(Tape& t, const std::vector<Val>& per_trajectory) {
    if (per_trajectory.empty()) throw std::invalid_argument("batch_mean_loss: empty batch");
    if (per_trajectory.size() == 1) return per_trajectory[0];
    return t.mean(t.concat_rows(per_trajectory));
}

}  // namespace gfnlab

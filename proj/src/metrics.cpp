#include "gfnlab/metrics.hpp"

#include "gfnlab/bitseq.hpp"

#include <set>
#include <stdexcept>

namespace gfnlab {

WindowPolicy window_from_string(const std::string& s) {
    if (s == "cumulative") return WindowPolicy::Cumulative;
    if (s == "last-w") return WindowPolicy::LastW;
    if (s == "fresh-eval") return WindowPolicy::FreshEval;
    throw ConfigError("unknown window policy: " + s);
}

std::string window_to_string(WindowPolicy w) {
    switch (w) {
        case WindowPolicy::Cumulative: return "cumulative";
        case WindowPolicy::LastW: return "last-w";
        case WindowPolicy::FreshEval: return "fresh-eval";
    }
    return "?";
}

EmpiricalDist::EmpiricalDist(int64_t support, WindowPolicy policy, int64_t window_size)
    : policy_(policy), window_(window_size), counts_(Vector::Zero(support)) {
    if (support < 1) throw std::invalid_argument("EmpiricalDist: empty support");
    if (policy == WindowPolicy::LastW && window_size < 1)
        throw std::invalid_argument("EmpiricalDist: window must be positive");
}

void EmpiricalDist::record(int64_t terminal_index) {
    if (terminal_index < 0 || terminal_index >= counts_.size())
        throw std::invalid_argument("EmpiricalDist: terminal index out of range");
    if (policy_ == WindowPolicy::FreshEval) return;  // nothing retained between evals
    counts_(terminal_index) += 1.0;
    ++total_;
    if (policy_ == WindowPolicy::LastW) {
        ring_.push_back(terminal_index);
        if (static_cast<int64_t>(ring_.size()) > window_) {
            counts_(ring_.front()) -= 1.0;
            ring_.pop_front();
            --total_;
        }
    }
}

Vector EmpiricalDist::snapshot() const {
    if (total_ == 0) return Vector::Zero(counts_.size());
    return counts_ / static_cast<double>(total_);
}

void EmpiricalDist::restore(const Vector& counts, int64_t total,
                            const std::vector<int64_t>& ring) {
    if (counts.size() != counts_.size())
        throw std::invalid_argument("EmpiricalDist: restore support mismatch");
    counts_ = counts;
    total_ = total;
    ring_.assign(ring.begin(), ring.end());
}

double l1_mean(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("l1_mean: support mismatch");
    return (a - b).cwiseAbs().sum() / static_cast<double>(a.size());
}

DiversityResult diversity(const std::vector<uint64_t>& complete_samples, int half_n) {
    std::set<uint64_t> distinct;
    const int len = 2 * half_n;
    for (uint64_t s : complete_samples)
        if (bitseq_is_valid(s, len)) distinct.insert(s);
    DiversityResult r;
    r.distinct_valid = static_cast<int64_t>(distinct.size());
    r.fraction = static_cast<double>(r.distinct_valid) / static_cast<double>(catalan(half_n));
    return r;
}

}  // namespace gfnlab

#pragma once

#include "gfnlab/common.hpp"

#include <cstdint>
#include <deque>
#include <set>
#include <vector>

namespace gfnlab {

enum class WindowPolicy { Cumulative, LastW, FreshEval };
WindowPolicy window_from_string(const std::string& s);
std::string window_to_string(WindowPolicy w);

// Empirical distribution over an enumerable terminal support. The window
// policy decides what a snapshot reflects: everything seen, the last W
// terminals, or nothing (fresh-eval snapshots are built from new rollouts
// at evaluation time).
class EmpiricalDist {
  public:
    EmpiricalDist(int64_t support, WindowPolicy policy, int64_t window_size);

    void record(int64_t terminal_index);
    int64_t total() const { return total_; }
    WindowPolicy policy() const { return policy_; }

    // Normalized probabilities; all zeros before the first terminal.
    Vector snapshot() const;

    // Resume support.
    std::vector<int64_t> ring() const { return {ring_.begin(), ring_.end()}; }
    const Vector& counts() const { return counts_; }
    void restore(const Vector& counts, int64_t total, const std::vector<int64_t>& ring);

  private:
    WindowPolicy policy_;
    int64_t window_;
    Vector counts_;
    int64_t total_ = 0;
    std::deque<int64_t> ring_;
};

// Mean absolute difference across the full support (the paper's scale
// convention: per-state, not summed).
double l1_mean(const Vector& a, const Vector& b);

// Distinct discovered modes; monotone over a run.
class ModeSet {
  public:
    bool add(int64_t idx) { return items_.insert(idx).second; }
    int64_t count() const { return static_cast<int64_t>(items_.size()); }
    const std::set<int64_t>& items() const { return items_; }

  private:
    std::set<int64_t> items_;
};

struct DiversityResult {
    int64_t distinct_valid = 0;
    double fraction = 0.0;
};

// Fraction of distinct, complete, valid sequences among complete samples.
DiversityResult diversity(const std::vector<uint64_t>& complete_samples, int half_n);

}  // namespace gfnlab

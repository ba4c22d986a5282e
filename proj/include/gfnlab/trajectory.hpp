#pragma once

#include "gfnlab/policy.hpp"

#include <vector>

namespace gfnlab {

// A complete sampled trajectory. `states` are the explicitly visited states
// (the terminal sink after a stop action is implicit); `actions` holds one
// entry per policy decision, so grids end with the stop action and bit
// sequences have exactly one action per appended bit.
template <typename StateT>
struct Trajectory {
    std::vector<StateT> states;
    std::vector<int> actions;
    double log_reward = 0.0;
    SampleContext ctx;
    std::vector<int> step_priors;  // per-step prior member (enhanced resample mode)

    const StateT& terminal() const { return states.back(); }
    int decision_count() const { return static_cast<int>(actions.size()); }
};

}  // namespace gfnlab

#pragma once

#include "gfnlab/tensor.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gfnlab {

// Standard Adam with bias correction. Learning rate is per parameter group
// (the log Z scalar trains at a higher rate than network weights).
class Adam {
  public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    explicit Adam(std::vector<std::pair<Parameter*, double>> params_with_lr);

    // Consumes Parameter::grad, updates values in place, then zeroes grads.
    void step();

    int64_t step_count() const { return t_; }

    // Resume support: moment tensors and the step counter.
    struct Slot {
        Parameter* param;
        double lr;
        Matrix m;
        Matrix v;
    };
    std::vector<Slot>& slots() { return slots_; }
    void set_step_count(int64_t t) { t_ = t; }

  private:
    std::vector<Slot> slots_;
    int64_t t_ = 0;
};

}  // namespace gfnlab

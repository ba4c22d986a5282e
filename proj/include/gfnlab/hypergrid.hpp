#pragma once

#include "gfnlab/common.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace gfnlab {

// Coordinate normalization inside the reward indicators: x/H follows the
// reward formula as written; x/(H-1) matches the reference-library
// convention and shifts the mode cells.
enum class CoordNorm { ByH, ByHMinus1 };

struct GridState {
    int8_t ndim = 0;
    std::array<int16_t, 8> c{};

    bool operator==(const GridState& o) const { return ndim == o.ndim && c == o.c; }
};

// n-dimensional hypercube grid with side length H, increment actions per
// dimension plus a stop action. The induced MDP is a DAG rooted at the
// all-zeros state; a trajectory terminates when stop is chosen.
class HyperGridEnv {
  public:
    using State = GridState;
    static constexpr int kMaxDims = 8;

    HyperGridEnv(int ndim, int height, double r0, double r1, double r2,
                 CoordNorm norm = CoordNorm::ByH);

    int ndim() const { return ndim_; }
    int height() const { return height_; }
    double r0() const { return r0_; }

    int action_count() const { return ndim_ + 1; }
    int stop_action() const { return ndim_; }
    int encoding_size() const { return ndim_ * height_; }
    bool has_stop_action() const { return true; }

    GridState initial_state() const;
    bool is_initial(const GridState& s) const;

    // One-hot per dimension into a row of width encoding_size().
    void encode(const GridState& s, RowRef out) const;

    // Entry i: increment i legal iff coords[i] < H-1; stop always legal.
    void action_mask(const GridState& s, std::vector<bool>& mask) const;

    // Applies an action; done=true iff the action is stop.
    std::pair<GridState, bool> step(const GridState& s, int action) const;

    int parent_count(const GridState& s) const;
    std::vector<std::pair<GridState, int>> parents(const GridState& s) const;

    double reward(const GridState& s) const;
    double log_reward(const GridState& s) const;
    bool is_mode(const GridState& s) const;

    int64_t state_count() const;
    int64_t state_index(const GridState& s) const;
    GridState state_from_index(int64_t idx) const;

    // p*(x) = R(x)/Z over all cells, plus Z. Guarded at 1e7 states.
    std::pair<Vector, double> target_distribution() const;
    std::vector<int64_t> mode_indices() const;

    // Mode cells group into 2^n corner regions (per dimension: the band
    // below or above the center). "The 4 modes" of a 2D grid are regions;
    // on H=8 each region is a single cell.
    int64_t mode_region_count() const { return int64_t{1} << ndim_; }
    int64_t mode_region_index(const GridState& s) const;

  private:
    int ndim_;
    int height_;
    double r0_, r1_, r2_;
    CoordNorm norm_;
};

}  // namespace gfnlab

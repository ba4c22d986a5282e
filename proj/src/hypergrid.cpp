#include "gfnlab/hypergrid.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace gfnlab {

HyperGridEnv::HyperGridEnv(int ndim, int height, double r0, double r1, double r2, CoordNorm norm)
    : ndim_(ndim), height_(height), r0_(r0), r1_(r1), r2_(r2), norm_(norm) {
    if (ndim < 1 || ndim > kMaxDims)
        throw ConfigError("hypergrid: ndim must be in [1, " + std::to_string(kMaxDims) + "]");
    if (height < 2) throw ConfigError("hypergrid: height must be >= 2");
    if (r0 < 0.0 || r1 < 0.0 || r2 < 0.0)
        throw ConfigError("hypergrid: reward constants must be nonnegative");
    if (!(0.0 < r0 && r0 < r1 && r1 < r2))
        std::cerr << "[gfnlab] warning: reward constants outside the 0 < R0 < R1 < R2 regime\n";
}

GridState HyperGridEnv::initial_state() const {
    GridState s;
    s.ndim = static_cast<int8_t>(ndim_);
    return s;
}

bool HyperGridEnv::is_initial(const GridState& s) const {
    for (int i = 0; i < ndim_; ++i)
        if (s.c[i] != 0) return false;
    return true;
}

void HyperGridEnv::encode(const GridState& s, RowRef out) const {
    out.setZero();
    for (int i = 0; i < ndim_; ++i) out(i * height_ + s.c[i]) = 1.0;
}

void HyperGridEnv::action_mask(const GridState& s, std::vector<bool>& mask) const {
    mask.assign(static_cast<size_t>(action_count()), false);
    for (int i = 0; i < ndim_; ++i) mask[i] = s.c[i] < height_ - 1;
    mask[static_cast<size_t>(stop_action())] = true;
}

std::pair<GridState, bool> HyperGridEnv::step(const GridState& s, int action) const {
    if (action < 0 || action > ndim_) throw std::invalid_argument("hypergrid: bad action");
    if (action == stop_action()) return {s, true};
    if (s.c[action] >= height_ - 1)
        throw std::invalid_argument("hypergrid: increment past the grid edge");
    GridState next = s;
    ++next.c[action];
    return {next, false};
}

int HyperGridEnv::parent_count(const GridState& s) const {
    int n = 0;
    for (int i = 0; i < ndim_; ++i)
        if (s.c[i] > 0) ++n;
    return n;
}

std::vector<std::pair<GridState, int>> HyperGridEnv::parents(const GridState& s) const {
    if (is_initial(s)) throw std::invalid_argument("hypergrid: initial state has no parents");
    std::vector<std::pair<GridState, int>> out;
    for (int i = 0; i < ndim_; ++i) {
        if (s.c[i] > 0) {
            GridState p = s;
            --p.c[i];
            out.emplace_back(p, i);
        }
    }
    return out;
}

double HyperGridEnv::reward(const GridState& s) const {
    const double denom = norm_ == CoordNorm::ByH ? static_cast<double>(height_)
                                                 : static_cast<double>(height_ - 1);
    double band = 1.0;
    double mode = 1.0;
    for (int i = 0; i < ndim_; ++i) {
        double t = std::abs(static_cast<double>(s.c[i]) / denom - 0.5);
        band *= (0.25 < t) ? 1.0 : 0.0;
        mode *= (0.3 < t && t < 0.4) ? 1.0 : 0.0;
    }
    return r0_ + r1_ * band + r2_ * mode;
}

double HyperGridEnv::log_reward(const GridState& s) const {
    return std::log(reward(s));
}

bool HyperGridEnv::is_mode(const GridState& s) const {
    const double denom = norm_ == CoordNorm::ByH ? static_cast<double>(height_)
                                                 : static_cast<double>(height_ - 1);
    for (int i = 0; i < ndim_; ++i) {
        double t = std::abs(static_cast<double>(s.c[i]) / denom - 0.5);
        if (!(0.3 < t && t < 0.4)) return false;
    }
    return true;
}

int64_t HyperGridEnv::state_count() const {
    int64_t n = 1;
    for (int i = 0; i < ndim_; ++i) n *= height_;
    return n;
}

int64_t HyperGridEnv::state_index(const GridState& s) const {
    int64_t idx = 0;
    for (int i = 0; i < ndim_; ++i) idx = idx * height_ + s.c[i];
    return idx;
}

GridState HyperGridEnv::state_from_index(int64_t idx) const {
    GridState s;
    s.ndim = static_cast<int8_t>(ndim_);
    for (int i = ndim_ - 1; i >= 0; --i) {
        s.c[i] = static_cast<int16_t>(idx % height_);
        idx /= height_;
    }
    return s;
}

std::pair<Vector, double> HyperGridEnv::target_distribution() const {
    const int64_t n = state_count();
    if (n > 10'000'000) throw ConfigError("hypergrid: state space too large to enumerate");
    Vector p(n);
    double z = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double r = reward(state_from_index(i));
        p(i) = r;
        z += r;
    }
    p /= z;
    return {std::move(p), z};
}

int64_t HyperGridEnv::mode_region_index(const GridState& s) const {
    const double denom = norm_ == CoordNorm::ByH ? static_cast<double>(height_)
                                                 : static_cast<double>(height_ - 1);
    int64_t idx = 0;
    for (int i = 0; i < ndim_; ++i) {
        idx <<= 1;
        if (static_cast<double>(s.c[i]) / denom > 0.5) idx |= 1;
    }
    return idx;
}

std::vector<int64_t> HyperGridEnv::mode_indices() const {
    const int64_t n = state_count();
    if (n > 10'000'000) throw ConfigError("hypergrid: state space too large to enumerate");
    std::vector<int64_t> out;
    for (int64_t i = 0; i < n; ++i)
        if (is_mode(state_from_index(i))) out.push_back(i);
    return out;
}

}  // namespace gfnlab

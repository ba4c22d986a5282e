#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gfnlab {

// Deterministic stream-splitting RNG discipline: one root seed derives
// independent named streams (trajectory sampling, context draws, evaluation,
// initialization), each optionally indexed by a counter. Distribution draws
// are hand-rolled on top of mt19937_64 so outputs are identical across
// standard library implementations.

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(std::string_view s);

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Strictly positive uniform, safe under log().
    double uniform_pos() {
        double u = uniform();
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Standard normal via Box-Muller (cosine branch only).
    double normal();

    // Uniform integer in [0, n), unbiased via rejection.
    int uniform_int(int n);

    // Index draw from nonnegative weights (need not be normalized).
    // Zero-weight entries are never selected.
    int categorical(const double* w, int n);

  private:
    std::mt19937_64 eng_;
};

// Stream derivation: root seed + stream name + per-unit index.
Rng derive_stream(uint64_t root_seed, std::string_view name, uint64_t index = 0);
uint64_t derive_seed(uint64_t root_seed, std::string_view name, uint64_t index = 0);

}  // namespace gfnlab

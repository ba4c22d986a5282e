#include "gfnlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gfnlab {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double Rng::normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    uint64_t range = static_cast<uint64_t>(n);
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return static_cast<int>(x % range);
}

int Rng::categorical(const double* w, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += w[i];
    if (!(total > 0.0)) throw std::invalid_argument("Rng::categorical: weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    int last_positive = -1;
    for (int i = 0; i < n; ++i) {
        if (w[i] > 0.0) last_positive = i;
        acc += w[i];
        if (u < acc && w[i] > 0.0) return i;
    }
    return last_positive;  // u landed on the tail of accumulated rounding error
}

uint64_t derive_seed(uint64_t root_seed, std::string_view name, uint64_t index) {
    uint64_t h = splitmix64(root_seed ^ fnv1a64(name));
    return splitmix64(h ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

Rng derive_stream(uint64_t root_seed, std::string_view name, uint64_t index) {
    return Rng(derive_seed(root_seed, name, index));
}

}  // namespace gfnlab

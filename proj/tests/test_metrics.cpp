#include <doctest.h>

#include <gfnlab/bitseq.hpp>
#include <gfnlab/hypergrid.hpp>
#include <gfnlab/metrics.hpp>
#include <gfnlab/rng.hpp>

#include <cmath>

using namespace gfnlab;

TEST_CASE("l1: identical distributions give zero") {
    Vector a(4);
    a << 0.1, 0.2, 0.3, 0.4;
    CHECK(l1_mean(a, a) == 0.0);
}

TEST_CASE("l1: point mass vs uniform over four states") {
    Vector point = Vector::Zero(4);
    point(0) = 1.0;
    Vector uniform = Vector::Constant(4, 0.25);
    CHECK(l1_mean(point, uniform) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("l1 is a metric on random distributions") {
    Rng rng = derive_stream(0, "l1");
    for (int trial = 0; trial < 100; ++trial) {
        auto random_dist = [&]() {
            Vector v(16);
            for (int i = 0; i < 16; ++i) v(i) = rng.uniform_pos();
            return Vector(v / v.sum());
        };
        Vector a = random_dist(), b = random_dist(), c = random_dist();
        CHECK(l1_mean(a, b) == l1_mean(b, a));
        CHECK(l1_mean(a, a) == 0.0);
        if (trial % 7 == 0) {
            Vector almost = a;
            almost(3) += 1e-9;
            CHECK(l1_mean(a, almost) > 0.0);
        }
        CHECK(l1_mean(a, c) <= l1_mean(a, b) + l1_mean(b, c) + 1e-15);
    }
}

TEST_CASE("last-W window keeps only the most recent terminals") {
    EmpiricalDist d(8, WindowPolicy::LastW, 2);
    d.record(0);  // a
    d.record(1);  // b
    d.record(2);  // c, pushes a out
    Vector snap = d.snapshot();
    CHECK(snap(0) == 0.0);
    CHECK(snap(1) == doctest::Approx(0.5));
    CHECK(snap(2) == doctest::Approx(0.5));
    CHECK(d.total() == 2);
}

TEST_CASE("cumulative counts converge to the source distribution") {
    EmpiricalDist d(16, WindowPolicy::Cumulative, 0);
    Rng rng = derive_stream(1, "cum");
    const int64_t n = 1000000;
    for (int64_t i = 0; i < n; ++i) d.record(rng.uniform_int(16));
    Vector snap = d.snapshot();
    const double p = 1.0 / 16;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    for (int i = 0; i < 16; ++i) CHECK(std::abs(snap(i) - p) < 3 * sigma);
    CHECK(std::abs(snap.sum() - 1.0) < 1e-12);
}

TEST_CASE("fresh-eval empirical retains nothing between evaluations") {
    EmpiricalDist d(4, WindowPolicy::FreshEval, 0);
    d.record(1);
    d.record(2);
    CHECK(d.total() == 0);
    CHECK(d.snapshot().isZero(0.0));
}

TEST_CASE("mode set is monotone and counts grid mode cells") {
    HyperGridEnv env(2, 8, 1e-4, 1.0, 3.0);
    ModeSet modes;
    auto add_state = [&](int x0, int x1) {
        GridState s;
        s.ndim = 2;
        s.c[0] = static_cast<int16_t>(x0);
        s.c[1] = static_cast<int16_t>(x1);
        if (env.is_mode(s)) modes.add(env.state_index(s));
    };
    CHECK(modes.count() == 0);
    add_state(1, 1);
    add_state(1, 7);
    CHECK(modes.count() == 2);
    add_state(4, 4);  // not a mode
    CHECK(modes.count() == 2);
    add_state(1, 7);  // repeat does not grow the set
    CHECK(modes.count() == 2);
    add_state(7, 1);
    add_state(7, 7);
    CHECK(modes.count() == 4);
}

TEST_CASE("diversity counts distinct valid strings against the Catalan total") {
    // all samples the same valid string
    std::vector<uint64_t> same(100, 0b1010);  // "0101"
    auto r = diversity(same, 2);
    CHECK(r.distinct_valid == 1);
    CHECK(r.fraction == doctest::Approx(0.5));  // catalan(2) = 2

    // an exhaustive emitter reaches fraction 1.0
    std::vector<uint64_t> all;
    for (uint64_t b = 0; b < 16; ++b)
        if (bitseq_is_valid(b, 4)) all.push_back(b);
    auto r2 = diversity(all, 2);
    CHECK(r2.distinct_valid == static_cast<int64_t>(catalan(2)));
    CHECK(r2.fraction == 1.0);

    // invalid strings never count
    std::vector<uint64_t> junk = {0b0011, 0b0110, 0b1010};
    auto r3 = diversity(junk, 2);
    CHECK(r3.distinct_valid == 1);
    CHECK(r3.distinct_valid <= static_cast<int64_t>(catalan(2)));
}

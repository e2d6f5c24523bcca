#pragma once

// Shared sampling helpers for the test suites. All generators are seeded
// explicitly so every run is reproducible.

#include <obi/core.hpp>
#include <obi/polytope.hpp>

#include <random>

namespace obi::testutil {

// Valid but otherwise arbitrary behavior (not necessarily classical or
// quantum: rows are independent random points of the simplex).
inline ExtendedBehavior random_behavior(int l, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    ExtendedBehavior b(l);
    for (int x = 0; x < l; ++x) {
        double s = 0;
        double v[4];
        for (auto& q : v) {
            q = e(rng) + 1e-9;
            s += q;
        }
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) b.o(x, a, bb) = v[2 * a + bb] / s;
    }
    for (int a = 0; a < 2; ++a) {
        const double p = std::uniform_real_distribution<double>(0, 1)(rng);
        b.d(a, 0) = p;
        b.d(a, 1) = 1 - p;
    }
    return b;
}

// Random convex mixture of k deterministic strategies.
inline ExtendedBehavior random_classical_mixture(int l, int k, std::mt19937_64& rng) {
    const auto verts = polytope_vertices(l);
    std::uniform_int_distribution<size_t> pick(0, verts.size() - 1);
    std::exponential_distribution<double> e(1.0);
    std::vector<ExtendedBehavior> parts;
    std::vector<double> w;
    double tot = 0;
    for (int i = 0; i < k; ++i) {
        parts.push_back(verts[pick(rng)]);
        w.push_back(e(rng) + 1e-9);
        tot += w.back();
    }
    for (auto& v : w) v /= tot;
    return mix(parts, w);
}

} // namespace obi::testutil

#pragma once

// Symmetry group of the scenario: permutations of the instrument values, a
// global flip of A's outcome, and a flip of B's outcome conditioned on the
// value of a that B's device receives. Group size l! * 2 * 4.

#include <obi/core.hpp>

namespace obi {

struct Relabeling {
    std::vector<int> xperm;     // new_x = xperm[x]
    int aflip = 0;              // new_a = a ^ aflip
    std::array<int, 2> bflip{}; // new_b = b ^ bflip[new_a]

    static Relabeling identity(int l) {
        Relabeling r;
        r.xperm.resize(l);
        for (int i = 0; i < l; ++i) r.xperm[i] = i;
        return r;
    }
};

ExtendedBehavior apply(const Relabeling& r, const ExtendedBehavior& b);
Relabeling compose(const Relabeling& outer, const Relabeling& inner); // apply(compose) == apply(outer) after apply(inner)
Relabeling inverse(const Relabeling& r);
std::vector<Relabeling> relabeling_group(int l);

} // namespace obi

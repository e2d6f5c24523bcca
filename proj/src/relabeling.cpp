#include <obi/relabeling.hpp>

#include <algorithm>
#include <numeric>

namespace obi {

ExtendedBehavior apply(const Relabeling& r, const ExtendedBehavior& b) {
    if (static_cast<int>(r.xperm.size()) != b.l) throw StructuralError("relabeling: wrong number of settings");
    ExtendedBehavior out(b.l);
    for (int x = 0; x < b.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                const int a2 = a ^ r.aflip;
                out.o(r.xperm[x], a2, bb ^ r.bflip[a2]) = b.o(x, a, bb);
            }
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
            const int a2 = a ^ r.aflip;
            out.d(a2, bb ^ r.bflip[a2]) = b.d(a, bb);
        }
    return out;
}

Relabeling compose(const Relabeling& outer, const Relabeling& inner) {
    const int l = static_cast<int>(inner.xperm.size());
    Relabeling r = Relabeling::identity(l);
    for (int x = 0; x < l; ++x) r.xperm[x] = outer.xperm[inner.xperm[x]];
    r.aflip = outer.aflip ^ inner.aflip;
    for (int a2 = 0; a2 < 2; ++a2) r.bflip[a2] = inner.bflip[a2 ^ outer.aflip] ^ outer.bflip[a2];
    return r;
}

Relabeling inverse(const Relabeling& r) {
    const int l = static_cast<int>(r.xperm.size());
    Relabeling inv = Relabeling::identity(l);
    for (int x = 0; x < l; ++x) inv.xperm[r.xperm[x]] = x;
    inv.aflip = r.aflip;
    for (int a = 0; a < 2; ++a) inv.bflip[a] = r.bflip[a ^ r.aflip];
    return inv;
}

std::vector<Relabeling> relabeling_group(int l) {
    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Relabeling> group;
    do {
        for (int af = 0; af < 2; ++af)
            for (int b0 = 0; b0 < 2; ++b0)
                for (int b1 = 0; b1 < 2; ++b1) {
                    Relabeling r;
                    r.xperm = perm;
                    r.aflip = af;
                    r.bflip = {b0, b1};
                    group.push_back(std::move(r));
                }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return group;
}

} // namespace obi

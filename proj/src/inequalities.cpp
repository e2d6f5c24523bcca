#include <obi/inequalities.hpp>

#include <cmath>
#include <map>

namespace obi {

double LinearFunctional::eval(const ExtendedBehavior& b) const {
    if (b.l != l) throw StructuralError("functional: scenario mismatch");
    double v = constant;
    for (size_t i = 0; i < obs_c.size(); ++i) v += obs_c[i] * b.obs[i];
    for (int i = 0; i < 4; ++i) v += do_c[i] * b.do_[i];
    return v;
}

LinearFunctional trivial_functional(int l, int a, int b, int x) {
    if (x < 0 || x >= l) throw DomainError("trivial: setting out of range");
    LinearFunctional f(l);
    f.dc(a, b) = 1;
    f.oc(x, a, b) = -1;
    return f;
}

LinearFunctional il22_functional(int l, int a, int b, int x, int xp) {
    if (x == xp) throw DomainError("il22: needs two distinct settings");
    if (x < 0 || x >= l || xp < 0 || xp >= l) throw DomainError("il22: setting out of range");
    LinearFunctional f(l);
    f.dc(a, b) = 1;
    f.oc(xp, a, b) -= 1;
    f.oc(x, a, 1 - b) += 1;
    f.oc(x, 1 - a, b) += 1;
    f.oc(xp, 1 - a, b) -= 1;
    return f;
}

LinearFunctional instrumental_functional(int which, int l) {
    LinearFunctional f(l);
    switch (which) {
    case 1:
        if (l < 2) throw DomainError("instrumental 1: needs l >= 2");
        f.oc(0, 0, 0) = 1;
        f.oc(1, 0, 1) = 1;
        f.constant = -1;
        break;
    case 2:
        if (l < 3) throw DomainError("instrumental 2: needs l >= 3");
        f.oc(0, 0, 1) = 1;
        f.oc(1, 0, 1) = -1;
        f.oc(1, 1, 1) = -1;
        f.oc(2, 1, 0) = -1;
        f.oc(2, 0, 1) = -1;
        break;
    case 3:
        if (l < 4) throw DomainError("instrumental 3: needs l >= 4");
        f.oc(0, 0, 0) = 1;
        f.oc(0, 1, 0) = 1;
        f.oc(1, 0, 1) = -1;
        f.oc(1, 1, 0) = -1;
        f.oc(2, 0, 0) = -1;
        f.oc(2, 1, 0) = -1;
        f.oc(3, 0, 0) = -1;
        f.oc(3, 1, 1) = -1;
        break;
    default:
        throw DomainError("instrumental: which must be 1, 2 or 3");
    }
    return f;
}

LinearFunctional ace_bound_functional(int which, int l) {
    LinearFunctional f(l);
    switch (which) {
    case 1:
        if (l < 2) throw DomainError("ace bound 1: needs l >= 2");
        f.oc(0, 0, 0) = 2;
        f.oc(0, 1, 1) = 1;
        f.oc(1, 0, 1) = 1;
        f.oc(1, 1, 1) = 1;
        f.constant = -2;
        break;
    case 2:
        if (l < 3) throw DomainError("ace bound 2: needs l >= 3");
        f.oc(0, 0, 0) = 1;
        f.oc(2, 0, 0) = 1;
        f.oc(0, 1, 0) = 1;
        f.oc(1, 1, 1) = 1;
        f.oc(2, 1, 1) = 1;
        f.constant = -2;
        break;
    case 3:
        if (l < 3) throw DomainError("ace bound 3: needs l >= 3");
        f.oc(0, 0, 0) = 1;
        f.oc(1, 0, 0) = 1;
        f.oc(1, 0, 1) = -1;
        f.oc(2, 0, 1) = 1;
        f.oc(0, 1, 0) = 1;
        f.oc(1, 1, 0) = -1;
        f.oc(1, 1, 1) = 1;
        f.oc(2, 1, 1) = 1;
        f.constant = -2;
        break;
    default:
        throw DomainError("ace bound: which must be 1, 2 or 3");
    }
    return f;
}

double eval_trivial(const ExtendedBehavior& b, int a, int bb, int x) {
    return trivial_functional(b.l, a, bb, x).eval(b);
}

double eval_il22(const ExtendedBehavior& b, int a, int bb, int x, int xp) {
    return il22_functional(b.l, a, bb, x, xp).eval(b);
}

double eval_instrumental(const ExtendedBehavior& b, int which, const Relabeling& r) {
    return relabel(instrumental_functional(which, b.l), r).eval(b);
}

AceBoundResult eval_ace_bound(const ExtendedBehavior& b, int which) {
    AceBoundResult res;
    res.bound = ace_bound_functional(which, b.l).eval(b);
    res.ace = ace(b);
    res.satisfied = res.ace >= res.bound - kEqTol;
    return res;
}

std::pair<double, double> eval_il22_correlator(const Correlators& c, int x, int xp) {
    if (x == xp) throw DomainError("correlator form: needs two distinct settings");
    const int l = static_cast<int>(c.ab.size());
    if (x < 0 || x >= l || xp < 0 || xp >= l) throw DomainError("correlator form: setting out of range");
    const double first = std::abs(c.ab[x] - c.b[x] + 2.0 * c.b_do[1]) - 1.0 - c.a[x];
    const double second = std::abs(c.ab[x] - c.b[xp] + c.b_do[1]) - 1.0;
    return {first, second};
}

LinearFunctional relabel(const LinearFunctional& f, const Relabeling& r) {
    if (static_cast<int>(r.xperm.size()) != f.l) throw StructuralError("relabel: scenario mismatch");
    LinearFunctional out(f.l);
    out.constant = f.constant;
    for (int x = 0; x < f.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const int a2 = a ^ r.aflip;
                out.oc(r.xperm[x], a2, b ^ r.bflip[a2]) = f.oc(x, a, b);
            }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const int a2 = a ^ r.aflip;
            out.dc(a2, b ^ r.bflip[a2]) = f.dc(a, b);
        }
    return out;
}

std::vector<LinearFunctional> orbit(const LinearFunctional& f) {
    std::vector<LinearFunctional> out;
    std::map<std::vector<long long>, bool> seen;
    for (const auto& r : relabeling_group(f.l)) {
        LinearFunctional g = relabel(f, r);
        std::vector<long long> key;
        key.reserve(g.obs_c.size() + 5);
        for (double v : g.obs_c) key.push_back(std::llround(v * 1e6));
        for (double v : g.do_c) key.push_back(std::llround(v * 1e6));
        key.push_back(std::llround(g.constant * 1e6));
        if (!seen.emplace(std::move(key), true).second) continue;
        out.push_back(std::move(g));
    }
    return out;
}

double min_trivial(const ExtendedBehavior& b) {
    double best = std::numeric_limits<double>::infinity();
    for (int x = 0; x < b.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) best = std::min(best, eval_trivial(b, a, bb, x));
    return best;
}

double min_il22(const ExtendedBehavior& b) {
    double best = std::numeric_limits<double>::infinity();
    for (int x = 0; x < b.l; ++x)
        for (int xp = 0; xp < b.l; ++xp) {
            if (x == xp) continue;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) best = std::min(best, eval_il22(b, a, bb, x, xp));
        }
    return best;
}

} // namespace obi

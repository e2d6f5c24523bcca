#include <obi/polytope.hpp>

#include <obi/solver/lp.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace obi {

std::vector<DeterministicStrategy> all_strategies(int l) {
    std::vector<DeterministicStrategy> out;
    out.reserve(size_t(1) << (l + 2));
    for (int fm = 0; fm < (1 << l); ++fm)
        for (int gm = 0; gm < 4; ++gm) {
            DeterministicStrategy s;
            s.f.resize(l);
            for (int x = 0; x < l; ++x) s.f[x] = (fm >> x) & 1;
            s.g = {gm & 1, (gm >> 1) & 1};
            out.push_back(std::move(s));
        }
    return out;
}

std::vector<ExtendedBehavior> polytope_vertices(int l) {
    Scenario sc{l, 2, 2};
    std::vector<ExtendedBehavior> out;
    for (const auto& s : all_strategies(l)) out.push_back(from_strategy(s, sc));
    return out;
}

std::vector<double> behavior_coords(const ExtendedBehavior& b) {
    std::vector<double> v(b.obs.begin(), b.obs.end());
    v.insert(v.end(), b.do_.begin(), b.do_.end());
    return v;
}

std::vector<double> reduced_coords(const ExtendedBehavior& b) {
    std::vector<double> v;
    v.reserve(3 * b.l + 2);
    for (int x = 0; x < b.l; ++x) {
        v.push_back(b.o(x, 0, 0));
        v.push_back(b.o(x, 0, 1));
        v.push_back(b.o(x, 1, 0));
    }
    v.push_back(b.d(0, 0));
    v.push_back(b.d(1, 0));
    return v;
}

MembershipResult membership_lp(const ExtendedBehavior& b) {
    if (b.l > 8) throw CapacityError("membership: vertex enumeration capped at l <= 8");
    if (!is_valid(b)) throw DomainError("membership: invalid behavior");

    const auto vertices = polytope_vertices(b.l);
    const int nv = static_cast<int>(vertices.size());
    const int nc = 4 * b.l + 4;

    StandardLp<double> lp;
    lp.a.assign(nc + 1, std::vector<double>(nv, 0.0));
    lp.b.assign(nc + 1, 0.0);
    lp.c.assign(nv, 0.0);
    for (int s = 0; s < nv; ++s) {
        const auto vc = behavior_coords(vertices[s]);
        for (int i = 0; i < nc; ++i) lp.a[i][s] = vc[i];
        lp.a[nc][s] = 1.0;
    }
    const auto bc = behavior_coords(b);
    for (int i = 0; i < nc; ++i) lp.b[i] = bc[i];
    lp.b[nc] = 1.0;

    MembershipResult res;
    auto sol = lp_solve_standard(lp);
    if (sol.status == LpStatus::Optimal) {
        res.member = true;
        res.weights = sol.x;
        return res;
    }

    // Deepest normalized separating functional: minimize its value on b
    // subject to nonnegativity on every vertex and box-bounded coefficients.
    LpProblem<double> sep;
    const int n = nc + 1; // coefficients + constant term
    sep.c.assign(n, 0.0);
    for (int i = 0; i < nc; ++i) sep.c[i] = bc[i];
    sep.c[nc] = 1.0;
    sep.lower.assign(n, std::optional<double>{});
    sep.upper.assign(n, std::optional<double>{});
    for (int i = 0; i < nc; ++i) {
        sep.lower[i] = -1.0;
        sep.upper[i] = 1.0;
    }
    sep.lower[nc] = -8.0;
    sep.upper[nc] = 8.0;
    for (int s = 0; s < nv; ++s) {
        std::vector<double> row(n, 0.0);
        const auto vc = behavior_coords(vertices[s]);
        for (int i = 0; i < nc; ++i) row[i] = vc[i];
        row[nc] = 1.0;
        sep.a_ge.push_back(std::move(row));
        sep.b_ge.push_back(0.0);
    }
    auto cut = lp_solve(sep);
    if (cut.status != LpStatus::Optimal)
        throw SolverError("membership: separation LP failed");

    res.member = false;
    LinearFunctional cert(b.l);
    for (int x = 0; x < b.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) cert.oc(x, a, bb) = cut.x[4 * x + 2 * a + bb];
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) cert.dc(a, bb) = cut.x[4 * b.l + 2 * a + bb];
    cert.constant = cut.x[nc];
    res.certificate = cert;
    res.certificate_value = cert.eval(b);
    double cmin = std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) cmin = std::min(cmin, cert.eval(v));
    res.classical_min = cmin;
    return res;
}

namespace {

struct Bound {
    int slope; // coefficient of s
    double off;
};

} // namespace

ConstructiveResult membership_constructive(const ExtendedBehavior& b) {
    if (b.l > 16) throw CapacityError("constructive membership: table capped at l <= 16");
    if (!is_valid(b)) throw DomainError("constructive membership: invalid behavior");
    const double tol = kEqTol;

    const double d00 = b.d(0, 0); // p(0|do(0))
    const double d10 = b.d(1, 0); // p(0|do(1))

    double s_lo = std::max(0.0, d00 + d10 - 1.0);
    double s_hi = std::min(d00, d10);
    double worst = s_hi - s_lo;

    std::vector<std::vector<Bound>> lowers(b.l), uppers(b.l);
    for (int i = 0; i < b.l; ++i) {
        const double p00 = b.o(i, 0, 0), p01 = b.o(i, 0, 1), p10 = b.o(i, 1, 0);
        lowers[i] = {{0, 0.0}, {0, d10 - p01 - p10}, {1, p00 - d00}, {1, -p10}};
        uppers[i] = {{0, p00}, {0, d10 - p10}, {1, 0.0}, {1, 1.0 - d00 - p01 - p10}};
        for (const auto& lo : lowers[i])
            for (const auto& up : uppers[i]) {
                if (lo.slope == up.slope) {
                    worst = std::min(worst, up.off - lo.off);
                } else if (lo.slope == 0) {
                    s_lo = std::max(s_lo, lo.off - up.off);
                } else {
                    s_hi = std::min(s_hi, up.off - lo.off);
                }
            }
    }
    worst = std::min(worst, s_hi - s_lo);

    ConstructiveResult res;
    res.slack = s_hi - s_lo;
    res.boundary = std::abs(worst) <= tol;
    if (worst < -tol) {
        res.feasible = false;
        return res;
    }
    res.feasible = true;

    const double s = std::clamp(0.5 * (s_lo + s_hi), 0.0, 1.0);
    std::array<double, 4> qb = {s, d00 - s, d10 - s, 1.0 + s - d00 - d10}; // (b0,b1)
    for (auto& v : qb) v = std::max(v, 0.0);

    // Per-setting conditionals q_i(a=0 | b0, b1).
    std::vector<std::array<double, 4>> cond(b.l);
    for (int i = 0; i < b.l; ++i) {
        const double p00 = b.o(i, 0, 0), p01 = b.o(i, 0, 1), p10 = b.o(i, 1, 0);
        double t_lo = 0, t_hi = 1;
        for (const auto& lo : lowers[i]) t_lo = std::max(t_lo, lo.off + lo.slope * s);
        for (const auto& up : uppers[i]) t_hi = std::min(t_hi, up.off + up.slope * s);
        const double t = 0.5 * (t_lo + std::max(t_lo, t_hi));
        const std::array<double, 4> row0 = {t, p00 - t, d10 - p10 - t, p01 + p10 + t - d10};
        for (int cell = 0; cell < 4; ++cell)
            cond[i][cell] = qb[cell] > 0 ? std::clamp(row0[cell] / qb[cell], 0.0, 1.0) : 0.5;
    }

    JointDistribution joint(b.l);
    std::vector<int> avec(b.l);
    for (size_t mask = 0; mask < (size_t(1) << b.l); ++mask) {
        for (int x = 0; x < b.l; ++x) avec[x] = static_cast<int>((mask >> x) & 1);
        for (int b0 = 0; b0 < 2; ++b0)
            for (int b1 = 0; b1 < 2; ++b1) {
                const int cell = 2 * b0 + b1;
                double p = qb[cell];
                for (int x = 0; x < b.l; ++x) p *= (avec[x] == 0) ? cond[x][cell] : 1.0 - cond[x][cell];
                joint.at(avec, b0, b1) = p;
            }
    }

    // Reproduction audit: marginals of the joint must match the behavior.
    double err = 0;
    std::vector<double> obs_hat(static_cast<size_t>(b.l) * 4, 0.0);
    std::array<double, 4> do_hat{};
    for (size_t mask = 0; mask < (size_t(1) << b.l); ++mask) {
        for (int x = 0; x < b.l; ++x) avec[x] = static_cast<int>((mask >> x) & 1);
        for (int b0 = 0; b0 < 2; ++b0)
            for (int b1 = 0; b1 < 2; ++b1) {
                const double p = joint.at(avec, b0, b1);
                if (p == 0) continue;
                const std::array<int, 2> bofa = {b0, b1};
                for (int x = 0; x < b.l; ++x) obs_hat[static_cast<size_t>(4 * x + 2 * avec[x] + bofa[avec[x]])] += p;
            }
    }
    // p(b|do(a)) is the marginal of b_a; the joint's (b0,b1) marginal is qb
    // exactly because the per-setting conditionals sum to one.
    do_hat = {qb[0] + qb[1], qb[2] + qb[3], qb[0] + qb[2], qb[1] + qb[3]};
    for (size_t i = 0; i < obs_hat.size(); ++i) err = std::max(err, std::abs(obs_hat[i] - b.obs[i]));
    for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(do_hat[i] - b.do_[i]));
    res.max_marginal_error = err;
    res.joint = std::move(joint);
    return res;
}

// --- facet enumeration -------------------------------------------------------

namespace {

// Reduced-coordinate integer key of an affine functional: constant first,
// then per-setting (00, 01, 10) coefficients, then the two do coefficients.
std::vector<long long> reduced_key(const LinearFunctional& f) {
    std::vector<long long> key;
    key.reserve(3 * f.l + 3);
    auto push = [&key](double v) {
        const long long r = std::llround(v);
        if (std::abs(v - static_cast<double>(r)) > 1e-6)
            throw SolverError("facet classification: non-integer coefficient");
        key.push_back(r);
    };
    double c = f.constant;
    for (int x = 0; x < f.l; ++x) c += f.oc(x, 1, 1);
    for (int a = 0; a < 2; ++a) c += f.dc(a, 1);
    push(c);
    for (int x = 0; x < f.l; ++x) {
        push(f.oc(x, 0, 0) - f.oc(x, 1, 1));
        push(f.oc(x, 0, 1) - f.oc(x, 1, 1));
        push(f.oc(x, 1, 0) - f.oc(x, 1, 1));
    }
    push(f.dc(0, 0) - f.dc(0, 1));
    push(f.dc(1, 0) - f.dc(1, 1));
    long long g = 0;
    for (long long v : key) g = std::gcd(g, std::abs(v));
    if (g > 1)
        for (auto& v : key) v /= g;
    return key;
}

} // namespace

FacetEnumeration enumerate_facets(const Scenario& scenario) {
    scenario.check();
    const int l = scenario.l;
    if (l > 4) throw CapacityError("facet enumeration capped at l <= 4");

    const auto vertices = polytope_vertices(l);
    std::vector<std::vector<Rational>> vr;
    for (const auto& v : vertices) {
        const auto rc = reduced_coords(v);
        std::vector<Rational> row;
        for (double d : rc) row.emplace_back(static_cast<long long>(std::llround(d)));
        vr.push_back(std::move(row));
    }

    FacetEnumeration fe;
    fe.dimension = affine_rank(vr);
    auto dd = double_description(vr);
    if (!dd.full_dimensional)
        throw SolverError("facet enumeration: vertex set not full dimensional in the reduced embedding");

    // Known families indexed by reduced key.
    std::map<std::vector<long long>, std::string> family_of;
    auto learn = [&](const LinearFunctional& f, const std::string& name) { family_of[reduced_key(f)] = name; };
    for (int x = 0; x < l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                LinearFunctional pos(l);
                pos.oc(x, a, bb) = 1;
                learn(pos, "positivity");
                learn(trivial_functional(l, a, bb, x), "trivial");
            }
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
            LinearFunctional dpos(l);
            dpos.dc(a, bb) = 1;
            learn(dpos, "do-positivity");
            for (int x = 0; x < l; ++x)
                for (int xp = 0; xp < l; ++xp)
                    if (x != xp) learn(il22_functional(l, a, bb, x, xp), "il22");
        }

    const auto group = relabeling_group(l);
    std::map<std::vector<long long>, int> orbit_ids;

    for (const auto& facet : dd.facets) {
        ClassifiedFacet cf;
        LinearFunctional lifted(l);
        lifted.constant = facet.offset.convert_to<double>();
        for (int x = 0; x < l; ++x) {
            lifted.oc(x, 0, 0) = facet.coeffs[3 * x + 0].convert_to<double>();
            lifted.oc(x, 0, 1) = facet.coeffs[3 * x + 1].convert_to<double>();
            lifted.oc(x, 1, 0) = facet.coeffs[3 * x + 2].convert_to<double>();
        }
        lifted.dc(0, 0) = facet.coeffs[3 * l + 0].convert_to<double>();
        lifted.dc(1, 0) = facet.coeffs[3 * l + 1].convert_to<double>();
        cf.functional = lifted;
        cf.tight_vertices = facet.tight;

        const auto key = reduced_key(lifted);
        auto it = family_of.find(key);
        cf.family = (it != family_of.end()) ? it->second : "other";

        std::vector<long long> canon;
        for (const auto& r : group) {
            auto k = reduced_key(relabel(lifted, r));
            if (canon.empty() || k < canon) canon = std::move(k);
        }
        auto [oit, fresh] = orbit_ids.emplace(canon, static_cast<int>(orbit_ids.size()));
        cf.orbit_id = oit->second;
        (void)fresh;
        fe.facets.push_back(std::move(cf));
    }

    std::map<int, std::pair<std::string, int>> orbit_stats; // id -> (family, size)
    for (const auto& f : fe.facets) {
        fe.family_counts[f.family]++;
        auto& st = orbit_stats[f.orbit_id];
        st.first = f.family;
        st.second++;
    }
    fe.orbit_count = static_cast<int>(orbit_stats.size());
    for (const auto& [id, st] : orbit_stats) fe.orbits_by_family[st.first].push_back(st.second);
    return fe;
}

std::string facets_to_json(const FacetEnumeration& fe) {
    nlohmann::json j;
    j["dimension"] = fe.dimension;
    j["orbit_count"] = fe.orbit_count;
    for (const auto& f : fe.facets) {
        nlohmann::json jf;
        jf["family"] = f.family;
        jf["orbit"] = f.orbit_id;
        jf["const"] = f.functional.constant;
        for (int x = 0; x < f.functional.l; ++x)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (f.functional.oc(x, a, b) != 0)
                        jf["coeffs"]["obs:" + std::to_string(x) + ":" + std::to_string(a) + ":" + std::to_string(b)] =
                            f.functional.oc(x, a, b);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (f.functional.dc(a, b) != 0)
                    jf["coeffs"]["do:" + std::to_string(a) + ":" + std::to_string(b)] = f.functional.dc(a, b);
        jf["tight"] = f.tight_vertices;
        j["facets"].push_back(jf);
    }
    return j.dump(2);
}

} // namespace obi
